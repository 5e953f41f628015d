// frequency.hpp - frequency vectors, Diophantine checks, rational approximants,
// and the lattice of Fourier modes of a rational-frequency potential.
//
// All lattice arithmetic is exact (GMP rationals); doubles appear only at the
// boundary where real frequencies enter or leave.

#pragma once

#include <gmpxx.h>

#include <functional>
#include <string>
#include <vector>

namespace qpa {

using Int = mpz_class;
using Rat = mpq_class;

// --------------------------- frequency types -----------------------------------

// A real frequency vector with its Diophantine budget:
//   |n.omega| >= a0*|n|^{-b0}          (joint condition, |n| the l1 norm)
//   dist(n*omega_j, Z) >= c*|n|^{-beta} (per component)
struct Frequency {
    std::vector<double> omega;
    double a0 = 0.1;
    double b0 = 2.0;
    double c = 0.1;
    double beta = 2.0;

    Frequency() = default;
    Frequency(std::vector<double> om, double a0_, double b0_, double c_, double beta_)
        : omega(std::move(om)), a0(a0_), b0(b0_), c(c_), beta(beta_) {
        validate();
    }

    int nu() const { return static_cast<int>(omega.size()); }
    void validate() const; // throws ConfigError on violated invariants
};

// A vector of rational approximants omega_j ~ num_j/den_j produced at budget r.
struct RationalFrequency {
    std::vector<long long> num;
    std::vector<long long> den;
    long long r = 1;

    RationalFrequency() = default;
    RationalFrequency(std::vector<long long> n, std::vector<long long> d, long long r_)
        : num(std::move(n)), den(std::move(d)), r(r_) {
        validate();
    }

    int nu() const { return static_cast<int>(num.size()); }
    double value(int j) const { return static_cast<double>(num[j]) / static_cast<double>(den[j]); }
    void validate() const;
};

// The quotient lattice Z^nu / N(omega~) of a rational frequency vector:
//   N = {n : n.omega~ = 0},  n.omega~ = ell(n)*tau0,  T = 1/tau0.
// ell is the additive integer label of a coset; the null basis spans N.
struct OmegaLattice {
    RationalFrequency rf;            // as supplied (possibly unreduced)
    std::vector<long long> red_num;  // reduced numerators p_j
    std::vector<long long> red_den;  // reduced denominators t_j > 0
    Rat tau0;                        // generator of {n.omega~} + Z*1... = g/Tbar
    long long T = 1;                 // exact period, T = 1/tau0
    std::vector<long long> lcoef;    // ell(e_j); ell(n) = sum n_j*lcoef[j]
    std::vector<std::vector<long long>> null_basis; // nu-1 primitive kernel vectors

    int nu() const { return static_cast<int>(lcoef.size()); }
    long long max_den() const;
    long long ell(const std::vector<long long>& n) const; // exact, overflow-checked
    double xi(long long ell_value) const {
        return static_cast<double>(ell_value) / static_cast<double>(T);
    }
};

// --------------------------- reports --------------------------------------------

struct DiophantineReport {
    bool pass = false;
    double min_ratio = 0.0;          // min |n.omega|*|n|^{b0} over 0 < |n| <= R
    double min_abs = 0.0;            // |n.omega| at the minimizer
    std::vector<long long> argmin;
};

struct QuotientNormResult {
    long long norm = 0;              // |m| = min l1 norm over the coset
    std::vector<long long> rep;      // a representative attaining it
};

struct Coset {
    long long ell = 0;
    long long norm = 0;
    std::vector<long long> rep;
};

// --------------------------- operations ----------------------------------------

// Scans 0 < |n|_1 <= R for the worst ratio |n.omega|*|n|^{b0}; pass iff >= a0.
DiophantineReport check_diophantine(const Frequency& f, long long R);

// Continued-fraction approximant per component: the first convergent whose
// denominator exceeds r, certified against the half-ulp enclosure of the input
// double. Exactly rational components with denominator <= r pass through.
RationalFrequency rational_approximation(const Frequency& f, long long r);

// Exact construction of tau0, T, ell, and the null lattice.
OmegaLattice build_lattice(const RationalFrequency& rf);

// ell(n) with the defining identity ell = T*(n.omega~) re-checked in floating point.
long long coset_index(const OmegaLattice& lat, const std::vector<long long>& n);

// Shell scan for the quotient norm of the coset with label ell.
// radius < 0 selects the default 4*|ell|*max_j(t_j).
QuotientNormResult quotient_norm(const OmegaLattice& lat, long long ell, long long radius = -1);

// All cosets with quotient norm <= R, sorted by ell.
std::vector<Coset> coset_ball(const OmegaLattice& lat, long long R);

// Enumerates every integer vector with |n|_1 == s (lexicographic order).
void for_each_l1_shell(int nu, long long s,
                       const std::function<void(const std::vector<long long>&)>& fn);

} // namespace qpa

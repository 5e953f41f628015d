// potential.hpp - quasi-periodic potentials with finite Fourier support, their
// periodic pushforwards onto an omega-lattice, decay-tail certificates, and
// Fourier coefficient recovery from time samples.

#pragma once

#include <qpa/frequency.hpp>

#include <complex>
#include <map>
#include <vector>

namespace qpa {

using Cplx = std::complex<double>;

// --------------------------- types ----------------------------------------------

// V(x) = sum_n c(n) exp(2*pi*i*x*(n.omega)); finite coefficient map.
// (epsilon, kappa0, alpha0) is the declared decay budget: validation enforces
// |c(n)| <= epsilon*exp(-kappa0*|n|^alpha0), reality c(-n) = conj(c(n)), c(0)=0.
struct FourierPotential {
    Frequency freq;
    std::map<std::vector<long long>, Cplx> coeffs;
    double epsilon = 0.0;
    double kappa0 = 1.0;
    double alpha0 = 1.0;

    FourierPotential() = default;
    FourierPotential(Frequency f, std::map<std::vector<long long>, Cplx> c,
                     double eps, double k0, double a0 = 1.0)
        : freq(std::move(f)), coeffs(std::move(c)), epsilon(eps), kappa0(k0), alpha0(a0) {
        validate();
    }

    void validate() const;
    double norm1() const; // sum of |c(n)|, an upper bound for sup|V|
};

// The T-periodic pushforward: coefficients indexed by the coset label ell,
// q(x) = sum_ell c(ell) exp(2*pi*i*x*ell/T).
struct LatticePotential {
    OmegaLattice lat;
    std::map<long long, Cplx> coeffs;
    double epsilon = 0.0;
    double kappa0 = 1.0;
    double alpha0 = 1.0;

    LatticePotential() = default;
    LatticePotential(OmegaLattice l, std::map<long long, Cplx> c,
                     double eps, double k0, double a0 = 1.0)
        : lat(std::move(l)), coeffs(std::move(c)), epsilon(eps), kappa0(k0), alpha0(a0) {
        validate();
    }

    void validate() const;
    double period() const { return static_cast<double>(lat.T); }
    double evaluate(double x) const; // real-valued by the reality invariant
    double norm1() const;            // sum of |c(ell)|, an upper bound for sup|q|
};

// Uniformly sampled real signal: values[j] taken at t0 + j*dt.
struct SampledSignal {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;
    double t_span() const { return dt * static_cast<double>(values.size() - 1); }
};

struct RecoveryResult {
    Cplx estimate{0.0, 0.0};
    double radius = 0.0; // certified bound for |estimate - d(n)|
};

// --------------------------- operations -----------------------------------------

// Pointwise evaluation of the quasi-periodic sum; throws InvalidPotentialError
// when the imaginary residue exceeds 1e-12 * sum|c|.
double evaluate(const FourierPotential& V, double x);

// Replace omega by the lattice's rational frequency and collapse Fourier
// indices onto cosets: c(ell) = sum over stored n with ell(n) = ell.
LatticePotential pushforward_periodic(const FourierPotential& V, const OmegaLattice& lat);

// rho distance: sum over the union of supports of |c0(n) - c1(n)|.
double distance_rho(const FourierPotential& V0, const FourierPotential& V1);

// Certified upper bound for sum over |n|_1 >= R of exp(-kappa0*|n|^alpha0),
// computed as an exact shell sum plus an integral-majorant remainder.
double tail_bound(double kappa0, double alpha0, int nu, double R);

// Certified bound for a single coset coefficient of a pushforward:
//   |c(m)| <= epsilon * tail_bound(kappa0/2, alpha0, nu, 0) * exp(-kappa0*|m|^alpha0 / 2).
double coset_envelope(double epsilon, double kappa0, double alpha0, int nu, long long coset_norm);

// Quasi-periodic coefficient recovery by a trapezoid average against
// exp(-2*pi*i*t*(n.omega)) over the sampled span, with a certified radius
//   delta + quadrature + C/sqrt(T) + C'*exp(-kappa0*T^{beta0}).
// amp is the declared coefficient envelope amplitude (|d(m)| <= amp*e^{-kappa0|m|});
// amp < 0 selects e^{kappa0} * max|Q|. delta bounds any non-almost-periodic
// component of the samples. beta0 < 0 selects the default 1/(2*b0).
RecoveryResult fourier_recover(const SampledSignal& s, const Frequency& f,
                               const std::vector<long long>& n, double beta0 = -1.0,
                               double kappa0 = 1.0, double amp = -1.0, double delta = 0.0);

// Periodic variant: samples must cover an integer number of periods P on a
// uniform grid (no endpoint duplication); returns the DFT average against
// exp(-2*pi*i*t*ell/P) with a half-grid self-consistency radius.
RecoveryResult recover_periodic_coefficient(const SampledSignal& s, double P, long long ell);

// Translates: (translate q)(x) = q(x + t), realized on coefficients as
// c(n) -> c(n) * exp(2*pi*i*t*(n.omega)) resp. c(ell) -> c(ell) * exp(2*pi*i*t*ell/T).
FourierPotential translate(const FourierPotential& V, double t);
LatticePotential translate(const LatticePotential& q, double t);

} // namespace qpa

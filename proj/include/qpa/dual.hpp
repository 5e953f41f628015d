// dual.hpp - the lattice-dual operator of the Hill problem: truncated Hermitian
// eigenproblem indexed by cosets, yielding Bloch branches E(k), phi(n;k), gap
// edges at the resonance momenta k_m = -xi(m)/2, and a cross-check of the gap
// set against the monodromy engine.

#pragma once

#include <qpa/hill.hpp>
#include <qpa/potential.hpp>

#include <complex>
#include <utility>
#include <vector>

namespace qpa {

// --------------------------- types ----------------------------------------------

// Truncated dual operator at quasi-momentum k. Index set: cosets with quotient
// norm <= R, sorted by label. Entries: Hermitian, diagonal (2 pi)^2 (xi(m)+k)^2,
// off-diagonal c(n - m); coefficients absent from the potential count as 0.
struct DualMatrix {
    double k = 0.0;
    long long R = 1;
    long long T = 1;                 // period of the underlying lattice
    double epsilon = 0.0;            // decay budget carried from the potential
    double kappa0 = 1.0;
    double alpha0 = 1.0;
    std::vector<Coset> cosets;       // index set, ascending label
    std::vector<Cplx> entries;       // row-major dim x dim

    size_t dim() const { return cosets.size(); }
    const Cplx& at(size_t i, size_t j) const { return entries[i * cosets.size() + j]; }
    // Position of the coset with the given label; -1 when outside the index set.
    long long index_of(long long ell) const;
};

// One Bloch branch of the truncated problem: eigenpair normalized to phi(0) = 1.
struct BlochBranch {
    double k = 0.0;
    double E = 0.0;
    long long T = 1;
    std::vector<Coset> cosets;       // index set of the matrix that produced it
    std::vector<Cplx> phi;           // phi[i] pairs cosets[i]
    double residual = 0.0;           // ||(H_k - E) phi||_2 on the truncated set

    Cplx phi_at(long long ell) const;      // 0 outside the index set
    Cplx psi(double x) const;              // sum phi(m) exp(2 pi i (xi(m)+k) x)
};

// One matched gap of the cross-check: hill band n = |ell(m)| against the dual
// gap at the coset with canonical label ell(m) > 0.
struct GapMatch {
    long long label = 0;
    long long coset_ell = 0;
    long long coset_norm = 0;
    double hill_minus = 0.0;
    double hill_plus = 0.0;
    double dual_minus = 0.0;
    double dual_plus = 0.0;
    double discrepancy = 0.0;        // max per-edge |hill - dual|
};

struct CrosscheckReport {
    std::vector<GapMatch> matched;
    std::vector<long long> unmatched_hill;  // open hill labels with no coset in the ball
    std::vector<long long> unmatched_dual;  // canonical coset labels open only dual-side
    double max_discrepancy = 0.0;
    double tol = 0.0;
    bool pass = false;               // no unmatched open gap above tol, all matches within tol
};

// --------------------------- operations -----------------------------------------

// Assembles the truncated dual matrix. Requires R >= 1.
DualMatrix dual_matrix(const LatticePotential& q, double k, long long R);

// Eigenpair whose eigenvector has maximal |component at coset 0|, renormalized
// to phi(0) = 1. Requires k at distance > 1e-6 from every resonance momentum
// k_m = -xi(m)/2 with |m| <= R (gap edges live there; use gap_edges_dual).
// Two candidate branches with scores within 1e-8 and distinct energies raise
// AmbiguityError reporting both.
BlochBranch floquet_branch(const DualMatrix& dm);

// Gap edges (E_minus, E_plus) at the resonance momentum of the coset with label
// m_ell != 0: the two eigenvalues of the truncated problem at k = k_m closest
// to (2 pi k_m)^2, ordered. Each edge is checked against the one-sided limit of
// E(k) at k_m +/- {1e-4, 1e-5} by model-corrected Richardson extrapolation to
// within 1e-6. Throws ResolutionError when the resonant partner coset lies
// outside the index set.
std::pair<double, double> gap_edges_dual(const LatticePotential& q, long long m_ell,
                                         long long R);

// Runs both engines on q and matches dual gaps (cosets with |m| <= R, canonical
// label ell(m) > 0) to hill gaps n = ell(m) for n <= n_max. Open gaps on either
// side without a partner are listed; the report fails (pass = false, never a
// throw) when an unmatched open gap or a per-edge discrepancy exceeds tol.
CrosscheckReport crosscheck_hill(const LatticePotential& q, int n_max, long long R,
                                 double tol);

// Lowest eigenvalue of the truncated problem at k = 0: the ground energy E(0).
double ground_energy_dual(const LatticePotential& q, long long R);

// Default truncation radius for the gap at a coset of the given quotient norm:
// |m| + 8, raised for nu = 1 potentials to the envelope-tail rule (smallest R
// with epsilon * tail_bound(kappa0, alpha0, 1, R) <= 1e-10).
long long default_radius(const LatticePotential& q, long long coset_norm);

} // namespace qpa

// flow.hpp - the isospectral torus: open-gap frames, theta-coordinates, the
// translation (Dubrovin) vector field with interaction cutoff, adaptive
// trajectory integration, trace-formula reconstruction, and the forward map
// from a torus point back to a potential.

#pragma once

#include <qpa/hill.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace qpa {

// --------------------------- types ----------------------------------------------

// One open gap of a frame. xi is the angle scale max(sqrt(gamma), gamma), so
// gamma/xi <= xi holds exactly.
struct GapEntry {
    long long label = 0; // hill gap index n of the source spectrum
    double E_minus = 0.0;
    double E_plus = 0.0;
    double gamma = 0.0; // E_plus - E_minus
    double xi = 0.0;    // max(sqrt(gamma), gamma)
};

// Finite open-gap frame: ground energy, gaps sorted by decreasing width (ties
// by increasing |label|, then by label), and the period of the source
// potential. Gaps are pairwise disjoint and lie strictly above the ground.
struct GapFrame {
    double ground = 0.0;
    std::vector<GapEntry> gaps;
    double period = 0.0;
    size_t size() const { return gaps.size(); }
};

// Point on the gap torus: one full angle theta_n in [0, 2*pi) per frame gap.
// theta = 0 sits at E_minus, theta = pi at E_plus; the Dirichlet eigenvalue
// is mu_n = E_minus + gamma*sin^2(theta/2), and the motion sign sigma is
// + on (0, pi), - on (pi, 2*pi), 0 at {0, pi}.
struct TorusState {
    std::vector<double> theta;
    size_t size() const { return theta.size(); }
};

struct MuSigma {
    double mu = 0.0;
    int sigma = 0;
};

// Integrated trajectory: lifted (non-wrapped) angles per time node, plus the
// interaction cutoff the integration ran with.
struct FlowTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> theta; // theta[j] = lifted angles at times[j]
    size_t n_cut = 0;
    TorusState state_at(size_t j) const; // angles of node j wrapped to [0, 2*pi)
};

// One recovered Fourier coefficient of a reconstructed potential, with its
// certified recovery radius and the decay bound it is compared against.
struct CoefficientReport {
    long long ell = 0;
    long long coset_norm = 0;
    Cplx d{0.0, 0.0};
    double radius = 0.0; // certified recovery radius
    double bound = 0.0;  // sqrt(2*eps)*exp(-kappa0*|m|^alpha0/2) + radius
};

struct IsospectralMap {
    std::vector<double> t_grid; // uniform sample times over one period
    std::vector<double> Q;      // reconstructed potential samples on t_grid
    std::vector<CoefficientReport> coeffs; // sorted by ell
    bool decay_ok = true;       // every |d(ell)| within its bound
};

// --------------------------- operations -----------------------------------------

// Frame from a computed spectrum: keeps the gaps with width >= gamma_min
// (gamma_min must be positive), sorts them by decreasing width (ties by
// increasing |label| then label). Throws InvalidFrameError when the kept data
// is inconsistent (overlapping gaps, or ground not strictly below every gap).
GapFrame build_gap_frame(const SpectrumData& sp, double gamma_min = 1e-8);

// Dirichlet values and motion signs of a torus point. The state must carry
// exactly one angle per frame gap.
std::vector<MuSigma> mu_of_theta(const GapFrame& gf, const TorusState& s);

// Sentinel for "default cutoff": all gaps with gamma >= 1e-8 (a prefix of the
// width-sorted frame).
inline constexpr size_t FLOW_NCUT_DEFAULT = static_cast<size_t>(-1);

// Full-angle rates of the translation flow,
//   dtheta_n/dt = 2*sqrt((mu_n - ground) * prod_{i <= n_cut, i != n}
//                        (E_i^- - mu_n)(E_i^+ - mu_n)/(mu_i - mu_n)^2),
// the unique smooth field for which the induced dmu_n/dt is the Dubrovin
// rate sigma_n * 2*sqrt(...) under mu_n = E_n^- + gamma_n sin^2(theta_n/2).
// Every angle gets a rate; interactions are restricted to gaps i <= n_cut, so
// the first n_cut coordinates form a closed system. A nonpositive radicand or
// coinciding mu values (inconsistent frame data) throw InvalidFrameError;
// n_cut > size() throws ConfigError.
std::vector<double> theta_field(const GapFrame& gf, const TorusState& s,
                                size_t n_cut = FLOW_NCUT_DEFAULT);

// Dormand-Prince 5(4) adaptive integration of theta_field over t_span with
// absolute and relative tolerance tol. Angles are integrated as lifts (theta
// increases without wrapping; the field is everywhere positive). n_nodes = 0
// records every accepted step; n_nodes > 0 records exactly the uniform nodes
// t0 + j*(t1-t0)/n_nodes, j = 0..n_nodes. Step-size underflow throws
// StiffnessError naming the dominant gap.
FlowTrajectory integrate_flow(const GapFrame& gf, const TorusState& s0,
                              std::pair<double, double> t_span, double tol = 1e-10,
                              size_t n_cut = FLOW_NCUT_DEFAULT, long long n_nodes = 0);

// End state of the flow after time u (wrapped angles).
TorusState flow_endpoint(const GapFrame& gf, const TorusState& s0, double u,
                         double tol = 1e-10, size_t n_cut = FLOW_NCUT_DEFAULT);

// Trace-formula samples along a trajectory:
//   Q(t) = ground + sum_{n <= n_cut} (E_n^+ + E_n^- - 2*mu_n(t)),
// with n_cut taken from the trajectory.
std::vector<double> trace_reconstruct(const GapFrame& gf, const FlowTrajectory& traj);

// Torus point of a potential from its Dirichlet spectrum: theta_n inverts
// mu_n = E_n^- + gamma_n sin^2(theta_n/2) (solved to Dirichlet tolerance tol),
// and the half-circle is chosen so that the finite-difference motion
// (mu_n of q(.+delta) - mu_n)/delta matches the field sign. delta < 0 selects
// the default 1e-4 * period. A Dirichlet value outside its gap beyond
// 1e-8*(1+|mu|) + 1e-3*gamma throws InconsistentInputError.
TorusState dirichlet_to_torus(const LatticePotential& q, const GapFrame& gf,
                              double delta = -1.0, double tol = 1e-12);

// Forward map torus point -> potential: reconstructs Q on the uniform
// n_samples grid over one period (flow from s with all interactions), then
// recovers the Fourier coefficient of every coset label with |m| <= R and
// compares |d(ell)| against sqrt(2*eps)*exp(-kappa0*|m|^alpha0/2) plus the
// recovery radius. q supplies the lattice, the basis period, and the decay
// budget; n_samples must exceed twice the largest recovered |ell|.
IsospectralMap isospectral_map(const LatticePotential& q, const GapFrame& gf,
                               const TorusState& s, long long n_samples = 512,
                               long long R = 4, double tol = 1e-10);

} // namespace qpa

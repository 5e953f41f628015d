// hill.hpp - Floquet/Hill spectral engine for a real T-periodic potential:
// monodromy matrix, discriminant, band edges, gaps, Dirichlet eigenvalues.

#pragma once

#include <qpa/potential.hpp>

#include <string>
#include <vector>

namespace qpa {

// --------------------------- types ----------------------------------------------

// Values at x = T of the fundamental solutions y1 (y1(0)=1, y1'(0)=0) and
// y2 (y2(0)=0, y2'(0)=1) of -y'' + q y = lambda y.
struct MonodromyData {
    double lambda = 0.0;
    double y1T = 1.0;
    double dy1T = 0.0;
    double y2T = 0.0;
    double dy2T = 1.0;
    double delta() const { return y1T + dy2T; }
    double wronskian() const { return y1T * dy2T - dy1T * y2T; }
};

struct GapRecord {
    long long label = 0;     // hill gap index n, or |ell(m)| for dual provenance
    double E_minus = 0.0;
    double E_plus = 0.0;
    std::string provenance;  // "hill" or "dual"
    double width() const { return E_plus - E_minus; }
};

struct SpectrumData {
    double ground = 0.0;
    std::vector<GapRecord> gaps; // sorted by label
    double period = 0.0;
};

// --------------------------- operations -----------------------------------------

// Monodromy matrix by a sixth-order Magnus integrator on a uniform grid,
// refined by step doubling until successive grids agree within tol (relative
// to the matrix scale). Throws StiffnessError when the ladder is exhausted.
MonodromyData monodromy(const LatticePotential& q, double lambda, double tol = 1e-10);

double discriminant(const LatticePotential& q, double lambda, double tol = 1e-10);

// Number of zeros of y2(., lambda) in (0, T]; equals the number of Dirichlet
// eigenvalues at most lambda (away from the eigenvalues themselves).
int oscillation_count(const LatticePotential& q, double lambda, double tol = 1e-6);

// Dirichlet eigenvalues mu_1 < ... < mu_n_max (roots of y2(T, .)), each
// located by oscillation-count bisection inside the certified bracket
// (pi n / T)^2 -/+ (sum|c| + 1), then sign bisection and a Newton polish.
std::vector<double> dirichlet_eigenvalues(const LatticePotential& q, int n_max,
                                          double tol = 1e-8);
double dirichlet_eigenvalue(const LatticePotential& q, int n, double tol = 1e-8);

// Ground energy and the gap pairs (E_n^-, E_n^+) for n = 1..n_max. A gap is
// reported closed (both edges at mu_n) when its width estimate is below tol.
SpectrumData band_edges(const LatticePotential& q, int n_max, double tol = 1e-8);

// band_edges filtered to open gaps only.
SpectrumData spectrum(const LatticePotential& q, int n_max, double tol = 1e-8);

// Independent route used for cross-validation: eigenvalues of the truncated
// Fourier matrix of the periodic (theta = 0) or antiperiodic (theta = 1/2)
// problem, diagonal (2 pi (j + theta) / T)^2, off-diagonal c(j - i), size 2N+1.
std::vector<double> fourier_edge_eigenvalues(const LatticePotential& q, double theta, int N);

} // namespace qpa

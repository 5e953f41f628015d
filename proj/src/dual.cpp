// dual.cpp - assembly of the truncated dual operator, Bloch branch selection,
// gap edges at the resonance momenta, and the cross-check against the hill
// (monodromy) engine.

#include <qpa/dual.hpp>

#include <qpa/errors.hpp>
#include <qpa/jacobi.hpp>
#include <qpa/util.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace qpa {

namespace {

constexpr double PI = 3.14159265358979323846264338327950288;
constexpr double FOUR_PI_SQ = 4.0 * PI * PI;

// Position of the coset with the given label in a label-sorted coset list.
long long find_label(const std::vector<Coset>& cosets, long long ell) {
    auto it = std::lower_bound(cosets.begin(), cosets.end(), ell,
                               [](const Coset& c, long long v) { return c.ell < v; });
    if (it == cosets.end() || it->ell != ell) return -1;
    return static_cast<long long>(it - cosets.begin());
}

} // namespace

// --------------------------- DualMatrix / BlochBranch ----------------------------

long long DualMatrix::index_of(long long ell) const { return find_label(cosets, ell); }

Cplx BlochBranch::phi_at(long long ell) const {
    const long long i = find_label(cosets, ell);
    if (i < 0) return Cplx(0.0, 0.0);
    return phi[static_cast<size_t>(i)];
}

Cplx BlochBranch::psi(double x) const {
    Cplx acc(0.0, 0.0);
    for (size_t i = 0; i < cosets.size(); ++i) {
        const double f =
            2.0 * PI * (static_cast<double>(cosets[i].ell) / static_cast<double>(T) + k);
        acc += phi[i] * std::polar(1.0, f * x);
    }
    return acc;
}

// --------------------------- dual_matrix -----------------------------------------

DualMatrix dual_matrix(const LatticePotential& q, double k, long long R) {
    if (!(R >= 1)) throw ConfigError("dual_matrix: truncation radius must be at least 1");
    if (!std::isfinite(k)) throw ConfigError("dual_matrix: quasi-momentum must be finite");
    {
        const auto it = q.coeffs.find(0);
        if (it != q.coeffs.end() && std::abs(it->second) > 0.0)
            throw InvalidPotentialError(
                "dual_matrix: constant Fourier mode must be absorbed into the spectral "
                "parameter");
    }

    DualMatrix dm;
    dm.k = k;
    dm.R = R;
    dm.T = q.lat.T;
    dm.epsilon = q.epsilon;
    dm.kappa0 = q.kappa0;
    dm.alpha0 = q.alpha0;
    dm.cosets = coset_ball(q.lat, R);

    const size_t dim = dm.cosets.size();
    if (dim > 4096) throw ConfigError("dual_matrix: truncated dimension exceeds 4096");
    dm.entries.assign(dim * dim, Cplx(0.0, 0.0));
    for (size_t i = 0; i < dim; ++i) {
        const double xi =
            static_cast<double>(dm.cosets[i].ell) / static_cast<double>(dm.T);
        dm.entries[i * dim + i] = Cplx(FOUR_PI_SQ * (xi + k) * (xi + k), 0.0);
        for (size_t j = 0; j < dim; ++j) {
            if (j == i) continue;
            const auto it = q.coeffs.find(dm.cosets[j].ell - dm.cosets[i].ell);
            if (it != q.coeffs.end()) dm.entries[i * dim + j] = it->second;
        }
    }
    return dm;
}

// --------------------------- floquet_branch --------------------------------------

BlochBranch floquet_branch(const DualMatrix& dm) {
    const size_t dim = dm.dim();
    if (dim == 0 || dm.entries.size() != dim * dim)
        throw InconsistentInputError("floquet_branch: matrix and index set sizes differ");

    // Resonance guard: the branch is defined away from every k_m = -xi(m)/2
    // carried by the index set (the zero coset contributes k_0 = 0).
    for (const Coset& m : dm.cosets) {
        const double km =
            -0.5 * static_cast<double>(m.ell) / static_cast<double>(dm.T);
        if (std::abs(dm.k - km) < 1e-6) {
            std::ostringstream os;
            os << "floquet_branch: k = " << fmt_g(dm.k)
               << " is within 1e-6 of the resonance momentum " << fmt_g(km)
               << " of the coset with label " << m.ell;
            throw ConfigError(os.str());
        }
    }

    const long long idx0 = dm.index_of(0);
    if (idx0 < 0)
        throw InconsistentInputError("floquet_branch: index set lacks the zero coset");
    const size_t i0 = static_cast<size_t>(idx0);

    const HermitianEigen eig = hermitian_eigen(dm.entries, dim);

    size_t best = 0, second = 0;
    double sbest = -1.0, ssecond = -1.0;
    for (size_t i = 0; i < dim; ++i) {
        const double s = std::abs(eig.vectors[i][i0]);
        if (s > sbest) {
            ssecond = sbest;
            second = best;
            sbest = s;
            best = i;
        } else if (s > ssecond) {
            ssecond = s;
            second = i;
        }
    }
    if (dim > 1 && sbest - ssecond <= 1e-8) {
        const double e1 = eig.values[best];
        const double e2 = eig.values[second];
        if (std::abs(e1 - e2) <= 1e-8 * (1.0 + std::abs(e1))) {
            best = std::min(best, second); // degenerate pair: take the lower branch
        } else {
            std::ostringstream os;
            os << "floquet_branch: two branches share the selection score at k = "
               << fmt_g(dm.k) << "; E = " << fmt_g(e1) << " and E = " << fmt_g(e2);
            throw AmbiguityError(os.str());
        }
    }

    BlochBranch b;
    b.k = dm.k;
    b.E = eig.values[best];
    b.T = dm.T;
    b.cosets = dm.cosets;
    b.phi.resize(dim);
    const Cplx v0 = eig.vectors[best][i0];
    for (size_t i = 0; i < dim; ++i) b.phi[i] = eig.vectors[best][i] / v0;
    b.phi[i0] = Cplx(1.0, 0.0);

    double rsq = 0.0;
    for (size_t i = 0; i < dim; ++i) {
        Cplx acc = -b.E * b.phi[i];
        for (size_t j = 0; j < dim; ++j) acc += dm.at(i, j) * b.phi[j];
        rsq += std::norm(acc);
    }
    b.residual = std::sqrt(rsq);
    return b;
}

// --------------------------- gap_edges_dual --------------------------------------

namespace {

std::vector<double> dual_eigenvalues(const LatticePotential& q, double k, long long R) {
    const DualMatrix dm = dual_matrix(q, k, R);
    return hermitian_eigen(dm.entries, dm.dim()).values;
}

double closest_value(const std::vector<double>& values, double target) {
    double out = values.front();
    double dist = std::abs(out - target);
    for (const double v : values) {
        const double d = std::abs(v - target);
        if (d < dist) {
            dist = d;
            out = v;
        }
    }
    return out;
}

} // namespace

std::pair<double, double> gap_edges_dual(const LatticePotential& q, long long m_ell,
                                         long long R) {
    if (m_ell == 0)
        throw ConfigError("gap_edges_dual: the zero coset has no resonance momentum");
    const QuotientNormResult qn = quotient_norm(q.lat, m_ell);
    if (qn.norm > R) {
        std::ostringstream os;
        os << "gap_edges_dual: coset with label " << m_ell << " has quotient norm "
           << qn.norm << " outside the truncation radius " << R;
        throw ResolutionError(os.str());
    }

    // Work at the positive representative of the resonance momentum; the
    // spectrum at -k coincides with the spectrum at k.
    const double khat =
        0.5 * static_cast<double>(std::llabs(m_ell)) / static_cast<double>(q.lat.T);
    const double target = FOUR_PI_SQ * khat * khat;

    const std::vector<double> ev = dual_eigenvalues(q, khat, R);
    if (ev.size() < 2)
        throw ResolutionError("gap_edges_dual: truncated problem has fewer than two levels");
    double d1 = std::abs(ev[0] - target), d2 = std::abs(ev[1] - target);
    double e1 = ev[0], e2 = ev[1];
    if (d2 < d1) {
        std::swap(d1, d2);
        std::swap(e1, e2);
    }
    for (size_t i = 2; i < ev.size(); ++i) {
        const double d = std::abs(ev[i] - target);
        if (d < d1) {
            d2 = d1;
            e2 = e1;
            d1 = d;
            e1 = ev[i];
        } else if (d < d2) {
            d2 = d;
            e2 = ev[i];
        }
    }
    const double e_minus = std::min(e1, e2);
    const double e_plus = std::max(e1, e2);

    // One-sided limit check: on each side of khat the tracked eigenvalue obeys
    // E(khat +/- delta) = E_lim + (2 pi)^2 delta^2 +/- (sqrt(B^2 delta^2 + w^2) - w)
    // up to a smooth remainder, with B the diagonal separation rate of the
    // resonant pair and w the half-splitting. Subtracting the model leaves the
    // remainder to a two-point linear Richardson extrapolation.
    const double B = 2.0 * FOUR_PI_SQ * khat;
    const double w = 0.5 * (e_plus - e_minus);
    const double mean = 0.5 * (e_plus + e_minus);
    const double deltas[2] = {1e-4, 1e-5};

    auto one_sided = [&](int side) {
        double g[2];
        for (int t = 0; t < 2; ++t) {
            const double del = deltas[t];
            const double kk = khat + (side > 0 ? del : -del);
            const double hyp = std::sqrt(B * B * del * del + w * w) - w;
            const double predicted = mean + FOUR_PI_SQ * del * del +
                                     (side > 0 ? 1.0 : -1.0) * (hyp + w);
            const double tracked = closest_value(dual_eigenvalues(q, kk, R), predicted);
            g[t] = tracked - FOUR_PI_SQ * del * del - (side > 0 ? 1.0 : -1.0) * hyp;
        }
        return g[1] - (g[0] - g[1]) / 9.0;
    };

    const double lim_plus = one_sided(+1);
    const double lim_minus = one_sided(-1);
    if (std::abs(lim_plus - e_plus) > 1e-6 || std::abs(lim_minus - e_minus) > 1e-6) {
        std::ostringstream os;
        os << "gap_edges_dual: one-sided limits at the resonance momentum "
           << fmt_g(khat) << " disagree with the degenerate eigenvalues (upper "
           << fmt_g(lim_plus) << " vs " << fmt_g(e_plus) << ", lower "
           << fmt_g(lim_minus) << " vs " << fmt_g(e_minus) << ")";
        throw NumericalError(os.str());
    }
    return {e_minus, e_plus};
}

// --------------------------- ground energy / radius ------------------------------

double ground_energy_dual(const LatticePotential& q, long long R) {
    return dual_eigenvalues(q, 0.0, R).front();
}

long long default_radius(const LatticePotential& q, long long coset_norm) {
    if (coset_norm < 0)
        throw ConfigError("default_radius: coset norm must be nonnegative");
    const long long base = coset_norm + 8;
    if (q.lat.nu() != 1 || q.epsilon <= 0.0) return base;
    for (long long R = base; R <= 512; ++R) {
        if (tail_bound(q.kappa0, q.alpha0, 1, static_cast<double>(R)) <= 1e-10) return R;
    }
    throw PrecisionBudgetError(
        "default_radius: envelope tail stays above 1e-10 within feasible truncations", 512);
}

// --------------------------- crosscheck_hill -------------------------------------

CrosscheckReport crosscheck_hill(const LatticePotential& q, int n_max, long long R,
                                 double tol) {
    if (n_max < 1) throw ConfigError("crosscheck_hill: n_max must be at least 1");
    if (R < 1) throw ConfigError("crosscheck_hill: truncation radius must be at least 1");
    if (!(tol > 0.0)) throw ConfigError("crosscheck_hill: tolerance must be positive");

    CrosscheckReport rep;
    rep.tol = tol;

    const double hill_tol = std::min(tol, 1e-8);
    const SpectrumData sp = band_edges(q, n_max, hill_tol);

    std::set<long long> seen;
    for (const Coset& m : coset_ball(q.lat, R)) {
        if (m.ell <= 0 || m.ell > static_cast<long long>(n_max)) continue;
        const auto edges = gap_edges_dual(q, m.ell, default_radius(q, m.norm));
        const bool dual_open = (edges.second - edges.first) >= tol;
        const GapRecord& g = sp.gaps[static_cast<size_t>(m.ell - 1)];
        const bool hill_open = g.width() >= tol;
        seen.insert(m.ell);
        if (!hill_open) {
            if (dual_open) rep.unmatched_dual.push_back(m.ell);
            continue;
        }
        GapMatch gm;
        gm.label = m.ell;
        gm.coset_ell = m.ell;
        gm.coset_norm = m.norm;
        gm.hill_minus = g.E_minus;
        gm.hill_plus = g.E_plus;
        gm.dual_minus = edges.first;
        gm.dual_plus = edges.second;
        gm.discrepancy = std::max(std::abs(gm.hill_minus - gm.dual_minus),
                                  std::abs(gm.hill_plus - gm.dual_plus));
        rep.max_discrepancy = std::max(rep.max_discrepancy, gm.discrepancy);
        rep.matched.push_back(gm);
    }
    for (const GapRecord& g : sp.gaps) {
        if (g.width() >= tol && seen.find(g.label) == seen.end())
            rep.unmatched_hill.push_back(g.label);
    }
    rep.pass = rep.unmatched_hill.empty() && rep.unmatched_dual.empty() &&
               rep.max_discrepancy <= tol;
    return rep;
}

} // namespace qpa

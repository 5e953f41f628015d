// convergence.cpp - windowed band sets with an exact Hausdorff distance, gap
// matching across approximants, the spectral scaling and flow studies, the
// two-sided gap/coefficient check, and the adjacent-gap separation fit.

#include <qpa/convergence.hpp>

#include <qpa/dual.hpp>
#include <qpa/errors.hpp>
#include <qpa/jacobi.hpp>
#include <qpa/util.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace qpa {

namespace {

constexpr double PI = 3.14159265358979323846264338327950288;

// Scale constant of the matching threshold lambda'.
constexpr double C0_MATCH = 1e-3;
// Absolute slack on the forward width bound, at the edge-extraction noise floor.
constexpr double FORWARD_SLACK = 1e-5;
// Truncation padding of the per-coset edge problems: radius = coset norm + pad.
constexpr long long EDGE_R_PAD = 8;
// Truncation radius of the ground-energy problem.
constexpr long long GROUND_R = 6;
// Integration controls of the flow study.
constexpr double STUDY_TOL = 1e-10;
constexpr long long STUDY_NODES = 256;

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

struct EdgeResult {
    double lo = 0.0;
    double hi = 0.0;
    bool certified = true;
};

// Certified gap edges, falling back to the uncertified degenerate pair when
// the one-sided-limit check of the certified route rejects: the two
// eigenvalues of the resonance-momentum problem closest to the free level.
EdgeResult edges_with_fallback(const LatticePotential& q, const Coset& cs) {
    const long long R = cs.norm + EDGE_R_PAD;
    try {
        const std::pair<double, double> e = gap_edges_dual(q, cs.ell, R);
        return {e.first, e.second, true};
    } catch (const NumericalError&) {
        const double km = -0.5 * q.lat.xi(cs.ell);
        const DualMatrix dm = dual_matrix(q, km, R);
        const HermitianEigen eig = hermitian_eigen(dm.entries, dm.dim());
        const double target = std::pow(2.0 * PI * km, 2);
        std::vector<std::pair<double, double>> ranked;
        ranked.reserve(eig.values.size());
        for (double v : eig.values) ranked.emplace_back(std::abs(v - target), v);
        std::partial_sort(ranked.begin(), ranked.begin() + 2, ranked.end());
        const double lo = std::min(ranked[0].second, ranked[1].second);
        const double hi = std::max(ranked[0].second, ranked[1].second);
        return {lo, hi, false};
    }
}

// Euclidean distance between frequency vectors of equal arity.
double l2_dist(const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<double> rational_values(const RationalFrequency& rf) {
    std::vector<double> v(static_cast<size_t>(rf.nu()));
    for (int j = 0; j < rf.nu(); ++j) v[static_cast<size_t>(j)] = rf.value(j);
    return v;
}

// Exact distance from a point to a sorted band list; infinity when empty.
double point_to_set(double x, const std::vector<std::pair<double, double>>& bands) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : bands) {
        if (x < lo) {
            best = std::min(best, lo - x);
            break; // sorted: later bands are farther
        }
        if (x <= hi) return 0.0;
        best = x - hi;
    }
    return best;
}

// sup over x in A of dist(x, B). Within one band of A the distance to B is
// piecewise linear with slopes +-1, so the supremum is attained either at a
// band endpoint of A or at the midpoint of a B-gap that lies inside A.
double directed_hausdorff(const SpectrumWindowed& A, const SpectrumWindowed& B) {
    double sup = 0.0;
    for (const auto& [lo, hi] : A.bands) {
        sup = std::max(sup, point_to_set(lo, B.bands));
        sup = std::max(sup, point_to_set(hi, B.bands));
    }
    for (size_t i = 0; i + 1 < B.bands.size(); ++i) {
        const double mid = 0.5 * (B.bands[i].second + B.bands[i + 1].first);
        if (point_to_set(mid, A.bands) == 0.0)
            sup = std::max(sup, point_to_set(mid, B.bands));
    }
    return sup;
}

} // namespace

// --------------------------- windowed_spectrum -----------------------------------

SpectrumWindowed windowed_spectrum(const SpectrumData& sp, double a, double b) {
    require(std::isfinite(a) && std::isfinite(b) && a < b,
            "windowed_spectrum: window must satisfy a < b");
    SpectrumWindowed w;
    w.a = a;
    w.b = b;
    double cur = std::max(sp.ground, a);
    if (cur > b) return w;

    std::vector<std::pair<double, double>> gaps;
    gaps.reserve(sp.gaps.size());
    for (const GapRecord& g : sp.gaps) gaps.emplace_back(g.E_minus, g.E_plus);
    std::sort(gaps.begin(), gaps.end());

    for (const auto& [glo, ghi] : gaps) {
        if (ghi <= cur) continue;
        if (glo >= b) break;
        if (glo > cur) w.bands.emplace_back(cur, std::min(glo, b));
        cur = std::max(cur, ghi);
        if (cur >= b) break;
    }
    if (cur < b) w.bands.emplace_back(cur, b);
    return w;
}

// --------------------------- hausdorff_distance ----------------------------------

double hausdorff_distance(const SpectrumWindowed& s1, const SpectrumWindowed& s2) {
    const double span = s1.b - s1.a;
    const double tol = 1e-12 * (1.0 + std::abs(span));
    require(std::abs(s1.a - s2.a) <= tol && std::abs(s1.b - s2.b) <= tol,
            "hausdorff_distance: the two sets must share one window");
    if (s1.empty() || s2.empty()) return span;
    return std::max(directed_hausdorff(s1, s2), directed_hausdorff(s2, s1));
}

// --------------------------- approximant_spectrum --------------------------------

SpectrumData approximant_spectrum(const FourierPotential& V, long long r,
                                  long long norm_cap, double width_floor) {
    require(r >= 1, "approximant_spectrum: r must be at least 1");
    require(norm_cap >= 1, "approximant_spectrum: norm_cap must be at least 1");
    require(std::isfinite(width_floor) && width_floor >= 0.0,
            "approximant_spectrum: width_floor must be nonnegative");

    const OmegaLattice lat = build_lattice(rational_approximation(V.freq, r));
    const LatticePotential q = pushforward_periodic(V, lat);

    SpectrumData sp;
    sp.period = static_cast<double>(lat.T);
    sp.ground = ground_energy_dual(q, GROUND_R);
    for (const Coset& cs : coset_ball(lat, norm_cap)) {
        if (cs.ell <= 0) continue;
        const EdgeResult e = edges_with_fallback(q, cs);
        if (e.hi - e.lo < width_floor) continue;
        GapRecord g;
        g.label = cs.ell;
        g.E_minus = e.lo;
        g.E_plus = e.hi;
        g.provenance = e.certified ? "dual" : "dual-uncertified";
        sp.gaps.push_back(g);
    }
    return sp;
}

// --------------------------- spectral_scaling_scan -------------------------------

ScalingScanReport spectral_scaling_scan(const FourierPotential& V,
                                        const std::vector<long long>& r_list,
                                        long long norm_cap) {
    require(r_list.size() >= 2, "spectral_scaling_scan: need at least two budgets");
    for (size_t i = 0; i + 1 < r_list.size(); ++i)
        require(r_list[i] < r_list[i + 1], "spectral_scaling_scan: budgets must increase");
    require(norm_cap >= 1, "spectral_scaling_scan: norm_cap must be at least 1");

    const size_t nr = r_list.size();
    std::vector<SpectrumData> spectra(nr);
    std::vector<std::vector<double>> omega(nr);
    size_t uncertified = 0;
    for (size_t i = 0; i < nr; ++i) {
        spectra[i] = approximant_spectrum(V, r_list[i], norm_cap);
        omega[i] = rational_values(rational_approximation(V.freq, r_list[i]));
        for (const GapRecord& g : spectra[i].gaps)
            if (g.provenance != "dual") ++uncertified;
    }

    ScalingScanReport rep;
    rep.window_lo = spectra[0].ground - 1.0;
    rep.window_hi = spectra[0].ground + 40.0;
    rep.n_uncertified = uncertified;

    const double emax = std::max(std::abs(rep.window_lo), std::abs(rep.window_hi));
    const double shape = 1.0 + std::pow(emax, 0.25);

    std::vector<SpectrumWindowed> wins(nr);
    for (size_t i = 0; i < nr; ++i)
        wins[i] = windowed_spectrum(spectra[i], rep.window_lo, rep.window_hi);

    for (size_t i = 0; i + 1 < nr; ++i) {
        ScalingRow row;
        row.r_lo = r_list[i];
        row.r_hi = r_list[i + 1];
        row.omega_dist_true = l2_dist(V.freq.omega, omega[i + 1]);
        row.omega_dist_pair = l2_dist(omega[i], omega[i + 1]);
        row.distance = hausdorff_distance(wins[i], wins[i + 1]);
        row.C_row = (row.omega_dist_pair > 0.0 && row.distance > 0.0)
                        ? row.distance / (shape * std::sqrt(row.omega_dist_pair))
                        : 0.0;
        rep.rows.push_back(row);
    }

    std::vector<double> lx, ly;
    for (const ScalingRow& row : rep.rows) {
        if (row.omega_dist_pair > 0.0 && row.distance > 0.0) {
            lx.push_back(std::log(row.omega_dist_pair));
            ly.push_back(std::log(row.distance));
        }
    }
    if (lx.size() >= 2) {
        const LineFit f = fit_line(lx, ly);
        rep.slope = f.slope;
        rep.slope_residual = f.residual;
    }

    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0.0;
    size_t cpos = 0;
    for (const ScalingRow& row : rep.rows) {
        rep.C_fit = std::max(rep.C_fit, row.C_row);
        if (row.C_row > 0.0) {
            cmin = std::min(cmin, row.C_row);
            cmax = std::max(cmax, row.C_row);
            ++cpos;
        }
    }
    rep.C_drift = (cpos >= 2 && cmax > 10.0 * cmin);

    bool bound_ok = true;
    for (const ScalingRow& row : rep.rows)
        if (row.distance > rep.C_fit * shape * std::sqrt(row.omega_dist_pair) + 1e-12)
            bound_ok = false;
    rep.pass = (rep.slope <= 0.7) && bound_ok;
    return rep;
}

// ------------------------------ gap_matching -------------------------------------

GapInjectionReport gap_matching(const SpectrumData& sa, const SpectrumData& sb,
                                double tau, double omega_dist, double omega_norm2) {
    require(std::isfinite(tau) && tau > 0.0, "gap_matching: tau must be positive");
    require(std::isfinite(omega_dist) && omega_dist >= 0.0,
            "gap_matching: omega_dist must be nonnegative");
    require(std::isfinite(omega_norm2) && omega_norm2 > 0.0,
            "gap_matching: omega_norm2 must be positive");

    GapInjectionReport rep;
    rep.tau = tau;
    const double lg = std::log(1.0 / tau);
    rep.lambda_prime = C0_MATCH * omega_norm2 * lg * lg * std::sqrt(omega_dist);
    rep.applicable = rep.lambda_prime < 0.25 * tau;
    if (!rep.applicable) return rep;

    bool injective = true;
    std::vector<size_t> used;
    for (const GapRecord& ga : sa.gaps) {
        if (ga.width() < tau) continue;
        const double qw = 0.25 * ga.width();
        const double core_lo = ga.E_minus + qw;
        const double core_hi = ga.E_plus - qw;
        bool found = false;
        for (size_t j = 0; j < sb.gaps.size(); ++j) {
            const GapRecord& gb = sb.gaps[j];
            if (gb.E_minus <= core_lo && core_hi <= gb.E_plus) {
                GapPairMatch p;
                p.label_a = ga.label;
                p.label_b = gb.label;
                p.a_minus = ga.E_minus;
                p.a_plus = ga.E_plus;
                p.b_minus = gb.E_minus;
                p.b_plus = gb.E_plus;
                p.disc_minus = std::abs(ga.E_minus - gb.E_minus);
                p.disc_plus = std::abs(ga.E_plus - gb.E_plus);
                rep.pairs.push_back(p);
                if (std::find(used.begin(), used.end(), j) != used.end()) injective = false;
                used.push_back(j);
                found = true;
                break; // open gaps are disjoint, a core fits at most one
            }
        }
        if (!found) rep.unmatched.push_back(ga.label);
    }
    rep.injective = injective;
    rep.pass = rep.applicable && rep.injective && rep.unmatched.empty();
    return rep;
}

// ---------------------------- gap_fourier_check ----------------------------------

GapFourierReport gap_fourier_check(const FourierPotential& V, const OmegaLattice& lat,
                                   int n_max, long long R) {
    require(n_max >= 1, "gap_fourier_check: n_max must be at least 1");
    require(R >= 1, "gap_fourier_check: R must be at least 1");

    const LatticePotential q = pushforward_periodic(V, lat);

    GapFourierReport rep;
    rep.kappa0p = 4.0 * V.kappa0;
    rep.forward_pass = true;
    rep.inverse_consistent = true;
    for (const Coset& cs : coset_ball(lat, R)) {
        if (cs.ell <= 0 || cs.ell > n_max) continue;
        const EdgeResult e = edges_with_fallback(q, cs);

        GapFourierRow row;
        row.ell = cs.ell;
        row.norm = cs.norm;
        row.E_minus = e.lo;
        row.E_plus = e.hi;
        row.width = e.hi - e.lo;
        row.certified = e.certified;

        const double an = std::pow(static_cast<double>(cs.norm), V.alpha0);
        row.bound_forward = 2.0 * V.epsilon * std::exp(-0.5 * V.kappa0 * an);
        row.forward_ok = row.width <= row.bound_forward + FORWARD_SLACK;

        const auto it = q.coeffs.find(cs.ell);
        row.c_abs = (it == q.coeffs.end()) ? 0.0 : std::abs(it->second);
        row.bound_inverse = std::sqrt(2.0 * V.epsilon) * std::exp(-0.5 * rep.kappa0p * an);
        row.hyp_inverse = row.width <= V.epsilon * std::exp(-rep.kappa0p * an);
        row.inverse_ok = !row.hyp_inverse || (row.c_abs <= row.bound_inverse + 1e-12);

        rep.forward_pass = rep.forward_pass && row.forward_ok;
        rep.inverse_consistent = rep.inverse_consistent && row.inverse_ok;
        rep.rows.push_back(row);
    }
    return rep;
}

// -------------------------- flow_convergence_study -------------------------------

FlowStudyReport flow_convergence_study(const FourierPotential& V,
                                       const std::vector<long long>& r_list, int N,
                                       double t_span, const TorusState& s0,
                                       long long norm_cap) {
    require(r_list.size() >= 2, "flow_convergence_study: need at least two budgets");
    for (size_t i = 0; i + 1 < r_list.size(); ++i)
        require(r_list[i] < r_list[i + 1], "flow_convergence_study: budgets must increase");
    require(N >= 1, "flow_convergence_study: N must be at least 1");
    require(std::isfinite(t_span) && t_span > 0.0,
            "flow_convergence_study: t_span must be positive");
    require(s0.theta.size() >= static_cast<size_t>(N),
            "flow_convergence_study: s0 must carry at least N angles");
    require(norm_cap >= 1, "flow_convergence_study: norm_cap must be at least 1");

    FlowStudyReport rep;
    rep.n_angles = N;
    rep.t_span = t_span;
    rep.matched = true;

    const size_t nr = r_list.size();
    std::vector<SpectrumData> spectra(nr);
    std::vector<std::vector<double>> omega(nr);
    for (size_t i = 0; i < nr; ++i) {
        spectra[i] = approximant_spectrum(V, r_list[i], norm_cap);
        omega[i] = rational_values(rational_approximation(V.freq, r_list[i]));
    }

    TorusState s;
    s.theta.assign(s0.theta.begin(), s0.theta.begin() + N);

    for (size_t i = 0; i + 1 < nr; ++i) {
        const GapFrame fa_full = build_gap_frame(spectra[i], 1e-5);
        if (fa_full.size() < static_cast<size_t>(N)) {
            rep.matched = false;
            break;
        }
        GapFrame fa;
        fa.ground = fa_full.ground;
        fa.period = fa_full.period;
        fa.gaps.assign(fa_full.gaps.begin(), fa_full.gaps.begin() + N);

        // Match each frame gap into the higher-budget spectrum by quarter-width
        // core containment; the partner frame keeps the positional order.
        GapFrame fb;
        fb.ground = spectra[i + 1].ground;
        fb.period = spectra[i + 1].period;
        std::vector<size_t> used;
        bool ok = true;
        for (const GapEntry& ga : fa.gaps) {
            const double qw = 0.25 * ga.gamma;
            const double core_lo = ga.E_minus + qw;
            const double core_hi = ga.E_plus - qw;
            long long hit = -1;
            for (size_t j = 0; j < spectra[i + 1].gaps.size(); ++j) {
                const GapRecord& gb = spectra[i + 1].gaps[j];
                if (gb.E_minus <= core_lo && core_hi <= gb.E_plus) {
                    hit = static_cast<long long>(j);
                    break;
                }
            }
            if (hit < 0 ||
                std::find(used.begin(), used.end(), static_cast<size_t>(hit)) != used.end()) {
                ok = false;
                break;
            }
            used.push_back(static_cast<size_t>(hit));
            const GapRecord& gb = spectra[i + 1].gaps[static_cast<size_t>(hit)];
            GapEntry eb;
            eb.label = gb.label;
            eb.E_minus = gb.E_minus;
            eb.E_plus = gb.E_plus;
            eb.gamma = gb.width();
            eb.xi = std::max(std::sqrt(eb.gamma), eb.gamma);
            fb.gaps.push_back(eb);
        }
        if (!ok) {
            rep.matched = false;
            break;
        }

        double tail = 0.0;
        for (size_t j = static_cast<size_t>(N); j < fa_full.gaps.size(); ++j)
            tail += std::sqrt(fa_full.gaps[j].xi);

        const FlowTrajectory ta = integrate_flow(fa, s, {0.0, t_span}, STUDY_TOL,
                                                 static_cast<size_t>(N), STUDY_NODES);
        const FlowTrajectory tb = integrate_flow(fb, s, {0.0, t_span}, STUDY_TOL,
                                                 static_cast<size_t>(N), STUDY_NODES);

        double dev = 0.0;
        double K = 0.0;
        for (size_t j = 0; j < ta.theta.size(); ++j) {
            double sum = 0.0;
            for (int n = 0; n < N; ++n)
                sum += std::abs(ta.theta[j][static_cast<size_t>(n)] -
                                tb.theta[j][static_cast<size_t>(n)]);
            dev = std::max(dev, sum);
            const std::vector<double> ra = theta_field(fa, ta.state_at(j), static_cast<size_t>(N));
            const std::vector<double> rb = theta_field(fb, tb.state_at(j), static_cast<size_t>(N));
            for (int n = 0; n < N; ++n)
                K = std::max({K, std::abs(ra[static_cast<size_t>(n)]),
                              std::abs(rb[static_cast<size_t>(n)])});
        }

        FlowStudyRow row;
        row.r_lo = r_list[i];
        row.r_hi = r_list[i + 1];
        row.omega_dist_pair = l2_dist(omega[i], omega[i + 1]);
        row.deviation = dev;
        row.K_rate = K;
        row.cap = 2.0 * static_cast<double>(N) * K * t_span;
        row.tail_delta = tail;
        const double floor_den = std::max({std::sqrt(row.omega_dist_pair), tail,
                                           std::numeric_limits<double>::min()});
        row.A_eff = dev / ((1.0 + t_span) * floor_den);
        rep.rows.push_back(row);
    }

    bool monotone = true;
    bool capped = true;
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        if (i + 1 < rep.rows.size() &&
            rep.rows[i + 1].deviation > rep.rows[i].deviation + 1e-12)
            monotone = false;
        if (rep.rows[i].deviation > rep.rows[i].cap + 1e-12) capped = false;
    }
    rep.pass = rep.matched && monotone && capped;
    return rep;
}

// --------------------------- gap_separation_check --------------------------------

GapSeparationReport gap_separation_check(const SpectrumData& sp, const OmegaLattice& lat,
                                         double b0) {
    require(std::isfinite(b0) && b0 > 0.0, "gap_separation_check: b0 must be positive");

    GapSeparationReport rep;
    rep.b_ref = 2.0 * b0;

    std::vector<GapRecord> gaps = sp.gaps;
    std::sort(gaps.begin(), gaps.end(),
              [](const GapRecord& x, const GapRecord& y) { return x.E_minus < y.E_minus; });
    rep.n_pairs = gaps.size() >= 2 ? gaps.size() - 1 : 0;

    bool all_positive = true;
    double amin = std::numeric_limits<double>::infinity();
    std::vector<double> lx, ly;
    for (size_t i = 0; i + 1 < gaps.size(); ++i) {
        const double sep = gaps[i + 1].E_minus - gaps[i].E_plus;
        if (sep <= 0.0) {
            all_positive = false;
            continue;
        }
        const long long nn = quotient_norm(lat, gaps[i + 1].label).norm;
        if (nn >= 1) {
            amin = std::min(amin, sep * std::pow(static_cast<double>(nn), rep.b_ref));
            lx.push_back(std::log(static_cast<double>(nn)));
            ly.push_back(std::log(sep));
        }
    }
    rep.a_fit = std::isfinite(amin) ? amin : 0.0;
    if (lx.size() >= 2 &&
        *std::max_element(lx.begin(), lx.end()) > *std::min_element(lx.begin(), lx.end())) {
        const LineFit f = fit_line(lx, ly);
        rep.b_fit = f.slope;
        rep.residual = f.residual;
    }
    rep.pass = all_positive;
    return rep;
}

} // namespace qpa

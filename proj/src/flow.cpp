// flow.cpp - gap frames on the isospectral torus, theta-coordinates, the
// translation vector field with interaction cutoff, Dormand-Prince 5(4)
// trajectory integration, trace-formula reconstruction, and the forward map
// from a torus point back to a potential.

#include <qpa/flow.hpp>

#include <qpa/errors.hpp>
#include <qpa/frequency.hpp>
#include <qpa/potential.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qpa {

namespace {

constexpr double PI = 3.14159265358979323846264338327950288;
constexpr double TWO_PI = 2.0 * PI;

double wrap_angle(double x) {
    double w = std::fmod(x, TWO_PI);
    if (w < 0.0) w += TWO_PI;
    if (w >= TWO_PI) w -= TWO_PI;
    return w;
}

// mu_n = E_n^- + gamma_n * sin^2(theta_n/2), clamped to the closed gap so
// that confinement survives the final rounding.
double mu_from_theta(const GapEntry& g, double theta) {
    const double s = std::sin(0.5 * theta);
    double mu = g.E_minus + g.gamma * (s * s);
    if (mu > g.E_plus) mu = g.E_plus;
    return mu;
}

std::vector<double> mu_values(const GapFrame& gf, const std::vector<double>& theta) {
    std::vector<double> mu(gf.size());
    for (size_t n = 0; n < gf.size(); ++n) mu[n] = mu_from_theta(gf.gaps[n], theta[n]);
    return mu;
}

size_t resolve_cut(const GapFrame& gf, size_t n_cut, const char* who) {
    if (n_cut == FLOW_NCUT_DEFAULT) {
        size_t k = 0;
        for (const GapEntry& g : gf.gaps)
            if (g.gamma >= 1e-8) ++k;
        return k; // a prefix, since the frame is sorted by decreasing width
    }
    if (n_cut > gf.size()) {
        std::ostringstream os;
        os << who << ": interaction cutoff " << n_cut << " exceeds the frame size "
           << gf.size();
        throw ConfigError(os.str());
    }
    return n_cut;
}

// Rates of every angle; interactions are restricted to the first cut gaps.
std::vector<double> rates_impl(const GapFrame& gf, const std::vector<double>& theta,
                               size_t cut) {
    const size_t N = gf.size();
    const std::vector<double> mu = mu_values(gf, theta);
    std::vector<double> f(N);
    for (size_t n = 0; n < N; ++n) {
        double rad = mu[n] - gf.ground;
        for (size_t i = 0; i < cut; ++i) {
            if (i == n) continue;
            const double dm = mu[i] - mu[n];
            if (dm == 0.0) {
                std::ostringstream os;
                os << "theta_field: Dirichlet values of gaps " << gf.gaps[i].label
                   << " and " << gf.gaps[n].label << " coincide at " << mu[n];
                throw InvalidFrameError(os.str());
            }
            rad *= (gf.gaps[i].E_minus - mu[n]) * (gf.gaps[i].E_plus - mu[n]) / (dm * dm);
        }
        if (!(rad > 0.0)) {
            std::ostringstream os;
            os << "theta_field: nonpositive product " << rad
               << " under the square root at gap " << gf.gaps[n].label
               << " (inconsistent frame data)";
            throw InvalidFrameError(os.str());
        }
        f[n] = 2.0 * std::sqrt(rad);
    }
    return f;
}

[[noreturn]] void throw_stiff(const GapFrame& gf, const std::vector<double>& y,
                              const std::vector<double>& rates, double t,
                              const char* what) {
    size_t dom = 0;
    for (size_t i = 1; i < rates.size(); ++i)
        if (std::abs(rates[i]) > std::abs(rates[dom])) dom = i;
    std::ostringstream os;
    os << "integrate_flow: " << what << " at t = " << t;
    double lam = 0.0;
    if (!rates.empty()) {
        lam = mu_from_theta(gf.gaps[dom], y[dom]);
        os << ", dominated by gap " << gf.gaps[dom].label << " (rate "
           << std::abs(rates[dom]) << ", mu = " << lam << ")";
    }
    throw StiffnessError(os.str(), lam);
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                 A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;

// Adaptive integration of the (possibly reversed) field. The trajectory
// records lifted angles; node times are assigned exactly.
FlowTrajectory integrate_core(const GapFrame& gf, const TorusState& s0,
                              std::pair<double, double> t_span, double tol, size_t cut,
                              long long n_nodes, double direction) {
    const size_t N = gf.size();
    const double t0 = t_span.first;
    const double t1 = t_span.second;
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0))
        throw ConfigError("integrate_flow: need an increasing finite time span");
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw ConfigError("integrate_flow: tolerance must be positive");
    if (n_nodes < 0)
        throw ConfigError("integrate_flow: node count must be nonnegative");

    auto field = [&](const std::vector<double>& yy) {
        std::vector<double> f = rates_impl(gf, yy, cut);
        if (direction < 0.0)
            for (double& v : f) v = -v;
        return f;
    };

    FlowTrajectory traj;
    traj.n_cut = cut;
    std::vector<double> y = s0.theta;
    double t = t0;
    traj.times.push_back(t0);
    traj.theta.push_back(y);

    const double span = t1 - t0;
    const double hmin = 1e-14 * std::max({1.0, std::abs(t0), std::abs(t1)});
    double h = span / 64.0;
    std::vector<double> k1 = field(y);
    std::vector<double> ytmp(N), y5(N);

    long long next_node = 1;
    auto node_target = [&](long long j) {
        if (n_nodes == 0 || j >= n_nodes) return t1;
        return t0 + span * (static_cast<double>(j) / static_cast<double>(n_nodes));
    };

    size_t attempts = 0;
    const size_t max_attempts = 10000000;

    while (t < t1) {
        const double target = node_target(next_node);
        const double rem = target - t;
        if (rem <= 0.0) {
            // degenerate node spacing: re-record the current state
            traj.times.push_back(target);
            traj.theta.push_back(y);
            ++next_node;
            continue;
        }

        bool hit = false;
        double h_try = h;
        if (h_try >= rem) {
            h_try = rem;
            hit = true;
        }
        if (h_try < hmin) throw_stiff(gf, y, k1, t, "step size underflow");
        if (++attempts > max_attempts) throw_stiff(gf, y, k1, t, "step budget exhausted");

        for (size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h_try * (A21 * k1[i]);
        const std::vector<double> k2 = field(ytmp);
        for (size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i]);
        const std::vector<double> k3 = field(ytmp);
        for (size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        const std::vector<double> k4 = field(ytmp);
        for (size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        const std::vector<double> k5 = field(ytmp);
        for (size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] +
                                      A64 * k4[i] + A65 * k5[i]);
        const std::vector<double> k6 = field(ytmp);
        for (size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h_try * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                                    B6 * k6[i]);
        const std::vector<double> k7 = field(y5);

        double errsq = 0.0;
        for (size_t i = 0; i < N; ++i) {
            const double err = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] +
                                        E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            errsq += (err / sc) * (err / sc);
        }
        const double errnorm =
            (N == 0) ? 0.0 : std::sqrt(errsq / static_cast<double>(N));

        double fac = 5.0;
        if (errnorm > 0.0)
            fac = std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);

        if (errnorm <= 1.0) {
            double t_new = hit ? target : t + h_try;
            if (!hit && t_new >= target) {
                t_new = target;
                hit = true;
            }
            t = t_new;
            y = y5;
            k1 = k7; // first-same-as-last
            if (n_nodes == 0 || hit) {
                traj.times.push_back(t);
                traj.theta.push_back(y);
            }
            if (hit) ++next_node;
            // a node clamp must not shrink the next proposal
            h = hit ? std::max(h, h_try * fac) : h_try * fac;
        } else {
            h = h_try * fac;
        }
    }
    return traj;
}

} // namespace

// --------------------------- trajectory access -----------------------------------

TorusState FlowTrajectory::state_at(size_t j) const {
    if (j >= theta.size())
        throw ConfigError("state_at: node index out of range");
    TorusState s;
    s.theta.reserve(theta[j].size());
    for (double v : theta[j]) s.theta.push_back(wrap_angle(v));
    return s;
}

// --------------------------- frames ----------------------------------------------

GapFrame build_gap_frame(const SpectrumData& sp, double gamma_min) {
    if (!(gamma_min > 0.0) || !std::isfinite(gamma_min))
        throw ConfigError("build_gap_frame: gamma_min must be positive");
    GapFrame gf;
    gf.ground = sp.ground;
    gf.period = sp.period;
    for (const GapRecord& rec : sp.gaps) {
        const double w = rec.E_plus - rec.E_minus;
        if (!(w >= gamma_min)) continue;
        GapEntry e;
        e.label = rec.label;
        e.E_minus = rec.E_minus;
        e.E_plus = rec.E_plus;
        e.gamma = w;
        e.xi = std::max(std::sqrt(w), w);
        gf.gaps.push_back(e);
    }
    std::sort(gf.gaps.begin(), gf.gaps.end(), [](const GapEntry& a, const GapEntry& b) {
        if (a.gamma != b.gamma) return a.gamma > b.gamma;
        const long long am = std::llabs(a.label);
        const long long bm = std::llabs(b.label);
        if (am != bm) return am < bm;
        return a.label < b.label;
    });
    for (const GapEntry& e : gf.gaps) {
        if (!(gf.ground < e.E_minus)) {
            std::ostringstream os;
            os << "build_gap_frame: ground energy " << gf.ground
               << " is not strictly below gap " << e.label;
            throw InvalidFrameError(os.str());
        }
    }
    std::vector<std::pair<double, double>> iv;
    iv.reserve(gf.gaps.size());
    for (const GapEntry& e : gf.gaps) iv.emplace_back(e.E_minus, e.E_plus);
    std::sort(iv.begin(), iv.end());
    for (size_t k = 1; k < iv.size(); ++k) {
        if (iv[k].first <= iv[k - 1].second) {
            std::ostringstream os;
            os << "build_gap_frame: gaps overlap near [" << iv[k].first << ", "
               << iv[k - 1].second << "]";
            throw InvalidFrameError(os.str());
        }
    }
    return gf;
}

// --------------------------- torus coordinates -----------------------------------

std::vector<MuSigma> mu_of_theta(const GapFrame& gf, const TorusState& s) {
    if (s.size() != gf.size()) {
        std::ostringstream os;
        os << "mu_of_theta: state carries " << s.size() << " angles for a frame of "
           << gf.size() << " gaps";
        throw ConfigError(os.str());
    }
    std::vector<MuSigma> out(gf.size());
    for (size_t n = 0; n < gf.size(); ++n) {
        const double th = wrap_angle(s.theta[n]);
        out[n].mu = mu_from_theta(gf.gaps[n], th);
        if (th == 0.0 || th == PI)
            out[n].sigma = 0;
        else
            out[n].sigma = (th < PI) ? 1 : -1;
    }
    return out;
}

std::vector<double> theta_field(const GapFrame& gf, const TorusState& s, size_t n_cut) {
    const size_t cut = resolve_cut(gf, n_cut, "theta_field");
    if (s.size() != gf.size())
        throw ConfigError("theta_field: state and frame sizes differ");
    return rates_impl(gf, s.theta, cut);
}

// --------------------------- integration -----------------------------------------

FlowTrajectory integrate_flow(const GapFrame& gf, const TorusState& s0,
                              std::pair<double, double> t_span, double tol,
                              size_t n_cut, long long n_nodes) {
    const size_t cut = resolve_cut(gf, n_cut, "integrate_flow");
    if (s0.size() != gf.size())
        throw ConfigError("integrate_flow: state and frame sizes differ");
    return integrate_core(gf, s0, t_span, tol, cut, n_nodes, 1.0);
}

TorusState flow_endpoint(const GapFrame& gf, const TorusState& s0, double u,
                         double tol, size_t n_cut) {
    const size_t cut = resolve_cut(gf, n_cut, "flow_endpoint");
    if (s0.size() != gf.size())
        throw ConfigError("flow_endpoint: state and frame sizes differ");
    if (!std::isfinite(u))
        throw ConfigError("flow_endpoint: time must be finite");
    if (u == 0.0) {
        TorusState s;
        s.theta.reserve(s0.theta.size());
        for (double v : s0.theta) s.theta.push_back(wrap_angle(v));
        return s;
    }
    const double direction = (u > 0.0) ? 1.0 : -1.0;
    const FlowTrajectory traj =
        integrate_core(gf, s0, {0.0, std::abs(u)}, tol, cut, 1, direction);
    return traj.state_at(traj.times.size() - 1);
}

// --------------------------- trace formula ---------------------------------------

std::vector<double> trace_reconstruct(const GapFrame& gf, const FlowTrajectory& traj) {
    if (traj.n_cut > gf.size())
        throw ConfigError("trace_reconstruct: trajectory cutoff exceeds the frame size");
    std::vector<double> Q;
    Q.reserve(traj.theta.size());
    for (const std::vector<double>& th : traj.theta) {
        if (th.size() != gf.size())
            throw ConfigError("trace_reconstruct: trajectory and frame sizes differ");
        double v = gf.ground;
        for (size_t n = 0; n < traj.n_cut; ++n) {
            const double mu = mu_from_theta(gf.gaps[n], th[n]);
            v += gf.gaps[n].E_plus + gf.gaps[n].E_minus - 2.0 * mu;
        }
        Q.push_back(v);
    }
    return Q;
}

// --------------------------- Dirichlet data --------------------------------------

TorusState dirichlet_to_torus(const LatticePotential& q, const GapFrame& gf,
                              double delta, double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw ConfigError("dirichlet_to_torus: tolerance must be positive");
    if (delta < 0.0) delta = 1e-4 * gf.period;
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw ConfigError("dirichlet_to_torus: shift must be positive");

    TorusState s;
    if (gf.size() == 0) return s;
    const LatticePotential qd = translate(q, delta);

    s.theta.reserve(gf.size());
    for (size_t n = 0; n < gf.size(); ++n) {
        const GapEntry& g = gf.gaps[n];
        const int lab = static_cast<int>(g.label);
        const double mu = dirichlet_eigenvalue(q, lab, tol);
        const double slack = 1e-8 * (1.0 + std::abs(mu)) + 1e-3 * g.gamma;
        if (mu < g.E_minus - slack || mu > g.E_plus + slack) {
            std::ostringstream os;
            os << "dirichlet_to_torus: mu_" << g.label << " = " << mu
               << " lies outside the frame gap [" << g.E_minus << ", " << g.E_plus
               << "]";
            throw InconsistentInputError(os.str());
        }
        double sq = (mu - g.E_minus) / g.gamma;
        sq = std::clamp(sq, 0.0, 1.0);
        double th = 2.0 * std::asin(std::sqrt(sq)); // in [0, pi]
        if (th > 0.0 && th < PI) {
            // half-circle from the finite-difference motion of the translate
            const double mu_shift = dirichlet_eigenvalue(qd, lab, tol);
            if (mu_shift < mu) th = TWO_PI - th;
        }
        s.theta.push_back(th);
    }
    return s;
}

// --------------------------- torus point -> potential ----------------------------

IsospectralMap isospectral_map(const LatticePotential& q, const GapFrame& gf,
                               const TorusState& s, long long n_samples, long long R,
                               double tol) {
    if (s.size() != gf.size())
        throw ConfigError("isospectral_map: state and frame sizes differ");
    if (R < 0)
        throw ConfigError("isospectral_map: coset radius must be nonnegative");
    if (n_samples < 4 || n_samples % 2 != 0)
        throw ConfigError("isospectral_map: need an even sample count of at least 4");
    if (!(gf.period > 0.0))
        throw ConfigError("isospectral_map: frame carries no positive period");

    const std::vector<Coset> ball = coset_ball(q.lat, R);
    long long max_ell = 0;
    for (const Coset& c : ball) max_ell = std::max(max_ell, std::llabs(c.ell));
    if (n_samples <= 2 * max_ell) {
        std::ostringstream os;
        os << "isospectral_map: " << n_samples
           << " samples cannot resolve coset labels up to |ell| = " << max_ell;
        throw ConfigError(os.str());
    }

    const double P = gf.period;
    const FlowTrajectory traj =
        integrate_flow(gf, s, {0.0, P}, tol, gf.size(), n_samples);
    const std::vector<double> Qall = trace_reconstruct(gf, traj);

    IsospectralMap im;
    im.t_grid.assign(traj.times.begin(), traj.times.end() - 1);
    im.Q.assign(Qall.begin(), Qall.end() - 1);

    SampledSignal sig;
    sig.t0 = 0.0;
    sig.dt = P / static_cast<double>(n_samples);
    sig.values = im.Q;

    im.coeffs.reserve(ball.size());
    for (const Coset& c : ball) {
        const RecoveryResult rr = recover_periodic_coefficient(sig, P, c.ell);
        CoefficientReport rep;
        rep.ell = c.ell;
        rep.coset_norm = c.norm;
        rep.d = rr.estimate;
        rep.radius = rr.radius;
        const double decay = std::exp(
            -0.5 * q.kappa0 * std::pow(static_cast<double>(c.norm), q.alpha0));
        rep.bound = std::sqrt(2.0 * q.epsilon) * decay + rr.radius;
        if (std::abs(rep.d) > rep.bound) im.decay_ok = false;
        im.coeffs.push_back(rep);
    }
    return im;
}

} // namespace qpa

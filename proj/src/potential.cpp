// potential.cpp - implementation of quasi-periodic potentials, pushforwards,
// tail certificates, and Fourier coefficient recovery.

#include <qpa/potential.hpp>

#include <qpa/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace qpa {

namespace {

constexpr double TWO_PI = 6.283185307179586476925286766559;

double l1_norm(const std::vector<long long>& n) {
    double s = 0.0;
    for (long long v : n) s += std::abs(static_cast<double>(v));
    return s;
}

void check_decay_metadata(double epsilon, double kappa0, double alpha0) {
    if (!std::isfinite(epsilon) || epsilon < 0.0)
        throw InvalidPotentialError("epsilon must be finite and nonnegative");
    if (!std::isfinite(kappa0) || kappa0 <= 0.0 || kappa0 > 1.0)
        throw InvalidPotentialError("kappa0 must lie in (0, 1]");
    if (!std::isfinite(alpha0) || alpha0 < 0.5 || alpha0 > 1.0)
        throw InvalidPotentialError("alpha0 must lie in [1/2, 1]");
}

// Exact count of lattice points with |n|_1 = s in dimension nu.
double shell_count(int nu, long long s) {
    if (s == 0) return 1.0;
    double total = 0.0;
    double binom_nu_k = 1.0; // C(nu, k), updated incrementally
    double pow2 = 1.0;
    for (int k = 1; k <= nu && k <= s; ++k) {
        binom_nu_k *= static_cast<double>(nu - k + 1) / static_cast<double>(k);
        pow2 *= 2.0;
        // C(s-1, k-1)
        double b = 1.0;
        for (int i = 1; i <= k - 1; ++i)
            b *= static_cast<double>(s - k + i) / static_cast<double>(i);
        total += pow2 * binom_nu_k * b;
    }
    return total;
}

// Exact integral: int_a^inf u^m e^{-c u} du for integer m >= 0, c > 0, a > 0.
double upper_gamma_poly(int m, double c, double a) {
    double fact_ratio = 1.0; // m! / (m - i)!
    double apow = std::pow(a, m);
    double total = 0.0;
    double cinv = 1.0 / c;
    double cpow = cinv;
    for (int i = 0; i <= m; ++i) {
        total += fact_ratio * apow * cpow;
        fact_ratio *= static_cast<double>(m - i);
        apow /= a;
        cpow *= cinv;
    }
    return std::exp(-c * a) * total;
}

// Remainder majorant for the tail past shell S (inclusive of s = S + 1 on).
double tail_remainder(double kappa, double alpha, int nu, long long S) {
    const double sqS = std::sqrt(static_cast<double>(S));
    const double kp = kappa * std::pow(static_cast<double>(S), alpha - 0.5);
    if (sqS < 2.0 * static_cast<double>(nu - 1) / kp)
        return -1.0; // majorant not yet monotone; caller must extend S
    const double prefac = 2.0 * static_cast<double>(nu) * std::pow(3.0, nu - 1);
    double integral = 2.0 * upper_gamma_poly(2 * nu - 1, kp, sqS);
    return prefac * integral * (1.0 + 1e-12);
}

} // namespace

// --------------------------- FourierPotential ------------------------------------

void FourierPotential::validate() const {
    freq.validate();
    check_decay_metadata(epsilon, kappa0, alpha0);
    const size_t nu = freq.nu();
    const double reality_tol = 1e-12 * (1.0 + epsilon);
    for (const auto& [n, c] : coeffs) {
        if (n.size() != nu)
            throw InvalidPotentialError("coefficient index arity does not match nu");
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidPotentialError("coefficient is not finite");
        const double an = l1_norm(n);
        if (an == 0.0) {
            if (std::abs(c) != 0.0)
                throw InvalidPotentialError("mean coefficient c(0) must vanish");
            continue;
        }
        if (std::abs(c) > epsilon * std::exp(-kappa0 * std::pow(an, alpha0)) * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "coefficient at |n| = " << an << " exceeds the declared decay envelope";
            throw InvalidPotentialError(os.str());
        }
        std::vector<long long> m(n.size());
        for (size_t j = 0; j < n.size(); ++j) m[j] = -n[j];
        auto it = coeffs.find(m);
        if (it == coeffs.end() || std::abs(it->second - std::conj(c)) > reality_tol)
            throw InvalidPotentialError("coefficients violate the reality condition");
    }
}

double FourierPotential::norm1() const {
    double s = 0.0;
    for (const auto& [n, c] : coeffs) s += std::abs(c);
    return s;
}

double evaluate(const FourierPotential& V, double x) {
    Cplx acc(0.0, 0.0);
    double scale = 0.0;
    const size_t nu = V.freq.nu();
    for (const auto& [n, c] : V.coeffs) {
        if (n.size() != nu)
            throw InvalidPotentialError("coefficient index arity does not match nu");
        double phase = 0.0;
        for (size_t j = 0; j < nu; ++j)
            phase += static_cast<double>(n[j]) * V.freq.omega[j];
        acc += c * std::polar(1.0, TWO_PI * x * phase);
        scale += std::abs(c);
    }
    if (std::abs(acc.imag()) > 1e-12 * scale)
        throw InvalidPotentialError("evaluation has a nonreal residue; reality condition broken");
    return acc.real();
}

// --------------------------- LatticePotential ------------------------------------

void LatticePotential::validate() const {
    check_decay_metadata(epsilon, kappa0, alpha0);
    if (lat.T < 1 || lat.lcoef.size() != static_cast<size_t>(lat.nu()))
        throw InvalidPotentialError("lattice data is incomplete");
    const double reality_tol = 1e-12 * (1.0 + epsilon);
    const int nu = static_cast<int>(lat.nu());
    const double C = tail_bound(kappa0 / 2.0, alpha0, nu, 0.0);
    for (const auto& [ell, c] : coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidPotentialError("coefficient is not finite");
        long long norm = 0;
        try {
            norm = quotient_norm(lat, ell).norm;
        } catch (const NotFoundError&) {
            std::ostringstream os;
            os << "label " << ell << " lies outside the coset label lattice";
            throw InvalidPotentialError(os.str());
        }
        const double env =
            epsilon * C * std::exp(-kappa0 * std::pow(static_cast<double>(norm), alpha0) / 2.0);
        if (std::abs(c) > env * (1.0 + 1e-12) + 1e-300) {
            std::ostringstream os;
            os << "coefficient at label " << ell << " exceeds the coset decay envelope";
            throw InvalidPotentialError(os.str());
        }
        auto it = coeffs.find(-ell);
        if (it == coeffs.end() || std::abs(it->second - std::conj(c)) > reality_tol)
            throw InvalidPotentialError("coefficients violate the reality condition");
    }
}

double LatticePotential::evaluate(double x) const {
    Cplx acc(0.0, 0.0);
    double scale = 0.0;
    const double Tinv = 1.0 / static_cast<double>(lat.T);
    for (const auto& [ell, c] : coeffs) {
        acc += c * std::polar(1.0, TWO_PI * x * static_cast<double>(ell) * Tinv);
        scale += std::abs(c);
    }
    if (std::abs(acc.imag()) > 1e-12 * scale)
        throw InvalidPotentialError("evaluation has a nonreal residue; reality condition broken");
    return acc.real();
}

double LatticePotential::norm1() const {
    double s = 0.0;
    for (const auto& [ell, c] : coeffs) s += std::abs(c);
    return s;
}

// --------------------------- pushforward -----------------------------------------

LatticePotential pushforward_periodic(const FourierPotential& V, const OmegaLattice& lat) {
    V.validate();
    if (V.freq.nu() != lat.nu())
        throw FrequencyMismatchError("potential arity does not match the lattice arity");
    LatticePotential out;
    out.lat = lat;
    out.epsilon = V.epsilon;
    out.kappa0 = V.kappa0;
    out.alpha0 = V.alpha0;
    for (const auto& [n, c] : V.coeffs) out.coeffs[lat.ell(n)] += c;
    out.validate();
    return out;
}

// --------------------------- distance --------------------------------------------

double distance_rho(const FourierPotential& V0, const FourierPotential& V1) {
    V0.validate();
    V1.validate();
    const Frequency& a = V0.freq;
    const Frequency& b = V1.freq;
    bool same = a.omega.size() == b.omega.size() && a.a0 == b.a0 && a.b0 == b.b0 &&
                a.c == b.c && a.beta == b.beta;
    if (same)
        for (size_t j = 0; j < a.omega.size(); ++j) same = same && a.omega[j] == b.omega[j];
    if (!same)
        throw FrequencyMismatchError("potentials live over different frequencies");
    double total = 0.0;
    auto i0 = V0.coeffs.begin();
    auto i1 = V1.coeffs.begin();
    while (i0 != V0.coeffs.end() || i1 != V1.coeffs.end()) {
        if (i1 == V1.coeffs.end() || (i0 != V0.coeffs.end() && i0->first < i1->first)) {
            total += std::abs(i0->second);
            ++i0;
        } else if (i0 == V0.coeffs.end() || i1->first < i0->first) {
            total += std::abs(i1->second);
            ++i1;
        } else {
            total += std::abs(i0->second - i1->second);
            ++i0;
            ++i1;
        }
    }
    return total;
}

// --------------------------- tail bound ------------------------------------------

double tail_bound(double kappa0, double alpha0, int nu, double R) {
    if (!std::isfinite(kappa0) || kappa0 < 1e-6 || kappa0 > 64.0)
        throw ConfigError("tail_bound: kappa0 out of range");
    if (!std::isfinite(alpha0) || alpha0 < 0.5 || alpha0 > 1.0)
        throw ConfigError("tail_bound: alpha0 must lie in [1/2, 1]");
    if (nu < 1 || nu > 8)
        throw ConfigError("tail_bound: nu out of supported range");
    if (!std::isfinite(R) || R < 0.0)
        throw ConfigError("tail_bound: R must be finite and nonnegative");

    const long long Rz = static_cast<long long>(std::ceil(R - 1e-12));
    const double slack = 1.0 + 1e-12;

    double partial = 0.0;
    long long S = std::max<long long>(Rz, 1);
    for (long long s = Rz; s <= S; ++s)
        partial += shell_count(nu, s) *
                   std::exp(-kappa0 * std::pow(static_cast<double>(s), alpha0)) * slack;

    double rem = tail_remainder(kappa0, alpha0, nu, S);
    const long long cap = Rz + 200000;
    while (S < cap && (rem < 0.0 || rem > 1e-16 * partial + 1e-300)) {
        for (int step = 0; step < 16 && S < cap; ++step) {
            ++S;
            partial += shell_count(nu, S) *
                       std::exp(-kappa0 * std::pow(static_cast<double>(S), alpha0)) * slack;
        }
        rem = tail_remainder(kappa0, alpha0, nu, S);
    }
    if (rem < 0.0)
        throw NumericalError("tail_bound: remainder majorant failed to stabilize");
    return partial + rem;
}

double coset_envelope(double epsilon, double kappa0, double alpha0, int nu, long long coset_norm) {
    const double C = tail_bound(kappa0 / 2.0, alpha0, nu, 0.0);
    return epsilon * C *
           std::exp(-kappa0 * std::pow(static_cast<double>(coset_norm), alpha0) / 2.0);
}

// --------------------------- recovery --------------------------------------------

namespace {

Cplx trapezoid_phase_average(const SampledSignal& s, double freq_per_t, size_t stride) {
    const size_t N = s.values.size();
    const size_t last = N - 1;
    Cplx acc(0.0, 0.0);
    for (size_t j = 0; j <= last; j += stride) {
        const double t = s.t0 + s.dt * static_cast<double>(j);
        const double w = (j == 0 || j == last) ? 0.5 : 1.0;
        acc += w * s.values[j] * std::polar(1.0, -TWO_PI * t * freq_per_t);
    }
    const double span = s.dt * static_cast<double>(last);
    return acc * (static_cast<double>(stride) * s.dt / span);
}

} // namespace

RecoveryResult fourier_recover(const SampledSignal& s, const Frequency& f,
                               const std::vector<long long>& n, double beta0, double kappa0,
                               double amp, double delta) {
    f.validate();
    const size_t nu = f.nu();
    if (n.size() != nu)
        throw ConfigError("fourier_recover: label arity does not match nu");
    if (!(s.dt > 0.0) || !std::isfinite(s.dt))
        throw ConfigError("fourier_recover: sample step must be positive");
    const size_t N = s.values.size();
    if (N < 3 || N % 2 == 0)
        throw ConfigError("fourier_recover: need an odd sample count of at least 3");
    if (!std::isfinite(kappa0) || kappa0 < 2e-6 || kappa0 > 1.0)
        throw ConfigError("fourier_recover: kappa0 out of range");
    if (!std::isfinite(delta) || delta < 0.0)
        throw ConfigError("fourier_recover: delta must be nonnegative");

    const double T = s.t_span();
    if (beta0 < 0.0) beta0 = 1.0 / (2.0 * f.b0);
    if (!(beta0 > 0.0) || beta0 >= 1.0)
        throw ConfigError("fourier_recover: beta0 must lie in (0, 1)");

    const double band = std::pow(T, beta0);
    if (l1_norm(n) > band) {
        std::ostringstream os;
        os << "label norm " << l1_norm(n) << " exceeds the band limit " << band
           << " for span " << T;
        throw OutOfBandError(os.str());
    }

    double nomega = 0.0;
    for (size_t j = 0; j < nu; ++j) nomega += static_cast<double>(n[j]) * f.omega[j];
    double dtmax = 0.01;
    if (std::abs(nomega) > 1e-300)
        dtmax = std::min(dtmax, 1.0 / (20.0 * std::abs(nomega)));
    if (s.dt > dtmax * (1.0 + 1e-12))
        throw ConfigError("fourier_recover: sampling step too coarse for this label");

    double maxq = 0.0;
    for (double v : s.values) {
        if (!std::isfinite(v)) throw ConfigError("fourier_recover: sample is not finite");
        maxq = std::max(maxq, std::abs(v));
    }
    if (amp < 0.0) amp = std::exp(kappa0) * maxq;

    const Cplx I = trapezoid_phase_average(s, nomega, 1);
    const Cplx Ih = trapezoid_phase_average(s, nomega, 2);
    const double quad = std::abs(I - Ih) / 3.0 + 1e-15 * (1.0 + maxq);

    const int inu = static_cast<int>(nu);
    const double Sfull = tail_bound(kappa0, 1.0, inu, 0.0);
    const double Rcut = std::floor(band) + 1.0;
    const double Ctail = tail_bound(kappa0, 1.0, inu, Rcut);
    const double mixing = std::pow(2.0, f.b0) / (M_PI * f.a0) * amp * Sfull / std::sqrt(T);

    RecoveryResult out;
    out.estimate = I;
    out.radius = delta + quad + mixing + amp * Ctail;
    return out;
}

RecoveryResult recover_periodic_coefficient(const SampledSignal& s, double P, long long ell) {
    if (!(P > 0.0) || !std::isfinite(P))
        throw ConfigError("periodic recovery: period must be positive");
    if (!(s.dt > 0.0) || !std::isfinite(s.dt))
        throw ConfigError("periodic recovery: sample step must be positive");
    const size_t N = s.values.size();
    if (N < 4 || N % 2 != 0)
        throw ConfigError("periodic recovery: need an even sample count of at least 4");
    const double kf = static_cast<double>(N) * s.dt / P;
    const double k = std::round(kf);
    if (k < 1.0 || std::abs(kf - k) > 1e-9 * kf)
        throw ConfigError("periodic recovery: samples must cover a whole number of periods");

    double maxq = 0.0;
    for (double v : s.values) {
        if (!std::isfinite(v)) throw ConfigError("periodic recovery: sample is not finite");
        maxq = std::max(maxq, std::abs(v));
    }

    const double freq_per_t = static_cast<double>(ell) / P;
    auto average = [&](size_t stride) {
        Cplx acc(0.0, 0.0);
        for (size_t j = 0; j < N; j += stride) {
            const double t = s.t0 + s.dt * static_cast<double>(j);
            acc += s.values[j] * std::polar(1.0, -TWO_PI * t * freq_per_t);
        }
        return acc * (static_cast<double>(stride) / static_cast<double>(N));
    };

    RecoveryResult out;
    out.estimate = average(1);
    out.radius = std::abs(out.estimate - average(2)) + 1e-13 * (1.0 + maxq);
    return out;
}

FourierPotential translate(const FourierPotential& V, double t) {
    if (!std::isfinite(t)) throw ConfigError("translate: shift must be finite");
    V.validate();
    FourierPotential out = V;
    const size_t nu = V.freq.nu();
    for (auto& [n, c] : out.coeffs) {
        double phase = 0.0;
        for (size_t j = 0; j < nu; ++j)
            phase += static_cast<double>(n[j]) * V.freq.omega[j];
        c *= std::polar(1.0, TWO_PI * t * phase);
    }
    out.validate();
    return out;
}

LatticePotential translate(const LatticePotential& q, double t) {
    if (!std::isfinite(t)) throw ConfigError("translate: shift must be finite");
    q.validate();
    LatticePotential out = q;
    const double Tinv = 1.0 / q.period();
    for (auto& [ell, c] : out.coeffs)
        c *= std::polar(1.0, TWO_PI * t * static_cast<double>(ell) * Tinv);
    out.validate();
    return out;
}

} // namespace qpa

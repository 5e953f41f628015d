// util.hpp - small shared numerics and plumbing helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace qpa {

// --------------------------- hashing ------------------------------------------

// FNV-1a 64-bit, used to stamp config hashes into artifacts.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// --------------------------- least squares ------------------------------------

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS residual of y about the fitted line
};

// Ordinary least squares y ~ slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0) return f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

// --------------------------- parallel map -------------------------------------

// Runs fn(i) for i in [0, n). Deterministic: iteration i never depends on the
// thread that executes it. threads <= 1 degenerates to a plain loop.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned k = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (unsigned t = 0; t < k; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += k) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// --------------------------- formatting ---------------------------------------

// Fixed-precision scientific formatting; locale-independent, reproducible.
inline std::string fmt_g(double v, int digits = 12) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(digits);
    os << v;
    return os.str();
}

// --------------------------- scalar searches ----------------------------------

// Bisection for a sign change of f on [a,b]; requires f(a)*f(b) <= 0.
// Refines to absolute width tol and returns the midpoint.
inline double bisect_root(const std::function<double(double)>& f, double a, double b,
                          double fa, double fb, double tol) {
    if (fa == 0) return a;
    if (fb == 0) return b;
    for (int it = 0; it < 300 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0) return m;
        if ((fa < 0) != (fm < 0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    (void)fb;
    return 0.5 * (a + b);
}

// Golden-section maximization of f on [a,b]; returns (argmax, max).
inline std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                            double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

} // namespace qpa

// jacobi.cpp - cyclic-by-rows complex Jacobi diagonalization.

#include <qpa/jacobi.hpp>

#include <qpa/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpa {

namespace {

using Cplx = std::complex<double>;

double off_norm_sq(const std::vector<Cplx>& A, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) s += std::norm(A[i * n + j]);
    return s;
}

} // namespace

HermitianEigen hermitian_eigen(std::vector<Cplx> A, size_t n) {
    if (n == 0 || A.size() != n * n)
        throw InconsistentInputError("hermitian_eigen: matrix size mismatch");

    double scale = 0.0;
    for (const Cplx& v : A) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InconsistentInputError("hermitian_eigen: entry is not finite");
        scale = std::max(scale, std::abs(v));
    }
    const double htol = 1e-12 * (1.0 + scale);
    for (size_t i = 0; i < n; ++i) {
        if (std::abs(A[i * n + i].imag()) > htol)
            throw InconsistentInputError("hermitian_eigen: diagonal is not real");
        A[i * n + i] = Cplx(A[i * n + i].real(), 0.0);
        for (size_t j = i + 1; j < n; ++j) {
            if (std::abs(A[i * n + j] - std::conj(A[j * n + i])) > htol)
                throw InconsistentInputError("hermitian_eigen: matrix is not Hermitian");
            A[j * n + i] = std::conj(A[i * n + j]);
        }
    }

    double fro = 0.0;
    for (const Cplx& v : A) fro += std::norm(v);
    fro = std::sqrt(fro);
    const double stop_sq = (1e-15 * (1.0 + fro)) * (1e-15 * (1.0 + fro));

    std::vector<Cplx> V(n * n, Cplx(0.0, 0.0));
    for (size_t i = 0; i < n; ++i) V[i * n + i] = Cplx(1.0, 0.0);

    // Rotations whose pivot is already below the per-entry share of the stop
    // threshold are skipped: the final off-diagonal norm stays below stop_sq
    // even if every remaining pivot is at the skip level (threshold Jacobi).
    const double skip_sq = stop_sq / static_cast<double>(n > 1 ? n * (n - 1) : 1);

    const int max_sweeps = 80;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_norm_sq(A, n) <= stop_sq) break;
        for (size_t p = 0; p + 1 < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                const Cplx g = A[p * n + q];
                const double absg = std::abs(g);
                if (std::norm(g) <= skip_sq) continue;
                const Cplx phi = g / absg;
                const Cplx cphi = std::conj(phi);
                const double alpha = A[p * n + p].real();
                const double beta = A[q * n + q].real();
                const double tau = (beta - alpha) / (2.0 * absg);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (size_t k = 0; k < n; ++k) {
                    const Cplx akp = A[k * n + p];
                    const Cplx akq = A[k * n + q];
                    A[k * n + p] = c * akp - s * cphi * akq;
                    A[k * n + q] = s * akp + c * cphi * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const Cplx apk = A[p * n + k];
                    const Cplx aqk = A[q * n + k];
                    A[p * n + k] = c * apk - s * phi * aqk;
                    A[q * n + k] = s * apk + c * phi * aqk;
                }
                A[p * n + q] = Cplx(0.0, 0.0);
                A[q * n + p] = Cplx(0.0, 0.0);
                A[p * n + p] = Cplx(A[p * n + p].real(), 0.0);
                A[q * n + q] = Cplx(A[q * n + q].real(), 0.0);

                for (size_t k = 0; k < n; ++k) {
                    const Cplx vkp = V[k * n + p];
                    const Cplx vkq = V[k * n + q];
                    V[k * n + p] = c * vkp - s * cphi * vkq;
                    V[k * n + q] = s * vkp + c * cphi * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps)
        throw NumericalError("hermitian_eigen: Jacobi sweeps failed to converge");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double da = A[a * n + a].real();
        const double db = A[b * n + b].real();
        if (da != db) return da < db;
        return a < b;
    });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<Cplx>(n));
    for (size_t i = 0; i < n; ++i) {
        const size_t col = order[i];
        out.values[i] = A[col * n + col].real();
        std::vector<Cplx>& v = out.vectors[i];
        double nrm = 0.0;
        for (size_t k = 0; k < n; ++k) {
            v[k] = V[k * n + col];
            nrm += std::norm(v[k]);
        }
        nrm = std::sqrt(nrm);
        size_t kmax = 0;
        double best = -1.0;
        for (size_t k = 0; k < n; ++k) {
            const double a = std::abs(v[k]);
            if (a > best) {
                best = a;
                kmax = k;
            }
        }
        const Cplx ph = (best > 0.0) ? std::conj(v[kmax]) / best : Cplx(1.0, 0.0);
        for (size_t k = 0; k < n; ++k) v[k] *= ph / nrm;
    }
    return out;
}

} // namespace qpa

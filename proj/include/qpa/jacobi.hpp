// jacobi.hpp - deterministic cyclic Jacobi eigensolver for complex Hermitian
// matrices. Dense, in-repo, bit-reproducible; sized for the truncated dual
// operators of this toolkit (dimension up to a few hundred).

#pragma once

#include <complex>
#include <vector>

namespace qpa {

struct HermitianEigen {
    std::vector<double> values;                        // ascending
    std::vector<std::vector<std::complex<double>>> vectors; // vectors[i] pairs values[i]
};

// A is row-major n*n and must be Hermitian to 1e-12 relative tolerance.
// Eigenvalues are returned ascending; each eigenvector is normalized with its
// largest-magnitude component made real positive (deterministic phase).
HermitianEigen hermitian_eigen(std::vector<std::complex<double>> A, size_t n);

} // namespace qpa

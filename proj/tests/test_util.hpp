#pragma once

#include <random>

#include "curvlab/hermitian_core.hpp"

namespace testutil {

using curvlab::ComplexMatrix;
using curvlab::ComplexVector;
using curvlab::cplx;

inline ComplexMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline ComplexVector random_vector(std::mt19937_64& rng, int n) {
    return random_matrix(rng, n, 1).col(0);
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int n) {
    const ComplexMatrix g = random_matrix(rng, n, n);
    return 0.5 * (g + g.adjoint());
}

inline ComplexMatrix random_pd(std::mt19937_64& rng, int n, double shift = 0.5) {
    const ComplexMatrix g = random_matrix(rng, n, n);
    return g * g.adjoint() / double(n) + shift * ComplexMatrix::Identity(n, n);
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, int n) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n, n));
    return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace testutil

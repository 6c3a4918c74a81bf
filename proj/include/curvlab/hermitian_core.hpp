#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace curvlab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kRankTol = 1e-9;

// max(1, ||M||_F): the scale all relative tolerances refer to.
double scale_of(const ComplexMatrix& m);

// Throws InputError if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

// ||M - M^†||_F / max(1, ||M||_F).
double hermitian_residual(const ComplexMatrix& m);

class HermitianMatrix {
public:
    HermitianMatrix() = default;
    // Stores (M + M^†)/2. Throws InputError for non-square or non-finite input.
    explicit HermitianMatrix(const ComplexMatrix& m);

    static HermitianMatrix identity(int dim);
    static HermitianMatrix zero(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const ComplexMatrix& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }
    double scale() const { return scale_of(m_); }

private:
    ComplexMatrix m_;
};

struct EighResult {
    RealVector values;     // ascending
    ComplexMatrix vectors; // columns are eigenvectors
};

// Cyclic complex Jacobi eigensolver.
EighResult eigh(const HermitianMatrix& h);
double min_eigenvalue(const HermitianMatrix& h);

// One-sided Jacobi. Returns singular values in descending order.
RealVector singular_values(const ComplexMatrix& m);

// T = sum coeffs(i, mu) d_i (x) e_mu.
struct TensorPoint {
    ComplexMatrix coeffs;  // n x r

    TensorPoint() = default;
    explicit TensorPoint(ComplexMatrix c);
    static TensorPoint decomposable(const ComplexVector& xi, const ComplexVector& v);

    int n() const { return static_cast<int>(coeffs.rows()); }
    int r() const { return static_cast<int>(coeffs.cols()); }
    int rank(double tol = kRankTol) const;
    double norm() const { return coeffs.norm(); }
    // Row-major flattening, index i*r + mu.
    ComplexVector flat() const;
    static TensorPoint from_flat(const ComplexVector& v, int n, int r);
};

// sum_{p,q} T1_p Q_pq conj(T2_q) with p = i*r + mu.
cplx biform_apply(const HermitianMatrix& q, const TensorPoint& t1, const TensorPoint& t2);

// Kronecker product A (x) B.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace curvlab

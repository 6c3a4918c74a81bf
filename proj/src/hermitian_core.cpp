#include "curvlab/hermitian_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

double scale_of(const ComplexMatrix& m) { return std::max(1.0, m.norm()); }

void require_finite(const ComplexMatrix& m, const char* what) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                throw InputError(std::string(what) + ": non-finite entry");
}

double hermitian_residual(const ComplexMatrix& m) {
    return (m - m.adjoint()).norm() / scale_of(m);
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw InputError("HermitianMatrix: matrix is not square");
    require_finite(m, "HermitianMatrix");
    m_ = 0.5 * (m + m.adjoint());
    for (Eigen::Index i = 0; i < m_.rows(); ++i) m_(i, i) = m_(i, i).real();
}

HermitianMatrix HermitianMatrix::identity(int dim) {
    return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::zero(int dim) {
    return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

namespace {

// 2x2 unitary U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] that diagonalizes
// [[a, b e^{i phi}], [b e^{-i phi}, g]] via U^† A U (b > 0).
struct Rotation {
    cplx u00, u01, u10, u11;
};

Rotation jacobi_rotation(double a, double g, cplx apq) {
    const double b = std::abs(apq);
    const cplx ph = std::conj(apq) / b;  // e^{-i phi}
    const double theta = (g - a) / (2.0 * b);
    const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    return {c, s, -s * ph, c * ph};
}

}  // namespace

EighResult eigh(const HermitianMatrix& h) {
    const int n = h.dim();
    ComplexMatrix a = h.matrix();
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    const double fro = a.norm();

    auto off = [&] {
        double s = 0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && fro > 0; ++sweep) {
        if (off() <= 1e-15 * fro) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const Rotation u = jacobi_rotation(a(p, p).real(), a(q, q).real(), apq);
                for (int k = 0; k < n; ++k) {
                    const cplx kp = a(k, p), kq = a(k, q);
                    a(k, p) = kp * u.u00 + kq * u.u10;
                    a(k, q) = kp * u.u01 + kq * u.u11;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx pk = a(p, k), qk = a(q, k);
                    a(p, k) = std::conj(u.u00) * pk + std::conj(u.u10) * qk;
                    a(q, k) = std::conj(u.u01) * pk + std::conj(u.u11) * qk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (int k = 0; k < n; ++k) {
                    const cplx kp = v(k, p), kq = v(k, q);
                    v(k, p) = kp * u.u00 + kq * u.u10;
                    v(k, q) = kp * u.u01 + kq * u.u11;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a(x, x).real() < a(y, y).real(); });
    EighResult out{RealVector(n), ComplexMatrix(n, n)};
    for (int j = 0; j < n; ++j) {
        out.values(j) = a(order[j], order[j]).real();
        out.vectors.col(j) = v.col(order[j]);
    }
    return out;
}

double min_eigenvalue(const HermitianMatrix& h) {
    if (h.dim() == 0) throw InputError("min_eigenvalue: empty matrix");
    return eigh(h).values(0);
}

RealVector singular_values(const ComplexMatrix& m_in) {
    require_finite(m_in, "singular_values");
    ComplexMatrix m = m_in.rows() < m_in.cols() ? ComplexMatrix(m_in.adjoint()) : m_in;
    const int cols = static_cast<int>(m.cols());
    const double eps = 1e-15;

    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < cols - 1; ++p) {
            for (int q = p + 1; q < cols; ++q) {
                const double alpha = m.col(p).squaredNorm();
                const double beta = m.col(q).squaredNorm();
                const cplx gamma = m.col(p).dot(m.col(q));  // a_p^† a_q
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || std::abs(gamma) == 0.0)
                    continue;
                rotated = true;
                const Rotation u = jacobi_rotation(alpha, beta, gamma);
                const ComplexVector ap = m.col(p), aq = m.col(q);
                m.col(p) = ap * u.u00 + aq * u.u10;
                m.col(q) = ap * u.u01 + aq * u.u11;
            }
        }
        if (!rotated) break;
    }

    RealVector s(cols);
    for (int j = 0; j < cols; ++j) s(j) = m.col(j).norm();
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

TensorPoint::TensorPoint(ComplexMatrix c) : coeffs(std::move(c)) {
    require_finite(coeffs, "TensorPoint");
}

TensorPoint TensorPoint::decomposable(const ComplexVector& xi, const ComplexVector& v) {
    return TensorPoint(xi * v.transpose());
}

int TensorPoint::rank(double tol) const {
    if (coeffs.size() == 0) return 0;
    const RealVector s = singular_values(coeffs);
    if (s(0) == 0.0) return 0;
    int k = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++k;
    return k;
}

ComplexVector TensorPoint::flat() const {
    ComplexVector out(coeffs.size());
    for (int i = 0; i < n(); ++i)
        for (int mu = 0; mu < r(); ++mu) out(i * r() + mu) = coeffs(i, mu);
    return out;
}

TensorPoint TensorPoint::from_flat(const ComplexVector& v, int n, int r) {
    if (v.size() != static_cast<Eigen::Index>(n) * r)
        throw InputError("TensorPoint::from_flat: size mismatch");
    ComplexMatrix c(n, r);
    for (int i = 0; i < n; ++i)
        for (int mu = 0; mu < r; ++mu) c(i, mu) = v(i * r + mu);
    return TensorPoint(std::move(c));
}

cplx biform_apply(const HermitianMatrix& q, const TensorPoint& t1, const TensorPoint& t2) {
    if (t1.n() != t2.n() || t1.r() != t2.r())
        throw InputError("biform_apply: tensors have different shapes");
    if (q.dim() != t1.n() * t1.r()) throw InputError("biform_apply: dimension mismatch");
    const ComplexVector x = t1.flat();
    const ComplexVector y = t2.flat();
    return (x.transpose() * q.matrix() * y.conjugate())(0, 0);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace curvlab

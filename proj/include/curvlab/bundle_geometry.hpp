#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "curvlab/hermitian_core.hpp"

namespace curvlab {

// Value and first/mixed second Wirtinger derivatives of a matrix-valued
// function at a point: d[i] = d_i f, dd[i*n + j] = d_i dbar_j f.
struct Jet {
    ComplexMatrix f;
    std::vector<ComplexMatrix> d;
    std::vector<ComplexMatrix> dd;
};

using MatrixFn = std::function<ComplexMatrix(const ComplexVector&)>;
using ScalarFn = std::function<double(const ComplexVector&)>;

inline constexpr double kDefaultStep = 1e-4;
inline constexpr double kUnboundedChart = std::numeric_limits<double>::infinity();

// Central differences in the 2n real coordinates with one Richardson level
// (steps eta and eta/2). Throws InputError if a stencil point leaves the ball
// of radius chart_radius.
Jet fd_jet(const MatrixFn& f, const ComplexVector& z, double step = kDefaultStep,
           double chart_radius = kUnboundedChart);

// d_i dbar_j of a real scalar function, as an n x n Hermitian matrix.
HermitianMatrix complex_hessian(const ScalarFn& f, const ComplexVector& z,
                                double step = kDefaultStep,
                                double chart_radius = kUnboundedChart);

struct LineWeight {
    struct Derivs {
        double phi;
        ComplexVector d;    // d_i phi
        ComplexMatrix dd;   // d_i dbar_j phi
    };

    int n = 0;
    ScalarFn phi;
    std::function<Derivs(const ComplexVector&)> closed_form;  // optional

    Derivs derivs(const ComplexVector& z, double step = kDefaultStep) const;
    HermitianMatrix curvature(const ComplexVector& z) const { return HermitianMatrix(derivs(z).dd); }
};

class MetricField {
public:
    MetricField(int n, int r, MatrixFn evaluator, double fd_step = kDefaultStep,
                double chart_radius = kUnboundedChart);

    MetricField with_closed_form(std::function<Jet(const ComplexVector&)> jet) const;

    int n() const { return n_; }
    int r() const { return r_; }
    double step() const { return step_; }
    double chart_radius() const { return radius_; }
    bool has_closed_form() const { return static_cast<bool>(jet_); }

    // Metric at z; throws DegenerateMetricError unless positive definite.
    ComplexMatrix operator()(const ComplexVector& z) const;
    // Closed-form derivatives when supplied, finite differences otherwise.
    Jet jet(const ComplexVector& z) const;
    const MatrixFn& evaluator() const { return eval_; }

private:
    int n_, r_;
    MatrixFn eval_;
    std::function<Jet(const ComplexVector&)> jet_;
    double step_, radius_;
};

struct BiForm {
    int n = 0, r = 0;
    HermitianMatrix matrix;  // entry[(i,mu),(j,nu)] at index (i*r+mu, j*r+nu)

    BiForm() = default;
    BiForm(int n, int r, HermitianMatrix m);
    static BiForm identity(int n, int r);
    double scale() const { return matrix.scale(); }
    double value(const TensorPoint& t) const { return biform_apply(matrix, t, t).real(); }
};

struct CurvaturePoint {
    ComplexVector z;
    HermitianMatrix h;
    int n = 0;
    // table[i*n + j](lambda, mu) = Theta^lambda_{mu i jbar}
    std::vector<ComplexMatrix> table;

    int r() const { return h.dim(); }
    cplx theta(int lambda, int mu, int i, int j) const { return table[i * n + j](lambda, mu); }
    // Inverse of curvature_biform for a given metric value.
    static CurvaturePoint from_biform(const BiForm& form, const HermitianMatrix& h);
};

CurvaturePoint chern_curvature(const MetricField& m, const ComplexVector& z);
BiForm curvature_biform(const CurvaturePoint& c);
// Hermitian residual of the un-symmetrized form built from c.
double biform_hermitian_residual(const CurvaturePoint& c);

// h* = (h^{-1})^T in the dual frame.
MetricField dual_metric(const MetricField& m);
// (R v)_mu = sum_nu h[mu][nu] conj(v^nu): the Riesz map E -> E* in dual frames.
ComplexVector riesz(const ComplexMatrix& h, const ComplexVector& v);

// Projective constructors live on the affine chart C^{r-1} of P(C^r).
LineWeight fubini_study_weight(int r);
MetricField o_minus1_metric(int r);
MetricField quotient_metric(int r);
MetricField twisted_quotient(int r, int k);
MetricField tangent_pn_metric(int n);
MetricField split_bundle(const std::vector<LineWeight>& phis);
// e^{-psi} h
MetricField conformal_twist(const MetricField& m, const LineWeight& psi);
MetricField tensor_line(const MetricField& m, const LineWeight& phi);
// phi(z) = sum_ab omega_ab z_a conj(z_b), so that d_i dbar_j phi = omega_ij.
LineWeight quadratic_weight(const ComplexMatrix& omega);

inline constexpr double kFiberChartRadius = 3.0;

// Complex Hessian in (z, w_2..w_r) of
//   (r+1) log(sum_i e^{phi_i(z)} |s_i(w)|^2) - sum_i phi_i(z),  s = (1, w_2, ..., w_r).
HermitianMatrix projectivized_twist_curvature(const std::vector<LineWeight>& phis,
                                              const ComplexVector& z, const ComplexVector& w,
                                              double step = kDefaultStep);

struct SplitCriterion {
    bool semipositive = true;
    double min_value = 0;  // smallest sampled value of sum lambda_i omega_i - (1/(r+1)) sum omega_i
    RealVector lambda;     // witness weights (if violated)
    ComplexVector xi;      // witness direction (if violated)
};

// Tests sum lambda_i omega_i(xi) >= (1/(r+1)) sum omega_i(xi) at the simplex
// vertices (exactly, by eigenvalues) and at a deterministic sample of
// (lambda, xi) pairs.
SplitCriterion split_twist_criterion(const std::vector<HermitianMatrix>& omegas, int samples,
                                     unsigned long long seed, double tol = 1e-12);

}  // namespace curvlab

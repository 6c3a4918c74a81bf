#pragma once

#include <functional>
#include <vector>

#include "curvlab/bundle_geometry.hpp"
#include "curvlab/exec.hpp"
#include "curvlab/quadrature.hpp"

namespace curvlab {

// Matrix weight h(z, t) on the unit disk over a base chart of dimension m.
struct WeightFamily {
    int r = 1;
    int m = 1;
    std::function<ComplexMatrix(cplx z, const ComplexVector& t)> h;
    // Radial breakpoints where h is not smooth in |z|, as a function of t.
    std::function<std::vector<double>(const ComplexVector& t)> kinks;

    ComplexMatrix operator()(cplx z, const ComplexVector& t) const { return h(z, t); }
    std::vector<double> breaks(const ComplexVector& t) const { return kinks ? kinks(t) : std::vector<double>{}; }
    // Family with no base dependence.
    static WeightFamily constant(int r, std::function<ComplexMatrix(cplx)> h0);
};

// Basis z^a e_mu, 0 <= a <= d, index a*r + mu.
struct BasisSpec {
    int d = 0, r = 1;
    int size() const { return (d + 1) * r; }
    int index(int a, int mu) const { return a * r + mu; }
};

// G[(a,mu),(b,nu)] = integral of z^a conj(z)^b h[mu][nu] over the disk, so a
// section with coefficient vector c has squared norm c^T G conj(c).
// Throws DegenerateMetricError if h fails to be positive definite at a node.
HermitianMatrix gram(const WeightFamily& w, const ComplexVector& t, const BasisSpec& b, const DomainGrid& grid,
                     Exec exec = Exec::serial);

// Grid with n_r nodes on each radial panel delimited by w.breaks(t).
DomainGrid grid_for(const WeightFamily& w, const ComplexVector& t, int n_r, int n_theta);

struct Extension {
    ComplexVector coeffs;
    double norm2 = 0;
};

// Constraint rows acting on coefficients: (A c)_mu = F_mu(z0).
ComplexMatrix point_evaluation(const BasisSpec& b, cplx z0);

// Minimizes c^T G conj(c) subject to A c = f0. Throws InputError if A does
// not have full row rank.
Extension minimal_extension(const HermitianMatrix& g, const ComplexMatrix& a, const ComplexVector& f0);

struct OtBound {
    double lhs = 0;          // minimal squared norm among extensions of f0
    double rhs = 0;          // pi h(0)(f0, f0) / |T'(0)|^2 with T(z) = z
    double rhs_delta = 0;    // pi (1 + delta) / delta h(0)(f0, f0)
    double slack = 0;        // rhs - lhs
    bool pass = false;       // lhs <= rhs (1 + 2e-2)
};

// Extension from the point z = 0 of the disk. The weight is first checked for
// Nakano-nonnegative curvature at sampled points (flat base metric); failure
// raises ConfigError.
OtBound ot_bound_check(const WeightFamily& w, const ComplexVector& f0, double delta, int d,
                       const DomainGrid& grid, int curvature_samples = 16);

// Curvature of the truncated direct image metric t -> G(t) at t0, as a BiForm
// on (base direction) x (basis element). Central differences with one
// Richardson level; the stencil must stay inside |t| < chart_radius.
BiForm direct_image_curvature(const WeightFamily& w, const ComplexVector& t0, const BasisSpec& b,
                              const DomainGrid& grid, double step = 1e-3, double chart_radius = 1.0);

// Sampled hypotheses for the direct image: (a) the fiber curvature in z is
// Nakano-nonnegative, (b) the curvature of h on disk x base is k-positive.
struct HypothesisCheck {
    double fiber_min = 0;  // worst Nakano minimum in z
    double total_min = 0;  // worst rank-k minimum on (z, t)
    bool fiber_ok = false, total_ok = false;
};
HypothesisCheck check_direct_image_hypotheses(const WeightFamily& w, int k, int samples, unsigned long long seed,
                                              double tol = 1e-6);

// h(z, t) = e^{-|z - t|^2}, rank one.
WeightFamily shifted_gaussian_family();
// h(z, t) = exp(-(|z|^2 + |t|^2) I - c Re(t conj z) sigma_x), rank two.
WeightFamily coupled_gaussian_family(double c);

// Weight e^{-t} e^{-p max(log|z|^2 - t, 0)} h(z) with kink at |z| = e^{t/2}.
WeightFamily degeneration_family(double p, int r, std::function<ComplexMatrix(cplx)> h);

struct DualNormTrack {
    std::vector<double> t;
    std::vector<double> log_norm2;
    double min_first_diff = 0;
    double min_second_diff = 0;
};

// log of the dual norm of F -> h0(F(0), sigma) on the truncated space at
// each real t: l^dagger G(t)^{-1} l with l_(0,mu) = (h0 conj(sigma))_mu.
// Throws DegenerateMetricError when the diagonally equilibrated G(t) has
// condition number above 1e12.
DualNormTrack dual_norm_track(const WeightFamily& w, const ComplexMatrix& h0, const ComplexVector& sigma,
                              const std::vector<double>& ts, int d, int n_r, int n_theta,
                              Exec exec = Exec::serial);

// e^{-t} times the integral of F over |z|^2 < e^t, polar Gauss-Legendre with
// resolution doubling until successive values agree to 1e-13.
double coarea_limit(const std::function<double(cplx)>& f, double t);

struct LiminfBound {
    std::vector<double> t;
    std::vector<double> values;  // e^{-t} int_t^0 e^{-p(s-t)} dnu(s)
    double min_value = 0;
    double tail_value = 0;       // value at the most negative t
    double bound = 0;            // 2 / (p - 1)
    bool pass = false;
};

// Trapezoid Stieltjes sums on the sample grid s (increasing, ending at 0).
// Evaluation points must lie in [s.front(), 0]. Throws InputError if nu
// decreases or p <= 1.
LiminfBound liminf_bound_check(const std::vector<double>& s, const std::vector<double>& nu, double p,
                               const std::vector<double>& t_eval);

struct CircleSamples {
    double radius = 1;
    std::vector<ComplexVector> values;  // at angles 2 pi k / M
};

// Fiberwise Taylor coefficients a_0..a_jmax of a holomorphic s(w) from samples
// on circles. Throws InputError if samples are too few or the data carry
// modes beyond jmax (aliasing).
std::vector<ComplexVector> homogeneous_coefficients(const std::vector<CircleSamples>& circles, int jmax);

struct NormDecomposition {
    double quadrature = 0;   // integral of |Phi|^2 |w|^{2 delta} dA / pi
    double closed_form = 0;  // sum ||a_i||^2 / (delta + i + 1)
    bool pass = false;       // relative agreement 1e-6
};

NormDecomposition weighted_norm_decomposition(const std::vector<ComplexVector>& a, double delta);

}  // namespace curvlab

#pragma once

#include <complex>
#include <vector>

namespace curvlab {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre on [-1, 1].
GaussRule gauss_legendre(int n);
// Same rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Polar product rule on the unit disk: n_r Gauss-Legendre radial nodes per
// panel, n_theta equispaced angles. Radial panels are delimited by the given
// interior breakpoints (sorted, inside (0, 1)).
class DomainGrid {
public:
    DomainGrid(int n_r, int n_theta, std::vector<double> breakpoints = {});

    int n_r() const { return n_r_; }
    int n_theta() const { return n_theta_; }
    const std::vector<double>& breakpoints() const { return breaks_; }

    std::size_t size() const { return points_.size(); }
    const std::vector<std::complex<double>>& points() const { return points_; }
    // Area weights: sum of weights is pi.
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& radial_weights() const { return radial_weights_; }  // includes rho

    DomainGrid refined() const { return DomainGrid(2 * n_r_, 2 * n_theta_, breaks_); }

private:
    int n_r_, n_theta_;
    std::vector<double> breaks_;
    std::vector<double> radii_, radial_weights_;
    std::vector<std::complex<double>> points_;
    std::vector<double> weights_;
};

// Geometric breakpoints s, s q, s q^2, ... < 1 with ratio q <= max_ratio.
std::vector<double> graded_breaks(double s, double max_ratio = 2.0);

}  // namespace curvlab

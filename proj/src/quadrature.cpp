#include "curvlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw InputError("gauss_legendre: need at least one node");
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const double w = 2 / ((1 - x * x) * dp * dp);
        g.nodes[i] = -x;
        g.nodes[n - 1 - i] = x;
        g.weights[i] = g.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.nodes[n / 2] = 0;
    return g;
}

GaussRule gauss_legendre(int n, double a, double b) {
    GaussRule g = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = mid + half * g.nodes[i];
        g.weights[i] *= half;
    }
    return g;
}

DomainGrid::DomainGrid(int n_r, int n_theta, std::vector<double> breakpoints)
    : n_r_(n_r), n_theta_(n_theta), breaks_(std::move(breakpoints)) {
    if (n_r < 1 || n_theta < 1) throw InputError("DomainGrid: node counts must be positive");
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
    for (double b : breaks_)
        if (!(b > 0 && b < 1)) throw InputError("DomainGrid: breakpoints must lie in (0, 1)");

    std::vector<double> edges{0.0};
    edges.insert(edges.end(), breaks_.begin(), breaks_.end());
    edges.push_back(1.0);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const GaussRule g = gauss_legendre(n_r, edges[p], edges[p + 1]);
        for (int i = 0; i < n_r; ++i) {
            radii_.push_back(g.nodes[i]);
            radial_weights_.push_back(g.weights[i] * g.nodes[i]);
        }
    }
    const double dtheta = 2 * std::numbers::pi / n_theta;
    points_.reserve(radii_.size() * n_theta);
    weights_.reserve(radii_.size() * n_theta);
    for (std::size_t i = 0; i < radii_.size(); ++i)
        for (int k = 0; k < n_theta; ++k) {
            points_.push_back(std::polar(radii_[i], k * dtheta));
            weights_.push_back(radial_weights_[i] * dtheta);
        }
}

std::vector<double> graded_breaks(double s, double max_ratio) {
    if (!(s > 0 && s < 1) || !(max_ratio > 1)) throw InputError("graded_breaks: need 0 < s < 1 and ratio > 1");
    const int panels = std::max(1, static_cast<int>(std::ceil(-std::log(s) / std::log(max_ratio))));
    const double q = std::pow(1 / s, 1.0 / panels);
    std::vector<double> b;
    double x = s;
    for (int i = 0; i < panels; ++i) {
        b.push_back(x);
        x *= q;
    }
    return b;
}

}  // namespace curvlab

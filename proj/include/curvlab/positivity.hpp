#pragma once

#include <string>
#include <vector>

#include "curvlab/bundle_geometry.hpp"
#include "curvlab/exec.hpp"

namespace curvlab {

enum class Status { positive, nonnegative, indefinite };
std::string to_string(Status s);

struct PositivityQuery {
    BiForm form;
    int k = 1;
    double tol = 1e-8;  // relative to max(1, ||Q||_F)
    int restarts = 32;
    int max_iters = 500;
    unsigned long long seed = 42;
    Exec exec = Exec::serial;
};

struct Verdict {
    double min_value = 0;
    TensorPoint witness;  // unit Frobenius norm, rank <= k
    Status status = Status::indefinite;
    bool converged = false;
    int iterations = 0;
    int k = 0;             // rank bound actually used
    bool clamped = false;  // requested k exceeded min(n, r)
};

Status classify(double min_value, double scale, double tol);

// Smallest eigenvalue of the full form: the Nakano minimum.
double nakano_min(const BiForm& form);

// Alternating minimization over T = sum_{alpha <= k} xi_alpha (x) v_alpha.
// Each half-step is an exact Hermitian eigenproblem; best of q.restarts
// deterministic starts.
Verdict rank_k_min(const PositivityQuery& q);

// Independent oracle: quasi-random sample of unit rank-<=k tensors, the best
// few refined by gradient descent on the Rayleigh quotient. Upper-bounds the
// true minimum. Requires n*r <= 12.
double brute_force_min(const BiForm& form, int k, int samples = 100000, Exec exec = Exec::serial);

bool is_k_positive(const BiForm& form, int k, Exec exec = Exec::serial);

// rank_k_min for k = 1..min(n,r). Each step is warm-started from the previous
// witness, so the sequence is non-increasing.
std::vector<double> chain(const BiForm& form, Exec exec = Exec::serial);

struct DemaillyResult {
    HermitianMatrix op;       // on Lambda^{n,q} (x) E, basis (J, mu), J lexicographic
    double min_eigenvalue = 0;
    bool positive = false;
    bool theorem_applies = false;  // Omega is k-positive with k >= min(n - q + 1, r)
};

// Omega^{#g} acting on E-valued (n,q)-forms, built in orthonormal frames of g and h.
DemaillyResult demailly_check(const CurvaturePoint& c, const HermitianMatrix& g, int q, int k);

// Increasing q-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> q_subsets(int n, int q);

// Search hook for the question whether k-positivity is preserved under the
// harmonic sum (h1^{-1} + h2^{-1})^{-1}. Reports verdicts; asserts nothing.
MetricField harmonic_sum(const MetricField& a, const MetricField& b);
std::vector<Verdict> harmonic_sum_probe(const MetricField& a, const MetricField& b,
                                        const std::vector<ComplexVector>& points, int k);

}  // namespace curvlab

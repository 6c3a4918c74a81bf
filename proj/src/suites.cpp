#include "curvlab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "curvlab/bergman.hpp"
#include "curvlab/bundle_geometry.hpp"
#include "curvlab/cohomology.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/positivity.hpp"
#include "curvlab/schur.hpp"

namespace curvlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- config

const std::vector<ConfigKey>& SuiteConfig::keys() {
    static const std::vector<ConfigKey> k = {
        {"seed", "42", "base seed for every sampler"},
        {"tol", "1e-8", "relative tolerance for positivity verdicts"},
        {"parallel", "0", "use the OpenMP paths"},
        {"curvature.fields", "4", "random metrics for the duality and twist identities"},
        {"curvature.sections", "4", "random metrics for the second-derivative identity"},
        {"curvature.demailly_forms", "50", "sampled Nakano-positive forms (n=2, r=2, q=1)"},
        {"curvature.optimizer_forms", "100", "random forms for the optimizer cross-check"},
        {"curvature.brute_samples", "100000", "quasi-random samples per brute-force minimum"},
        {"quotient.ranks", "3,4", "ranks r of the universal quotient on P^{r-1}"},
        {"quotient.points", "5", "random chart points besides the origin"},
        {"schur.trials", "200", "randomized trials per k"},
        {"schur.k", "1,2", "rank bounds"},
        {"schur.m1", "2", "max dim M1"},
        {"schur.m2", "2", "max dim M2"},
        {"schur.r", "3", "max fiber rank"},
        {"extension.d", "12", "truncation degree"},
        {"extension.n_r", "24", "radial nodes"},
        {"extension.n_theta", "32", "angular nodes"},
        {"extension.delta", "1", "delta of the twisted constant"},
        {"direct.d", "12", "truncation degree"},
        {"direct.n_r", "24", "radial nodes"},
        {"direct.n_theta", "48", "angular nodes"},
        {"direct.coupling", "1", "off-diagonal coupling of the rank-two family"},
        {"direct.step", "1e-3", "finite-difference step in t"},
        {"direct.samples", "12", "curvature samples for the hypotheses"},
        {"dual.p", "8", "exponent p of the degenerating weight"},
        {"dual.d", "12", "truncation degree"},
        {"dual.t_min", "-6", "first t"},
        {"dual.t_max", "-1", "last t"},
        {"dual.t_step", "0.25", "t spacing"},
        {"dual.p_limit", "16", "exponent for the limit comparison"},
        {"dual.n_r", "24", "radial nodes per panel"},
        {"dual.n_theta", "32", "angular nodes"},
        {"coarea.t", "-10", "t for the smooth-integrand check"},
        {"coarea.liminf_p", "2,4,8", "exponents for the liminf bound"},
        {"obstruction.d_max", "5", "largest curve degree for n = 2"},
        {"split.points", "40", "sample points for the projectivized cross-check"},
        {"split.samples", "2000", "criterion samples per instance"},
    };
    return k;
}

SuiteConfig::SuiteConfig() {
    for (const auto& k : keys()) values_[k.name] = k.value;
}

void SuiteConfig::set(const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    if (!values_.count(k)) throw ConfigError("unknown configuration key '" + k + "'");
    values_[k] = trim(value);
    // validate eagerly so the error names the key
    const std::string v = values_[k];
    if (v.empty()) throw ConfigError("empty value for '" + k + "'");
    for (const auto& part : split(v, ',')) {
        std::istringstream is(part);
        is.imbue(std::locale::classic());
        double x;
        if (!(is >> x) || !is.eof()) throw ConfigError("value for '" + k + "' is not numeric: " + v);
    }
}

void SuiteConfig::parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
    set(text.substr(0, eq), text.substr(eq + 1));
}

void SuiteConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        parse_assignment(line);
    }
}

std::string SuiteConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

double SuiteConfig::get_double(const std::string& key) const {
    std::istringstream is(get(key));
    is.imbue(std::locale::classic());
    double x;
    if (!(is >> x)) throw ConfigError("value for '" + key + "' is not a number");
    return x;
}

int SuiteConfig::get_int(const std::string& key) const {
    const double x = get_double(key);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("value for '" + key + "' is not an integer");
    return static_cast<int>(x);
}

bool SuiteConfig::get_bool(const std::string& key) const { return get_double(key) != 0; }

std::vector<double> SuiteConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split(get(key), ',')) {
        std::istringstream is(part);
        is.imbue(std::locale::classic());
        double x;
        if (!(is >> x)) throw ConfigError("value for '" + key + "' is not a list of numbers");
        out.push_back(x);
    }
    return out;
}

std::vector<int> SuiteConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double x : get_double_list(key)) {
        if (x != std::floor(x)) throw ConfigError("value for '" + key + "' is not a list of integers");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

unsigned long long SuiteConfig::seed() const {
    const double x = get_double("seed");
    if (x < 0 || x != std::floor(x)) throw ConfigError("seed must be a non-negative integer");
    return static_cast<unsigned long long>(x);
}

Json SuiteConfig::echo(const std::string& prefix) const {
    Json j = Json::object();
    for (const auto& k : keys())
        if (k.name.find('.') == std::string::npos || k.name.rfind(prefix + ".", 0) == 0) j[k.name] = values_.at(k.name);
    return j;
}

// ---------------------------------------------------------------- report

std::string CsvTable::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
        os << "\n";
    }
    return os.str();
}

bool Report::pass() const {
    return !undetermined && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json Report::to_json() const {
    Json j;
    j["suite"] = suite;
    j["parameters"] = parameters;
    Json cs = Json::array();
    for (const auto& c : checks) {
        Json cj;
        cj["id"] = c.id;
        cj["description"] = c.description;
        cj["claim"] = c.claim;
        cj["measured"] = c.measured;
        cj["threshold"] = c.threshold;
        cj["pass"] = c.pass;
        cs.push_back(cj);
    }
    j["checks"] = cs;
    j["undetermined"] = undetermined;
    j["pass"] = pass();
    j["wall_time_s"] = wall_time;
    return j;
}

Json reports_to_json(const std::vector<Report>& reports) {
    if (reports.size() == 1) return reports.front().to_json();
    Json j;
    j["suite"] = "all";
    Json arr = Json::array();
    bool ok = true;
    double wall = 0;
    for (const auto& r : reports) {
        arr.push_back(r.to_json());
        ok = ok && r.pass();
        wall += r.wall_time;
    }
    j["reports"] = arr;
    j["pass"] = ok;
    j["wall_time_s"] = wall;
    return j;
}

int exit_code(const std::vector<Report>& reports) {
    for (const auto& r : reports)
        if (r.undetermined) return 2;
    for (const auto& r : reports)
        if (!r.pass()) return 1;
    return 0;
}

// ---------------------------------------------------------------- suites

namespace {

Exec exec_of(const SuiteConfig& c) { return c.get_bool("parallel") ? Exec::parallel : Exec::serial; }

ComplexMatrix gauss_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

ComplexVector gauss_vector(std::mt19937_64& rng, int n) { return gauss_matrix(rng, n, 1).col(0); }

ComplexMatrix random_pd(std::mt19937_64& rng, int n, double shift) {
    const ComplexMatrix g = gauss_matrix(rng, n, n);
    return g * g.adjoint() / double(n) + shift * ComplexMatrix::Identity(n, n);
}

ComplexVector chart_point(std::mt19937_64& rng, int n, double radius) {
    const ComplexVector z = gauss_vector(rng, n);
    return radius * z / std::max(1.0, z.norm());
}

// h(z) = B(z) B(z)^dagger + shift I with B affine in z and conj(z).
MetricField random_field(std::mt19937_64& rng, int n, int r) {
    std::vector<ComplexMatrix> b(2 * n + 1);
    for (auto& m : b) m = gauss_matrix(rng, r, r) / std::sqrt(double(r));
    return MetricField(n, r, [b, n, r](const ComplexVector& z) {
        ComplexMatrix m = b[0];
        for (int i = 0; i < n; ++i) m += z(i) * b[1 + i] + std::conj(z(i)) * b[1 + n + i];
        return ComplexMatrix(m * m.adjoint() + 0.5 * ComplexMatrix::Identity(r, r));
    });
}

Check make(std::string id, std::string desc, std::string claim, std::string threshold) {
    Check c;
    c.id = std::move(id);
    c.description = std::move(desc);
    c.claim = std::move(claim);
    c.threshold = std::move(threshold);
    return c;
}

// ---- curvature identities

Report curvature_identities(const SuiteConfig& cfg) {
    Report rep;
    const auto seed = cfg.seed();
    const Exec ex = exec_of(cfg);

    {
        std::mt19937_64 rng(seed);
        double worst = 0, worst_sym = 0;
        for (int f = 0; f < cfg.get_int("curvature.fields"); ++f) {
            const int n = 1 + f % 2, r = 2 + f % 2;
            const MetricField m = random_field(rng, n, r);
            const MetricField md = dual_metric(m);
            const ComplexVector z = chart_point(rng, n, 0.4);
            const CurvaturePoint c = chern_curvature(m, z), cd = chern_curvature(md, z);
            const ComplexMatrix h = m(z), hd = md(z);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const ComplexVector v = gauss_vector(rng, r), w = gauss_vector(rng, r);
                    const ComplexMatrix& th = c.table[i * n + j];
                    const ComplexMatrix& thd = cd.table[i * n + j];
                    const cplx lhs = (th * v).transpose() * h * w.conjugate();
                    const cplx rhs = (thd * riesz(h, w)).transpose() * hd * riesz(h, v).conjugate();
                    worst = std::max(worst, std::abs(lhs + rhs) / std::max(1.0, std::abs(lhs)));
                    worst_sym = std::max(worst_sym, (thd + th.transpose()).norm() / std::max(1.0, th.norm()));
                }
        }
        Check c = make("duality", "curvature of the dual metric against the Riesz-transported curvature",
                       "h(Theta v, w) = -h*(Theta* Rw, Rv)", "residual < 1e-5");
        c.measured["residual"] = worst;
        c.measured["endomorphism_residual"] = worst_sym;
        c.pass = worst < 1e-5 && worst_sym < 1e-5;
        rep.checks.push_back(c);
    }

    {
        std::mt19937_64 rng(seed + 1);
        double worst = 0;
        for (int f = 0; f < cfg.get_int("curvature.fields"); ++f) {
            const MetricField m = random_field(rng, 2, 2);
            LineWeight psi;
            psi.n = 2;
            const double a = 0.1 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
            psi.phi = [a](const ComplexVector& z) {
                return std::log1p(z.squaredNorm()) + a * std::norm(z(0) * z(1)) + std::real(z(0));
            };
            const MetricField tw = conformal_twist(m, psi);
            const ComplexVector z = chart_point(rng, 2, 0.4);
            const CurvaturePoint ca = chern_curvature(m, z), cb = chern_curvature(tw, z);
            const HermitianMatrix hess = complex_hessian(psi.phi, z);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    worst = std::max(worst, (cb.table[i * 2 + j] - ca.table[i * 2 + j] -
                                             hess(i, j) * ComplexMatrix::Identity(2, 2))
                                                .norm());
        }
        Check c = make("conformal_twist", "curvature of e^{-psi} h minus curvature of h",
                       "Theta(e^{-psi} h) = Theta(h) + ddbar psi Id", "residual < 1e-5");
        c.measured["residual"] = worst;
        c.pass = worst < 1e-5;
        rep.checks.push_back(c);
    }

    {
        std::mt19937_64 rng(seed + 2);
        double worst = 0, worst_im = 0;
        for (int trial = 0; trial < cfg.get_int("curvature.sections"); ++trial) {
            const int n = 2, r = 2 + trial % 2, k = 2;
            const MetricField m = random_field(rng, n, r);
            const ComplexVector x = chart_point(rng, n, 0.3);
            const Jet jx = m.jet(x);
            const ComplexMatrix hinv = jx.f.inverse();
            std::vector<ComplexVector> v(k);
            std::vector<std::vector<ComplexVector>> cc(k, std::vector<ComplexVector>(n));
            std::vector<ComplexMatrix> quad(k);
            for (int a = 0; a < k; ++a) {
                v[a] = gauss_vector(rng, r);
                for (int i = 0; i < n; ++i) cc[a][i] = -(v[a].transpose() * jx.d[i] * hinv).transpose();
                quad[a] = gauss_matrix(rng, r, n * n);
            }
            auto section = [&](int a, const ComplexVector& z) {
                const ComplexVector dz = z - x;
                ComplexVector out = v[a];
                for (int i = 0; i < n; ++i) {
                    out += dz(i) * cc[a][i];
                    for (int j = 0; j < n; ++j) out += dz(i) * dz(j) * quad[a].col(i * n + j);
                }
                return out;
            };
            double re = 0, im = 0;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    const Jet jj = fd_jet(
                        [&](const ComplexVector& z) {
                            return ComplexMatrix::Constant(
                                1, 1, (section(i, z).transpose() * m(z) * section(j, z).conjugate())(0, 0));
                        },
                        x);
                    re += jj.dd[i * n + j](0, 0).real();
                    im += jj.dd[i * n + j](0, 0).imag();
                }
            ComplexMatrix t(n, r);
            for (int i = 0; i < k; ++i) t.row(i) = v[i].transpose();
            const double rhs = -curvature_biform(chern_curvature(m, x)).value(TensorPoint(t));
            worst = std::max(worst, std::abs(re - rhs) / std::max(1.0, std::abs(rhs)));
            worst_im = std::max(worst_im, std::abs(im));
        }
        Check c = make("second_derivative_identity",
                       "sum_ij d_i dbar_j h(f_i, f_j) at a point where all f_i have vanishing covariant derivative",
                       "sum d_i dbar_j h(f_i, f_j) = -Theta(sum dz^i (x) f_i)", "residual < 1e-4");
        c.measured["residual"] = worst;
        c.measured["imaginary_part"] = worst_im;
        c.pass = worst < 1e-4 && worst_im < 1e-4;
        rep.checks.push_back(c);
    }

    {
        std::mt19937_64 rng(seed + 3);
        int failures = 0, not_applicable = 0;
        double worst = std::numeric_limits<double>::infinity();
        const int forms = cfg.get_int("curvature.demailly_forms");
        for (int f = 0; f < forms; ++f) {
            const ComplexMatrix q = random_pd(rng, 4, 0.05);
            const ComplexMatrix h = random_pd(rng, 2, 0.5);
            const CurvaturePoint cp = CurvaturePoint::from_biform(BiForm(2, 2, HermitianMatrix(q)), HermitianMatrix(h));
            const DemaillyResult d = demailly_check(cp, HermitianMatrix(random_pd(rng, 2, 0.5)), 1, 2);
            if (!d.theorem_applies) ++not_applicable;
            if (!d.positive) ++failures;
            worst = std::min(worst, d.min_eigenvalue);
        }
        Check c = make("demailly_positivity", "contracted curvature operator on (n,1)-forms for Nakano-positive forms",
                       "Nakano-positive curvature gives a positive operator on E-valued (n,q)-forms",
                       "zero failures");
        c.measured["forms"] = forms;
        c.measured["failures"] = failures;
        c.measured["not_applicable"] = not_applicable;
        c.measured["min_eigenvalue"] = worst;
        c.pass = failures == 0 && not_applicable == 0;
        rep.checks.push_back(c);
    }

    {
        std::mt19937_64 rng(seed + 4);
        const int forms = cfg.get_int("curvature.optimizer_forms");
        const int samples = cfg.get_int("curvature.brute_samples");
        static const int shapes[][2] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}};
        double worst = 0;
        int chain_breaks = 0, comparisons = 0;
        for (int f = 0; f < forms; ++f) {
            const int n = shapes[f % 6][0], r = shapes[f % 6][1];
            const ComplexMatrix g = gauss_matrix(rng, n * r, n * r);
            const BiForm form(n, r, HermitianMatrix(0.5 * (g + g.adjoint())));
            const double s = form.scale();
            const std::vector<double> ch = chain(form, ex);
            for (std::size_t i = 1; i < ch.size(); ++i)
                if (ch[i] > ch[i - 1] + 1e-12 * s) ++chain_breaks;
            for (int k = 1; k < std::min(n, r); ++k) {
                const double a = rank_k_min({form, k, cfg.get_double("tol"), 32, 500, seed, ex}).min_value;
                const double b = brute_force_min(form, k, samples, ex);
                worst = std::max(worst, std::abs(a - b) / s);
                ++comparisons;
            }
        }
        Check c = make("optimizer_soundness", "alternating rank-k minimization against quasi-random sampling",
                       "positivity on tensors of rank at most k", "|difference| <= 1e-3 scale, chain monotone");
        c.measured["forms"] = forms;
        c.measured["comparisons"] = comparisons;
        c.measured["max_relative_difference"] = worst;
        c.measured["chain_violations"] = chain_breaks;
        c.pass = worst <= 1e-3 && chain_breaks == 0;
        rep.checks.push_back(c);
    }
    return rep;
}

// ---- quotient thresholds

Report quotient_thresholds(const SuiteConfig& cfg) {
    Report rep;
    const double tol = cfg.get_double("tol");
    const Exec ex = exec_of(cfg);
    for (int r : cfg.get_int_list("quotient.ranks")) {
        if (r < 3) throw ConfigError("quotient.ranks: every rank must be at least 3");
        std::mt19937_64 rng(cfg.seed() + r);
        std::vector<ComplexVector> pts{ComplexVector::Zero(r - 1)};
        for (int p = 0; p < cfg.get_int("quotient.points"); ++p) pts.push_back(chart_point(rng, r - 1, 1.0));

        const std::string tag = "r" + std::to_string(r);
        double g0 = 0, wit = 0, g1 = std::numeric_limits<double>::infinity(), n1 = -g1, n2 = g1;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const BiForm q0 = curvature_biform(chern_curvature(quotient_metric(r), pts[p]));
            const Verdict v0 = rank_k_min({q0, 1, tol, 32, 500, cfg.seed(), ex});
            g0 = std::max(g0, std::abs(v0.min_value) / q0.scale());
            if (p == 0) {
                Eigen::JacobiSVD<ComplexMatrix> svd(v0.witness.coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
                const ComplexVector a = svd.matrixU().col(0);
                const ComplexVector b = svd.matrixV().col(0).conjugate();
                wit = std::abs((a.array() * b.conjugate().array()).sum());
            }
            const BiForm q1 = curvature_biform(chern_curvature(twisted_quotient(r, 1), pts[p]));
            g1 = std::min(g1, rank_k_min({q1, 1, tol, 32, 500, cfg.seed(), ex}).min_value / q1.scale());
            n1 = std::max(n1, rank_k_min({q1, 2, tol, 32, 500, cfg.seed(), ex}).min_value / q1.scale());
            const BiForm q2 = curvature_biform(chern_curvature(twisted_quotient(r, 2), pts[p]));
            n2 = std::min(n2, nakano_min(q2) / q2.scale());
        }
        Check c0 = make("quotient." + tag + ".k0", "untwisted quotient: Griffiths minimum",
                        "Q is Griffiths-semipositive and degenerate", "|min| <= 1e-7 scale, witness a.conj(b) = 0");
        c0.measured["points"] = pts.size();
        c0.measured["max_abs_griffiths_min"] = g0;
        c0.measured["origin_witness_overlap"] = wit;
        c0.pass = g0 <= 1e-7 && wit <= 1e-6;
        Check c1 = make("quotient." + tag + ".k1", "Q (x) O(1): Griffiths and rank-two minima",
                        "Q (x) O(1) is Griffiths-positive but not 2-positive",
                        "griffiths > 1e-6 scale, rank-2 <= 1e-7 scale");
        c1.measured["min_griffiths"] = g1;
        c1.measured["max_rank2_min"] = n1;
        c1.pass = g1 > 1e-6 && n1 <= 1e-7;
        Check c2 = make("quotient." + tag + ".k2", "Q (x) O(2): Nakano minimum",
                        "Q (x) O(k) is Nakano positive as soon as k >= 2", "nakano > 1e-6 scale");
        c2.measured["min_nakano"] = n2;
        c2.pass = n2 > 1e-6;
        rep.checks.push_back(c0);
        rep.checks.push_back(c1);
        rep.checks.push_back(c2);
    }
    return rep;
}

// ---- schur

Report schur_suite(const SuiteConfig& cfg) {
    Report rep;
    const SchurDims dims{cfg.get_int("schur.m1"), cfg.get_int("schur.m2"), cfg.get_int("schur.r")};
    const int trials = cfg.get_int("schur.trials");
    const double tol = cfg.get_double("tol");
    for (int k : cfg.get_int_list("schur.k")) {
        const std::string tag = "k" + std::to_string(k);
        for (Coupling cp : {Coupling::general, Coupling::fiber_trivial}) {
            const bool gen = cp == Coupling::general;
            const SchurReport sr = verify_schur_positivity(trials, dims, k, cfg.seed(), exec_of(cfg), cp);
            double worst = std::numeric_limits<double>::infinity();
            int viol = 0;
            for (const auto& t : sr.records) {
                worst = std::min(worst, t.complement_min / t.scale);
                if (t.complement_min <= -tol * t.scale) ++viol;
            }
            Check c = make(std::string("schur.") + tag + (gen ? ".transfer" : ".transfer_fiber_trivial"),
                           gen ? "complement of sampled k-positive forms with positive definite lower block"
                               : "same, with coupling J22^{-1} J21 = C (x) Id",
                           "the Schur complement of a k-positive form is k-positive",
                           "no complement minimum below -tol scale");
            c.measured["trials"] = sr.trials;
            c.measured["violations"] = viol;
            c.measured["min_relative_complement"] = worst;
            c.measured["rejected"] = sr.rejected;
            c.measured["insufficient_samples"] = sr.insufficient_samples;
            c.pass = viol == 0 && !sr.insufficient_samples && sr.trials == trials;
            rep.checks.push_back(c);
            if (gen) {
                Check r = make("schur." + tag + ".completion", "form at T1 (+) (-J22^{-1} J21 T1) against the complement",
                               "the choice w = -J22^{-1} J21 tau realizes the complement value",
                               "relative residual < 1e-10");
                r.measured["max_residual"] = sr.max_completion_residual;
                r.pass = sr.max_completion_residual < 1e-10;
                rep.checks.push_back(r);
            }
        }
    }
    return rep;
}

// ---- flat extension

ComplexMatrix eye(int r) { return ComplexMatrix::Identity(r, r); }

Report extension_flat(const SuiteConfig& cfg) {
    Report rep;
    const int d = cfg.get_int("extension.d");
    const double delta = cfg.get_double("extension.delta");
    const DomainGrid grid(cfg.get_int("extension.n_r"), cfg.get_int("extension.n_theta"));

    struct Case {
        std::string id, desc;
        WeightFamily w;
        ComplexVector f0;
        bool equality;
    };
    ComplexVector one(1), two(2);
    one << 1.0;
    two << 1.0, 1.0;
    std::vector<Case> cases;
    cases.push_back({"trivial", "h = 1, f0 = 1", WeightFamily::constant(1, [](cplx) { return eye(1); }), one, true});
    cases.push_back({"gaussian", "h = e^{-|z|^2}, f0 = 1",
                     WeightFamily::constant(1, [](cplx z) { return ComplexMatrix(std::exp(-std::norm(z)) * eye(1)); }),
                     one, false});
    cases.push_back({"diagonal_rank2", "h = diag(e^{-|z|^2}, e^{-2|z|^2}), f0 = (1, 1)",
                     WeightFamily::constant(2,
                                            [](cplx z) {
                                                ComplexMatrix m = ComplexMatrix::Zero(2, 2);
                                                m(0, 0) = std::exp(-std::norm(z));
                                                m(1, 1) = std::exp(-2 * std::norm(z));
                                                return m;
                                            }),
                     two, false});
    for (const auto& cs : cases) {
        const OtBound o = ot_bound_check(cs.w, cs.f0, delta, d, grid);
        const OtBound lower = ot_bound_check(cs.w, cs.f0, delta, d - 2, grid);
        Check c = make("extension." + cs.id, "minimal extension from z = 0 with T(z) = z: " + cs.desc,
                       "minimal extension norm <= pi int_Z h(f,f) dA / |dT|^2",
                       cs.equality ? "lhs <= rhs (1 + 2e-2) and |lhs/pi - 1| < 5e-3" : "lhs <= rhs (1 + 2e-2)");
        c.measured["lhs"] = o.lhs;
        c.measured["rhs"] = o.rhs;
        c.measured["rhs_with_delta"] = o.rhs_delta;
        c.measured["slack"] = o.slack;
        c.measured["lhs_degree_minus_2"] = lower.lhs;
        c.pass = o.pass && (!cs.equality || std::abs(o.lhs / kPi - 1) < 5e-3);
        rep.checks.push_back(c);
    }

    {
        std::mt19937_64 rng(cfg.seed());
        std::vector<ComplexVector> coef;
        for (int j = 0; j <= 5; ++j) coef.push_back(gauss_vector(rng, 2));
        auto poly = [&](cplx w) {
            ComplexVector v = ComplexVector::Zero(2);
            cplx p = 1;
            for (const auto& a : coef) {
                v += p * a;
                p *= w;
            }
            return v;
        };
        std::vector<CircleSamples> circles;
        for (double rho : {0.6, 0.9}) {
            CircleSamples c;
            c.radius = rho;
            for (int k = 0; k < 13; ++k) c.values.push_back(poly(std::polar(rho, 2 * kPi * k / 13)));
            circles.push_back(c);
        }
        const auto a = homogeneous_coefficients(circles, 5);
        double err = 0, held = 0;
        for (int j = 0; j <= 5; ++j) err = std::max(err, (a[j] - coef[j]).norm());
        for (int k = 0; k < 7; ++k) {
            const cplx w = std::polar(0.35, 2 * kPi * k / 7);
            ComplexVector v = ComplexVector::Zero(2);
            cplx p = 1;
            for (const auto& aj : a) {
                v += p * aj;
                p *= w;
            }
            held = std::max(held, (v - poly(w)).norm());
        }
        Check c = make("homogeneous_expansion", "fiberwise Taylor coefficients of a degree-5 section from circle samples",
                       "s = sum_j a_j sigma^j", "coefficients 1e-10, held-out reconstruction 1e-8");
        c.measured["coefficient_error"] = err;
        c.measured["reconstruction_error"] = held;
        c.pass = err < 1e-10 && held < 1e-8;
        rep.checks.push_back(c);

        double worst = 0;
        bool ok = true;
        for (double dl : {0.37, 1.0, delta}) {
            const NormDecomposition nd = weighted_norm_decomposition(coef, dl);
            worst = std::max(worst, std::abs(nd.quadrature - nd.closed_form) / nd.closed_form);
            ok = ok && nd.pass;
        }
        Check n = make("norm_decomposition", "|w|^{2 delta}-weighted norm of a fiber polynomial",
                       "orthogonality of fiber degrees with weights 1/(delta + i + 1)", "relative 1e-6");
        n.measured["max_relative_difference"] = worst;
        n.pass = ok;
        rep.checks.push_back(n);
    }
    return rep;
}

// ---- direct image

Report direct_image(const SuiteConfig& cfg) {
    Report rep;
    const int d = cfg.get_int("direct.d");
    const DomainGrid grid(cfg.get_int("direct.n_r"), cfg.get_int("direct.n_theta"));
    const double step = cfg.get_double("direct.step");
    const ComplexVector t0 = ComplexVector::Zero(1);

    {
        const WeightFamily w = WeightFamily::constant(2, [](cplx z) {
            ComplexMatrix m(2, 2);
            m << 1.0 + std::norm(z), 0.3 * z, 0.3 * std::conj(z), std::exp(-std::norm(z));
            return m;
        });
        const BiForm f = direct_image_curvature(w, t0, {d, 2}, grid, step);
        const double mx = f.matrix.matrix().cwiseAbs().maxCoeff();
        Check c = make("direct.t_independent", "truncated direct image of a weight with no base dependence",
                       "a trivial family with constant metric has flat direct image", "max |entry| <= 1e-6");
        c.measured["max_abs_entry"] = mx;
        c.pass = mx <= 1e-6;
        rep.checks.push_back(c);
    }

    struct Fam {
        std::string id, desc;
        WeightFamily w;
    };
    const std::vector<Fam> fams = {
        {"shifted_gaussian", "h = e^{-|z - t|^2}", shifted_gaussian_family()},
        {"coupled_gaussian", "h = exp(-(|z|^2+|t|^2) - c Re(t conj z) sigma_x)",
         coupled_gaussian_family(cfg.get_double("direct.coupling"))},
    };
    for (const auto& fm : fams) {
        const int k = fm.w.r;
        const HypothesisCheck hc = check_direct_image_hypotheses(fm.w, k, cfg.get_int("direct.samples"), cfg.seed());
        const BiForm f = direct_image_curvature(fm.w, t0, {d, fm.w.r}, grid, step);
        const BiForm fl = direct_image_curvature(fm.w, t0, {d - 2, fm.w.r}, grid, step);
        const double mn = min_eigenvalue(f.matrix) / f.scale();
        Check c = make("direct." + fm.id, "curvature of the truncated direct image: " + fm.desc,
                       "if the fiber curvature is Nakano-nonnegative and the total curvature is k-positive, the "
                       "direct image is k-positive",
                       "hypotheses hold, min eigenvalue >= -1e-4 scale");
        c.measured["fiber_min"] = hc.fiber_min;
        c.measured["total_min"] = hc.total_min;
        c.measured["min_eigenvalue_relative"] = mn;
        c.measured["min_eigenvalue_relative_degree_minus_2"] = min_eigenvalue(fl.matrix) / fl.scale();
        c.pass = hc.fiber_ok && hc.total_ok && mn >= -1e-4;
        rep.checks.push_back(c);
    }
    return rep;
}

// ---- dual norm

std::vector<double> t_grid(const SuiteConfig& cfg) {
    const double a = cfg.get_double("dual.t_min"), b = cfg.get_double("dual.t_max"), h = cfg.get_double("dual.t_step");
    if (!(h > 0) || !(b > a) || b > 0) throw ConfigError("dual: need t_min < t_max <= 0 and t_step > 0");
    std::vector<double> ts;
    const int n = static_cast<int>(std::floor((b - a) / h + 1e-9));
    for (int i = 0; i <= n; ++i) ts.push_back(a + i * h);
    return ts;
}

Report dual_norm(const SuiteConfig& cfg) {
    Report rep;
    const double p = cfg.get_double("dual.p"), pl = cfg.get_double("dual.p_limit");
    const int d = cfg.get_int("dual.d"), nr = cfg.get_int("dual.n_r"), nth = cfg.get_int("dual.n_theta");
    if (!(p > 1) || !(pl > 1)) throw ConfigError("dual: p must exceed 1");
    const std::vector<double> ts = t_grid(cfg);
    ComplexVector sigma(1);
    sigma << 1.0;
    const Exec ex = exec_of(cfg);

    const WeightFamily w = degeneration_family(p, 1, [](cplx) { return eye(1); });
    const DualNormTrack tr = dual_norm_track(w, eye(1), sigma, ts, d, nr, nth, ex);
    double cf = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double g00 = kPi + kPi * (1 - std::exp((p - 1) * ts[i])) / (p - 1);
        cf = std::max(cf, std::abs(tr.log_norm2[i] + std::log(g00)));
    }
    Check mono = make("dual.monotone", "log dual norm of evaluation at 0 along t, flat weight",
                      "t -> log ||xi_sigma||^2_{t*} is non-decreasing", "first differences >= -1e-6");
    mono.measured["min_first_difference"] = tr.min_first_diff;
    mono.pass = tr.min_first_diff >= -1e-6;
    Check conv = make("dual.convex", "same track", "t -> log ||xi_sigma||^2_{t*} is convex",
                      "second differences >= -1e-6");
    conv.measured["min_second_difference"] = tr.min_second_diff;
    conv.pass = tr.min_second_diff >= -1e-6;
    Check cfc = make("dual.closed_form", "track against -log(pi + pi (1 - e^{(p-1)t}) / (p-1))",
                     "radial weights make monomials orthogonal", "|difference| <= 1e-8");
    cfc.measured["max_abs_difference"] = cf;
    cfc.pass = cf <= 1e-8;
    rep.checks.push_back(mono);
    rep.checks.push_back(conv);
    rep.checks.push_back(cfc);

    // Gaussian weight: the same track with a curved metric
    const WeightFamily wg = degeneration_family(p, 1, [](cplx z) { return ComplexMatrix(std::exp(-std::norm(z)) * eye(1)); });
    const DualNormTrack tg = dual_norm_track(wg, eye(1), sigma, ts, d, nr, nth, ex);
    Check g = make("dual.gaussian", "log dual norm along t, weight e^{-|z|^2}",
                   "t -> log ||xi_sigma||^2_{t*} is non-decreasing and convex", "differences >= -1e-6");
    g.measured["min_first_difference"] = tg.min_first_diff;
    g.measured["min_second_difference"] = tg.min_second_diff;
    g.pass = tg.min_first_diff >= -1e-6 && tg.min_second_diff >= -1e-6;
    rep.checks.push_back(g);

    // limit against (1/pi) ||P sigma||^2 = 1/pi
    const WeightFamily wl = degeneration_family(pl, 1, [](cplx) { return eye(1); });
    const DualNormTrack tl = dual_norm_track(wl, eye(1), sigma, {ts.front()}, d, nr, nth, ex);
    const double ratio = kPi * std::exp(tl.log_norm2.front());
    Check lim = make("dual.limit", "pi ||xi||^2 at the first t for the larger exponent p_limit",
                     "for p large the limit is at least (1/pi) ||P sigma||^2 - delta", "ratio >= 0.9");
    lim.measured["p_limit"] = pl;
    lim.measured["ratio"] = ratio;
    lim.measured["ratio_at_p"] = kPi * std::exp(tr.log_norm2.front());
    lim.measured["closed_form_ratio_at_p"] = (p - 1) / p;
    lim.pass = ratio >= 0.9;
    rep.checks.push_back(lim);

    CsvTable tab;
    tab.name = "dual_norm";
    tab.columns = {"t", "log_norm2_flat", "log_norm2_gaussian"};
    for (std::size_t i = 0; i < ts.size(); ++i) tab.rows.push_back({ts[i], tr.log_norm2[i], tg.log_norm2[i]});
    rep.tables.push_back(tab);
    return rep;
}

// ---- co-area and liminf

Report coarea(const SuiteConfig& cfg) {
    Report rep;
    const double t = cfg.get_double("coarea.t");
    if (t > -4) throw ConfigError("coarea.t must be <= -4");

    double worst = 0;
    for (double tt : {-4.0, -10.0, -20.0, t}) worst = std::max(worst, std::abs(coarea_limit([](cplx) { return 1.0; }, tt) - kPi));
    Check c1 = make("coarea.constant", "e^{-t} area of |z|^2 < e^t", "e^{-t} int_{X_t} F dV -> pi int_Z F dA / |dT|^2",
                    "|value - pi| <= 1e-12");
    c1.measured["max_abs_error"] = worst;
    c1.pass = worst <= 1e-12;
    rep.checks.push_back(c1);

    const double v = coarea_limit([](cplx z) { return 1 + z.real(); }, t);
    Check c2 = make("coarea.smooth", "F = 1 + Re z", "e^{-t} int_{X_t} F dV -> pi int_Z F dA / |dT|^2",
                    "relative error < 1e-3");
    c2.measured["t"] = t;
    c2.measured["value"] = v;
    c2.measured["relative_error"] = std::abs(v / kPi - 1);
    c2.pass = std::abs(v / kPi - 1) < 1e-3;
    rep.checks.push_back(c2);

    const double vz = coarea_limit([](cplx z) { return std::norm(z); }, t);
    Check c3 = make("coarea.vanishing", "F = |z|^2 vanishes on Z", "the limit is pi F(0) = 0",
                    "|value - pi e^t / 2| <= 1e-12");
    c3.measured["value"] = vz;
    c3.pass = std::abs(vz - kPi * std::exp(t) / 2) <= 1e-12;
    rep.checks.push_back(c3);

    CsvTable tab;
    tab.name = "coarea";
    tab.columns = {"t", "value_one_plus_re_z", "value_abs_z_squared"};
    for (double tt = -4; tt >= -14; tt -= 1)
        tab.rows.push_back({tt, coarea_limit([](cplx z) { return 1 + z.real(); }, tt),
                            coarea_limit([](cplx z) { return std::norm(z); }, tt)});
    rep.tables.push_back(tab);

    std::vector<double> s, nu;
    for (int i = -200000; i <= 0; ++i) {
        s.push_back(i * 1e-4);
        nu.push_back(std::exp(i * 1e-4));
    }
    const std::vector<double> te{-20, -15, -10, -5, -2, -1};
    for (double p : cfg.get_double_list("coarea.liminf_p")) {
        if (!(p > 1)) throw ConfigError("coarea.liminf_p: exponents must exceed 1");
        const LiminfBound lb = liminf_bound_check(s, nu, p, te);
        std::ostringstream id;
        id << "liminf.p" << p;
        Check c = make(id.str(), "e^{-t} int_t^0 e^{-p(s-t)} dnu(s) with nu = e^s",
                       "liminf_{t -> -inf} e^{-t} int_t^0 e^{-p(s-t)} dnu(s) <= 2/(p-1)",
                       "tail within 1e-6 of 1/(p-1) and <= 2/(p-1)");
        c.measured["tail_value"] = lb.tail_value;
        c.measured["min_value"] = lb.min_value;
        c.measured["bound"] = lb.bound;
        c.pass = lb.pass && std::abs(lb.tail_value - 1 / (p - 1)) < 1e-6 && lb.tail_value <= lb.bound;
        rep.checks.push_back(c);
    }
    return rep;
}

// ---- obstruction

Report obstruction(const SuiteConfig& cfg) {
    Report rep;
    auto dim_json = [](const std::optional<Dim>& d) { return d ? Json(*d) : Json("undetermined"); };

    const int dmax = cfg.get_int("obstruction.d_max");
    if (dmax < 1) throw ConfigError("obstruction.d_max must be at least 1");
    {
        Check c = make("obstruction.n2", "restriction of sections of K (x) T (x) O(d) on P^2 to a degree-d curve",
                       "on P^2 the restriction map is never surjective; dim H^{1,1}(P^2) = 1",
                       "surjective = false and coker = 1 for every d");
        bool ok = true;
        Json per = Json::array();
        for (int d = 1; d <= dmax; ++d) {
            const AdjointVerdict v = adjoint_restriction_verdict(2, d);
            if (!v.determined()) rep.undetermined = true;
            per.push_back({{"d", d},
                           {"surjective", v.surjective ? Json(*v.surjective) : Json("undetermined")},
                           {"coker_dim", dim_json(v.coker_dim)}});
            ok = ok && v.determined() && !*v.surjective && v.coker_dim && *v.coker_dim == 1;
        }
        c.measured["verdicts"] = per;
        c.pass = ok;
        rep.checks.push_back(c);
    }
    for (int n : {3, 4}) {
        const AdjointVerdict v = adjoint_restriction_verdict(n, 1);
        if (!v.determined()) rep.undetermined = true;
        Check c = make("obstruction.n" + std::to_string(n), "restriction to a hyperplane section, d = 1",
                       "for P^n with n >= 3 the restriction map is surjective", "surjective = true");
        c.measured["surjective"] = v.surjective ? Json(*v.surjective) : Json("undetermined");
        c.measured["coker_dim"] = dim_json(v.coker_dim);
        c.pass = v.determined() && *v.surjective;
        rep.checks.push_back(c);
    }
    {
        const auto a = hq_K_tensor_T(2, 0, 1), b = hq_K_tensor_T(3, 0, 1), e = hq_K_tensor_T(2, 2, 1);
        if (!a || !b || !e) rep.undetermined = true;
        Check c = make("obstruction.ledger", "h^1 of K (x) T (x) O(d) from the Euler sequence",
                       "h^1(K (x) T) = h^{n-1,1}(P^n)", "(n,d) = (2,0) -> 1, (3,0) -> 0, (2,2) -> 0");
        c.measured["h1_n2_d0"] = dim_json(a);
        c.measured["h1_n3_d0"] = dim_json(b);
        c.measured["h1_n2_d2"] = dim_json(e);
        c.pass = a == Dim{1} && b == Dim{0} && e == Dim{0};
        rep.checks.push_back(c);
    }
    return rep;
}

// ---- split example

Report split_example(const SuiteConfig& cfg) {
    Report rep;
    const int samples = cfg.get_int("split.samples");
    auto scalar = [](double x) { return HermitianMatrix(ComplexMatrix::Constant(1, 1, x)); };

    {
        const SplitCriterion sc = split_twist_criterion({scalar(1), scalar(10)}, samples, cfg.seed());
        std::vector<LineWeight> phis{quadratic_weight(ComplexMatrix::Constant(1, 1, 1.0)),
                                     quadratic_weight(ComplexMatrix::Constant(1, 1, 10.0))};
        ComplexVector z = ComplexVector::Zero(1), w = ComplexVector::Zero(1);
        const double hess = min_eigenvalue(projectivized_twist_curvature(phis, z, w));
        Check c = make("split.violation", "split bundle with curvatures (1, 10), r = 2",
                       "semipositivity needs min_i omega_i >= (1/(r+1)) sum omega_i",
                       "criterion reports a violation; projectivized Hessian negative at the witness");
        c.measured["criterion_min"] = sc.min_value;
        c.measured["projectivized_min_eigenvalue"] = hess;
        c.pass = !sc.semipositive && hess < 0;
        rep.checks.push_back(c);
    }
    {
        std::mt19937_64 rng(cfg.seed() + 1);
        const HermitianMatrix o(random_pd(rng, 2, 0.2));
        const SplitCriterion sc = split_twist_criterion({o, o}, samples, cfg.seed());
        Check c = make("split.equal", "split bundle with equal positive forms", "equal forms satisfy the criterion",
                       "criterion semipositive");
        c.measured["criterion_min"] = sc.min_value;
        c.pass = sc.semipositive;
        rep.checks.push_back(c);
    }
    {
        std::mt19937_64 rng(cfg.seed() + 2);
        const int n = 2, r = 3;
        const std::vector<ComplexMatrix> om = {random_pd(rng, n, 0.2), random_pd(rng, n, 0.2),
                                               4.0 * random_pd(rng, n, 0.2)};
        std::vector<LineWeight> phis;
        for (const auto& o : om) phis.push_back(quadratic_weight(o));
        int compared = 0, agree = 0, skipped = 0;
        for (int k = 0; k < cfg.get_int("split.points"); ++k) {
            const ComplexVector z = chart_point(rng, n, 0.8), w = chart_point(rng, r - 1, 2.0);
            RealVector lam(r);
            for (int i = 0; i < r; ++i) lam(i) = std::exp(phis[i].phi(z)) * (i == 0 ? 1.0 : std::norm(w(i - 1)));
            lam /= lam.sum();
            ComplexMatrix crit = ComplexMatrix::Zero(n, n);
            for (int i = 0; i < r; ++i) crit += ((r + 1) * lam(i) - 1.0) * om[i];
            const double cv = min_eigenvalue(HermitianMatrix(crit));
            if (std::abs(cv) < 1e-3) {
                ++skipped;
                continue;
            }
            const double hv = min_eigenvalue(projectivized_twist_curvature(phis, z, w));
            ++compared;
            if ((cv > 0) == (hv > 0)) ++agree;
        }
        Check c = make("split.cross_check", "sign of the projectivized Hessian against the criterion at sampled points",
                       "the curvature of O(1) twisted on P(E) reduces to the weighted criterion",
                       "agreement at every compared point, at least 20 compared");
        c.measured["compared"] = compared;
        c.measured["agree"] = agree;
        c.measured["skipped_near_zero"] = skipped;
        c.pass = compared >= 20 && agree == compared;
        rep.checks.push_back(c);
    }
    return rep;
}

using SuiteFn = Report (*)(const SuiteConfig&);

struct SuiteEntry {
    const char* name;
    const char* prefix;
    SuiteFn fn;
};

const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> r = {
        {"curvature-identities", "curvature", curvature_identities},
        {"quotient-thresholds", "quotient", quotient_thresholds},
        {"schur", "schur", schur_suite},
        {"extension-flat", "extension", extension_flat},
        {"direct-image", "direct", direct_image},
        {"dual-norm", "dual", dual_norm},
        {"coarea", "coarea", coarea},
        {"obstruction", "obstruction", obstruction},
        {"split-example", "split", split_example},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) n.push_back(e.name);
        return n;
    }();
    return names;
}

Report run_suite(const std::string& name, const SuiteConfig& cfg) {
    for (const auto& e : registry()) {
        if (name != e.name) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Report r = e.fn(cfg);
        r.suite = name;
        r.parameters = cfg.echo(e.prefix);
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw ConfigError("unknown suite '" + name + "'");
}

}  // namespace curvlab

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/suites.hpp"

using namespace curvlab;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string seed;
    std::string tol;
    bool parallel = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "key=value configuration file");
    sub->add_option("--out", o.out, "JSON report path (stdout if omitted); CSV tracks go next to it");
    sub->add_option("--seed", o.seed, "override the seed");
    sub->add_option("--tol", o.tol, "override the positivity tolerance");
    sub->add_flag("--parallel", o.parallel, "use the OpenMP kernels");
    sub->add_option("--set", o.sets, "key=value override, repeatable")->take_all();
}

SuiteConfig build_config(const Options& o) {
    SuiteConfig c;
    if (!o.config.empty()) c.load_file(o.config);
    if (!o.seed.empty()) c.set("seed", o.seed);
    if (!o.tol.empty()) c.set("tol", o.tol);
    if (o.parallel) c.set("parallel", "1");
    for (const auto& s : o.sets) c.parse_assignment(s);
    return c;
}

void write_outputs(const Options& o, const std::vector<Report>& reports) {
    const std::string text = reports_to_json(reports).dump(2) + "\n";
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    const std::filesystem::path out(o.out);
    std::ofstream(out) << text;
    for (const auto& r : reports)
        for (const auto& t : r.tables) {
            std::filesystem::path csv = out;
            csv.replace_filename(out.stem().string() + "_" + t.name + ".csv");
            std::ofstream(csv) << t.to_csv();
        }
}

void summarize(const std::vector<Report>& reports) {
    for (const auto& r : reports)
        for (const auto& c : r.checks)
            std::cerr << (c.pass ? "PASS " : "FAIL ") << r.suite << " " << c.id << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for curvature positivity of Hermitian bundles"};
    app.require_subcommand(1);
    Options opts;
    std::vector<std::string> names = suite_names();
    names.push_back("all");
    for (const auto& n : names) add_common(app.add_subcommand(n, "run the " + n + " suite"), opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const SuiteConfig cfg = build_config(opts);
        const std::string chosen = app.get_subcommands().front()->get_name();
        std::vector<Report> reports;
        if (chosen == "all")
            for (const auto& n : suite_names()) reports.push_back(run_suite(n, cfg));
        else
            reports.push_back(run_suite(chosen, cfg));
        write_outputs(opts, reports);
        summarize(reports);
        return exit_code(reports);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace curvlab {

using Json = nlohmann::ordered_json;

struct ConfigKey {
    std::string name;
    std::string value;  // default
    std::string doc;
};

// Flat key=value configuration. Every key is declared with a default; setting
// an undeclared key or an unparsable value throws ConfigError.
class SuiteConfig {
public:
    SuiteConfig();
    static const std::vector<ConfigKey>& keys();

    void set(const std::string& key, const std::string& value);
    // Lines "key = value"; '#' starts a comment.
    void load_file(const std::string& path);
    void parse_assignment(const std::string& text);

    std::string get(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    unsigned long long seed() const;

    // Keys starting with prefix, plus the global ones.
    Json echo(const std::string& prefix) const;

private:
    std::map<std::string, std::string> values_;
};

struct Check {
    std::string id;
    std::string description;
    std::string claim;
    Json measured = Json::object();
    std::string threshold;
    bool pass = false;
};

struct CsvTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string to_csv() const;
};

struct Report {
    std::string suite;
    Json parameters = Json::object();
    std::vector<Check> checks;
    std::vector<CsvTable> tables;
    bool undetermined = false;
    double wall_time = 0;

    bool pass() const;
    Json to_json() const;
};

const std::vector<std::string>& suite_names();  // excludes "all"

// Runs one named suite. Throws ConfigError for an unknown name.
Report run_suite(const std::string& name, const SuiteConfig& cfg);

// Exit status for a set of reports: 0 pass, 1 failed check, 2 undetermined.
int exit_code(const std::vector<Report>& reports);

Json reports_to_json(const std::vector<Report>& reports);

}  // namespace curvlab

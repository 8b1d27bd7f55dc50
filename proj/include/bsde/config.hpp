#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsde/audits.hpp"
#include "bsde/catalog.hpp"
#include "bsde/harness.hpp"
#include "bsde/solver.hpp"

namespace bsde {

// Configuration failures carry the dotted field path they refer to; the CLI
// maps them to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), field(std::move(field_path)) {}
    std::string field;
};

// Minimal INI-style file: [section] headers, key = value lines, '#' or ';'
// comments. Keys keep their first-seen order inside a section; the canonical
// rendering (sorted sections, original key order) feeds the config hash.
class IniFile {
public:
    static IniFile parse(const std::string& text);
    static IniFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& section, const std::string& key,
                         std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    void erase(const std::string& section, const std::string& key);

    std::string canonical() const;

private:
    struct Section {
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::map<std::string, Section> sections_;
};

struct LatticeSettings {
    double horizon = 1.0;
    std::size_t steps = 64;
    std::size_t dimension = 1;
    std::size_t paths = 10000;
    std::uint64_t seed = 42;
};

struct ExperimentConfig {
    IniFile ini;
    std::string config_hash;

    LatticeSettings lattice;
    std::string problem_name; // catalog entry or "custom"
    std::string xi_spec;      // default/BT/absBT/zero/const:v/expr:...
    double p = 2.0;
    double budget_override = 0.0; // 0 = catalog default

    SolverConfig solver;
    AuditConfig audit;

    // compare
    std::string primed_name;
    std::string primed_xi;
    DriverOrderingMode compare_mode = DriverOrderingMode::Pointwise;
    ConditionSide monotone_side = ConditionSide::Unprimed;

    // minimal
    MinimalSchemeConfig scheme;
    bool maximal = false;

    // gn tabulation
    std::vector<std::size_t> gn_list{1, 2, 4, 8};
    double gn_y_min = -2.0;
    double gn_y_max = 2.0;
    std::size_t gn_y_points = 81;
};

// Parses and validates; throws ConfigError naming the offending field.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& text);

// Applies command-line overrides, revalidates and rehashes.
void apply_override(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                    const std::string& value);

BrownianLattice build_lattice(const ExperimentConfig& cfg);
Problem build_problem(const ExperimentConfig& cfg, const BrownianLattice& lattice);
Problem build_primed_problem(const ExperimentConfig& cfg, const BrownianLattice& lattice);

} // namespace bsde

#include "bsde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bsde/csv.hpp"
#include "bsde/expression.hpp"

namespace bsde {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile file;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("line " + std::to_string(lineno), "empty section name");
            }
            file.sections_[section]; // materialize
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(lineno), "key outside of any [section]");
        }
        file.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return file;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return false;
    for (const auto& [k, v] : it->second.entries) {
        if (k == key) return true;
    }
    return false;
}

std::string IniFile::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    for (const auto& [k, v] : it->second.entries) {
        if (k == key) return v;
    }
    return fallback;
}

std::string IniFile::require(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError(section + "." + key, "required key is missing");
    return get(section, key, "");
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key, "");
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key, "not a number: '" + raw + "'");
    }
}

std::size_t IniFile::get_size(const std::string& section, const std::string& key,
                              std::size_t fallback) const {
    const double v = get_double(section, key, static_cast<double>(fallback));
    if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError(section + "." + key, "not a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
}

std::uint64_t IniFile::get_u64(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key, "");
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key, "not an unsigned integer: '" + raw + "'");
    }
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key, "");
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw ConfigError(section + "." + key, "not a boolean: '" + raw + "'");
}

void IniFile::set(const std::string& section, const std::string& key, const std::string& value) {
    auto& entries = sections_[section].entries;
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

void IniFile::erase(const std::string& section, const std::string& key) {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return;
    auto& entries = it->second.entries;
    entries.erase(std::remove_if(entries.begin(), entries.end(),
                                 [&](const auto& kv) { return kv.first == key; }),
                  entries.end());
}

std::string IniFile::canonical() const {
    std::string out;
    for (const auto& [name, section] : sections_) {
        out += "[" + name + "]\n";
        for (const auto& [k, v] : section.entries) out += k + " = " + v + "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : raw) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

ContinuityModulus modulus_from_config(const IniFile& ini) {
    const std::string kind = ini.get("custom_generator", "phi", "linear");
    const double a = ini.get_double("custom_generator", "phi_a", 1.0);
    const double b = ini.get_double("custom_generator", "phi_b", kind == "linear" ? 0.0 : 1.0);
    ContinuityModulus m;
    m.a = a;
    m.b = b;
    m.name = kind;
    if (kind == "linear") {
        m.phi = [](double x) { return x; };
    } else if (kind == "sqrt") {
        m.phi = [](double x) { return std::sqrt(x); };
    } else if (kind == "sqrt_clamped") {
        m.phi = [](double x) { return std::sqrt(std::min(x, 1.0)); };
    } else {
        throw ConfigError("custom_generator.phi", "unknown modulus '" + kind + "'");
    }
    return m;
}

void validate(ExperimentConfig& cfg) {
    if (!(cfg.lattice.horizon > 0.0) || !std::isfinite(cfg.lattice.horizon)) {
        throw ConfigError("lattice.T", "must be a positive finite horizon");
    }
    if (cfg.lattice.steps < 1) throw ConfigError("lattice.steps", "must be >= 1");
    if (cfg.lattice.dimension < 1) throw ConfigError("lattice.d", "must be >= 1");
    if (cfg.lattice.paths < 1) throw ConfigError("lattice.paths", "must be >= 1");
    if (!(cfg.p > 1.0)) throw ConfigError("problem.p", "must be > 1");
    if (cfg.budget_override < 0.0) throw ConfigError("problem.M", "must be positive");
    if (!(cfg.solver.picard_tolerance > 0.0)) {
        throw ConfigError("solver.tolerance", "must be positive");
    }
    if (cfg.solver.max_picard_iterations < 1) {
        throw ConfigError("solver.max_iterations", "must be >= 1");
    }
    if (cfg.audit.probes < 1) throw ConfigError("audit.probes", "must be >= 1");
    if (cfg.scheme.n_max < 1) throw ConfigError("minimal.n_max", "must be >= 1");
    if (cfg.gn_y_points < 2) throw ConfigError("gn.y_points", "must be >= 2");
    if (!(cfg.gn_y_max > cfg.gn_y_min)) throw ConfigError("gn.y_max", "must exceed gn.y_min");

    const bool custom = cfg.problem_name == "custom";
    if (!custom) {
        const auto names = catalog_names();
        if (std::find(names.begin(), names.end(), cfg.problem_name) == names.end()) {
            throw ConfigError("problem.catalog",
                              "unknown catalog name '" + cfg.problem_name + "'");
        }
    } else if (!cfg.ini.has("custom_generator", "expr")) {
        throw ConfigError("custom_generator.expr", "required for catalog = custom");
    }
    if (!cfg.primed_name.empty() && cfg.primed_name != "custom") {
        const auto names = catalog_names();
        if (std::find(names.begin(), names.end(), cfg.primed_name) == names.end()) {
            throw ConfigError("compare.catalog_primed",
                              "unknown catalog name '" + cfg.primed_name + "'");
        }
    }
}

void populate(ExperimentConfig& cfg) {
    const IniFile& ini = cfg.ini;
    cfg.lattice.horizon = ini.get_double("lattice", "T", 1.0);
    cfg.lattice.steps = ini.get_size("lattice", "steps", 64);
    cfg.lattice.dimension = ini.get_size("lattice", "d", 1);
    cfg.lattice.paths = ini.get_size("lattice", "paths", 10000);
    cfg.lattice.seed = ini.get_u64("lattice", "seed", 42);

    cfg.problem_name = ini.get("problem", "catalog", "zero");
    cfg.xi_spec = ini.get("problem", "xi", "default");
    cfg.p = ini.get_double("problem", "p", 2.0);
    cfg.budget_override = ini.get_double("problem", "M", 0.0);

    cfg.solver.basis.degree = ini.get_size("solver", "degree", 3);
    cfg.solver.basis.cross_terms = ini.get_bool("solver", "cross_terms", true);
    cfg.solver.picard_tolerance = ini.get_double("solver", "tolerance", 1e-8);
    cfg.solver.max_picard_iterations = ini.get_size("solver", "max_iterations", 60);
    const std::string subs = ini.get("solver", "subintervals", "auto");
    if (subs == "auto") {
        cfg.solver.subintervals = 0;
    } else {
        cfg.solver.subintervals = ini.get_size("solver", "subintervals", 0);
        if (cfg.solver.subintervals < 1) {
            throw ConfigError("solver.subintervals", "must be 'auto' or a positive integer");
        }
    }
    const std::string cp = ini.get("solver", "c_p", "auto");
    cfg.solver.c_p = cp == "auto" ? 0.0 : ini.get_double("solver", "c_p", 0.0);
    cfg.solver.workers = static_cast<unsigned>(ini.get_size("solver", "workers", 1));
    cfg.solver.stagnation_floor = ini.get_double("solver", "stagnation_floor", 1e-4);

    cfg.audit.probes = ini.get_size("audit", "probes", 4096);
    cfg.audit.probe_scale = ini.get_double("audit", "probe_scale", 3.0);
    cfg.audit.tol = ini.get_double("audit", "tol", 1e-9);
    cfg.audit.seed = ini.get_u64("audit", "seed", cfg.lattice.seed);

    cfg.primed_name = ini.get("compare", "catalog_primed", "");
    cfg.primed_xi = ini.get("compare", "xi_primed", "default");
    const std::string mode = ini.get("compare", "mode", "pointwise");
    if (mode == "pointwise") {
        cfg.compare_mode = DriverOrderingMode::Pointwise;
    } else if (mode == "along_solution") {
        cfg.compare_mode = DriverOrderingMode::AlongSolution;
    } else {
        throw ConfigError("compare.mode", "expected 'pointwise' or 'along_solution'");
    }
    const std::string side = ini.get("compare", "h34_side", "unprimed");
    if (side == "unprimed") {
        cfg.monotone_side = ConditionSide::Unprimed;
    } else if (side == "primed") {
        cfg.monotone_side = ConditionSide::Primed;
    } else {
        throw ConfigError("compare.h34_side", "expected 'unprimed' or 'primed'");
    }

    cfg.scheme.n_max = ini.get_size("minimal", "n_max", 8);
    cfg.scheme.search.half_width = ini.get_double("minimal", "box_half_width", 8.0);
    cfg.scheme.search.resolution = ini.get_size("minimal", "box_resolution", 33);
    cfg.scheme.search.rounds = ini.get_size("minimal", "refine_rounds", 3);
    cfg.scheme.eps_cmp = ini.get_double("minimal", "eps_cmp", 0.0);
    cfg.maximal = ini.get_bool("minimal", "maximal", false);

    if (ini.has("gn", "n_list")) {
        cfg.gn_list.clear();
        for (const auto& tok : split_list(ini.get("gn", "n_list", ""))) {
            try {
                cfg.gn_list.push_back(std::stoul(tok));
            } catch (const std::exception&) {
                throw ConfigError("gn.n_list", "not an integer list");
            }
        }
        if (cfg.gn_list.empty()) throw ConfigError("gn.n_list", "empty list");
    }
    cfg.gn_y_min = ini.get_double("gn", "y_min", -2.0);
    cfg.gn_y_max = ini.get_double("gn", "y_max", 2.0);
    cfg.gn_y_points = ini.get_size("gn", "y_points", 81);

    validate(cfg);
    // Worker count is operational: it cannot change any emitted number, so it
    // stays out of the hash that tags result rows.
    IniFile hashed = cfg.ini;
    hashed.erase("solver", "workers");
    cfg.config_hash = fnv1a_hex(hashed.canonical());
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.ini = IniFile::parse(text);
    populate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    ExperimentConfig cfg;
    cfg.ini = IniFile::parse_file(path);
    populate(cfg);
    return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                    const std::string& value) {
    cfg.ini.set(section, key, value);
    populate(cfg);
}

BrownianLattice build_lattice(const ExperimentConfig& cfg) {
    return BrownianLattice(TimeGrid(cfg.lattice.horizon, cfg.lattice.steps),
                           cfg.lattice.dimension, cfg.lattice.paths, cfg.lattice.seed,
                           cfg.solver.workers);
}

namespace {

std::vector<double> xi_from_spec(const std::string& spec, const BrownianLattice& lattice) {
    if (spec.rfind("expr:", 0) == 0) {
        const Expression expr = Expression::parse(spec.substr(5));
        std::vector<double> xi(lattice.paths());
        const std::size_t last = lattice.grid().points() - 1;
        for (std::size_t p = 0; p < lattice.paths(); ++p) {
            Expression::Context ctx;
            ctx.terminal = lattice.state(p, last);
            ctx.horizon = lattice.grid().horizon();
            xi[p] = expr.eval(ctx);
        }
        return xi;
    }
    return make_xi(spec, lattice);
}

Problem build_named_or_custom(const ExperimentConfig& cfg, const BrownianLattice& lattice,
                              const std::string& name, const std::string& xi_spec) {
    CatalogOptions options;
    options.M = cfg.budget_override;
    options.xi = xi_spec.rfind("expr:", 0) == 0 ? "default" : xi_spec;
    if (name != "custom") {
        Problem problem = make_catalog_problem(name, lattice, cfg.p, options);
        if (xi_spec.rfind("expr:", 0) == 0) {
            problem.xi = xi_from_spec(xi_spec, lattice);
            problem.xi_label = xi_spec;
            problem.xi_builder = [xi_spec](const BrownianLattice& l) {
                return xi_from_spec(xi_spec, l);
            };
        }
        return problem;
    }

    const IniFile& ini = cfg.ini;
    const Expression expr = Expression::parse(ini.require("custom_generator", "expr"));
    const double u_const = ini.get_double("custom_generator", "u", 0.0);
    const double v_const = ini.get_double("custom_generator", "v", 0.0);
    const double f_const = ini.get_double("custom_generator", "f", 0.0);
    if (u_const < 0.0) throw ConfigError("custom_generator.u", "must be nonnegative");
    if (v_const < 0.0) throw ConfigError("custom_generator.v", "must be nonnegative");
    if (f_const < 0.0) throw ConfigError("custom_generator.f", "must be nonnegative");

    GeneratorSpec g;
    g.name = "custom";
    g.z_dim = lattice.dimension();
    const std::size_t points = lattice.grid().points();
    g.u = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), points, u_const));
    g.v = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), points, v_const));
    g.f = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), points, f_const));
    const double T = lattice.grid().horizon();
    const double default_budget = (u_const + v_const * v_const) * T;
    g.budget_bound = cfg.budget_override > 0.0
                         ? cfg.budget_override
                         : (default_budget > 0.0 ? default_budget : 1.0);
    g.modulus = modulus_from_config(ini);
    g.uses_y = expr.references("y");
    g.uses_z = expr.references("z");
    for (const auto& tag : split_list(ini.get("custom_generator", "profile", "H5,H6"))) {
        try {
            g.profile.insert(assumption_from_string(tag));
        } catch (const std::exception&) {
            throw ConfigError("custom_generator.profile", "unknown assumption tag '" + tag + "'");
        }
    }

    auto u_p = g.u;
    auto v_p = g.v;
    auto f_p = g.f;
    const TimeGrid* grid = &lattice.grid();
    const double horizon = grid->horizon();
    std::vector<double> times = grid->times();
    g.eval = [expr, u_p, v_p, f_p, times, horizon](std::size_t path, std::size_t t, double y,
                                                   std::span<const double> z) {
        Expression::Context ctx;
        ctx.y = y;
        ctx.z = z;
        ctx.t = times[t];
        ctx.u = u_p->at(path, t);
        ctx.v = v_p->at(path, t);
        ctx.f = f_p->at(path, t);
        ctx.horizon = horizon;
        return expr.eval(ctx);
    };

    Problem problem;
    problem.generator = std::move(g);
    problem.p = cfg.p;
    problem.name = "custom";
    problem.xi_label = xi_spec == "default" ? "BT" : xi_spec;
    problem.xi = xi_from_spec(problem.xi_label, lattice);
    const std::string label = problem.xi_label;
    problem.xi_builder = [label](const BrownianLattice& l) { return xi_from_spec(label, l); };
    return problem;
}

} // namespace

Problem build_problem(const ExperimentConfig& cfg, const BrownianLattice& lattice) {
    return build_named_or_custom(cfg, lattice, cfg.problem_name, cfg.xi_spec);
}

Problem build_primed_problem(const ExperimentConfig& cfg, const BrownianLattice& lattice) {
    if (cfg.primed_name.empty()) {
        throw ConfigError("compare.catalog_primed", "required for this command");
    }
    return build_named_or_custom(cfg, lattice, cfg.primed_name, cfg.primed_xi);
}

} // namespace bsde

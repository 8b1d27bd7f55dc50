#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bsde/cli.hpp"
#include "bsde/config.hpp"
#include "bsde/csv.hpp"
#include "bsde/expression.hpp"

using namespace bsde;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path dir = fs::temp_directory_path() / "bsde_cli_tests";
    fs::create_directories(dir);
    const fs::path file = dir / name;
    std::ofstream out(file);
    out << body;
    return file;
}

const char* kSolveConfig = R"(# smoke experiment
[lattice]
T = 1.0
steps = 16
d = 1
paths = 600
seed = 42

[problem]
catalog = linear
xi = BT
p = 2.0

[solver]
degree = 3
workers = 1
)";

} // namespace

TEST_CASE("expression grammar evaluates the documented forms") {
    std::vector<double> z{3.0, 4.0};
    Expression::Context ctx;
    ctx.y = -2.0;
    ctx.z = z;
    ctx.u = 0.5;
    ctx.t = 0.25;

    CHECK(Expression::parse("u*abs(y) + z").eval(ctx) == doctest::Approx(6.0));
    CHECK(Expression::parse("z1 - z2").eval(ctx) == doctest::Approx(-1.0));
    CHECK(Expression::parse("min(abs(y), 1) + max(t, 0.5)").eval(ctx) == doctest::Approx(1.5));
    CHECK(Expression::parse("y^2").eval(ctx) == doctest::Approx(4.0));
    CHECK(Expression::parse("sqrt(min(abs(y),1))").eval(ctx) == doctest::Approx(1.0));
    CHECK(Expression::parse("-y*2").eval(ctx) == doctest::Approx(4.0));
    CHECK(Expression::parse("sign(y)").eval(ctx) == doctest::Approx(-1.0));
    CHECK(Expression::parse("pow(2, 3)").eval(ctx) == doctest::Approx(8.0));

    CHECK(Expression::parse("u*y + v*z").references("z"));
    CHECK(Expression::parse("z1 + 1").references("z"));
    CHECK_FALSE(Expression::parse("u*y").references("z"));

    CHECK_THROWS_AS(Expression::parse("y +"), std::invalid_argument);
    CHECK_THROWS_AS(Expression::parse("frob(y)").eval(ctx), std::invalid_argument);
    CHECK_THROWS_AS(Expression::parse("q").eval(ctx), std::invalid_argument);
}

TEST_CASE("ini parsing, canonicalization and hashing") {
    auto ini = IniFile::parse("[b]\nk = 1\n[a]\nx = 2 # comment\ny = hello\n");
    CHECK(ini.get("a", "x", "") == "2");
    CHECK(ini.get("a", "y", "") == "hello");
    CHECK(ini.get_double("b", "k", 0.0) == 1.0);
    // Canonical form sorts sections, keeps key order.
    CHECK(ini.canonical() == "[a]\nx = 2\ny = hello\n[b]\nk = 1\n");
    CHECK(fnv1a_hex(ini.canonical()).size() == 16);

    CHECK_THROWS_AS(IniFile::parse("key = 1\n"), ConfigError);   // outside section
    CHECK_THROWS_AS(IniFile::parse("[s]\nnoequals\n"), ConfigError);
}

TEST_CASE("config validation names the offending field") {
    try {
        parse_experiment_config("[problem]\np = 1.0\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "problem.p");
        CHECK(std::string(e.what()).find("problem.p") != std::string::npos);
    }
    try {
        parse_experiment_config("[problem]\ncatalog = frobnicate\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "problem.catalog");
    }
    CHECK_THROWS_AS(parse_experiment_config("[lattice]\nT = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("[lattice]\nT = inf\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("[solver]\nsubintervals = 0\n"), ConfigError);
}

TEST_CASE("custom generator from the expression grammar") {
    auto cfg = parse_experiment_config(R"(
[lattice]
steps = 8
paths = 100
seed = 7

[problem]
catalog = custom
xi = expr:abs(b)

[custom_generator]
expr = u*abs(y) + v*z
u = 0.5
v = 1.0
profile = H1,H2
)");
    auto lattice = build_lattice(cfg);
    auto problem = build_problem(cfg, lattice);
    CHECK(problem.generator.uses_y);
    CHECK(problem.generator.uses_z);
    CHECK(problem.generator.claims(Assumption::H1));
    std::vector<double> z{2.0};
    CHECK(problem.generator(0, 3, -3.0, z) == doctest::Approx(0.5 * 3.0 + 2.0));
    const std::size_t last = lattice.grid().points() - 1;
    for (std::size_t p = 0; p < 5; ++p) {
        CHECK(problem.xi[p] == doctest::Approx(std::abs(lattice.value(p, last))));
    }
    // Budget default: (u + v^2) * T = 1.5.
    CHECK(problem.generator.budget_bound == doctest::Approx(1.5));
}

TEST_CASE("cli solve writes deterministic tables and honors worker override") {
    const auto config = write_config("solve.ini", kSolveConfig);
    const fs::path out1 = fs::temp_directory_path() / "bsde_cli_tests" / "out1";
    const fs::path out2 = fs::temp_directory_path() / "bsde_cli_tests" / "out2";
    fs::remove_all(out1);
    fs::remove_all(out2);

    CliOptions a;
    a.command = "solve";
    a.config_path = config.string();
    a.out_dir = out1.string();
    CHECK(run_cli(a) == kExitPass);

    CliOptions b = a;
    b.out_dir = out2.string();
    b.workers_override = 4;
    CHECK(run_cli(b) == kExitPass);

    for (const char* name : {"y_summary.csv", "diagnostics.csv", "solve_flags.csv"}) {
        INFO(name);
        CHECK(read_file(out1 / name) == read_file(out2 / name));
    }
    const std::string summary = read_file(out1 / "y_summary.csv");
    CHECK(summary.rfind("schema_version,config_hash,seed,t_index,t,mean_y", 0) == 0);
    // meta.txt carries the timestamps, tables must not.
    CHECK(summary.find("timestamp") == std::string::npos);
    CHECK(read_file(out1 / "meta.txt").find("wall_ms") != std::string::npos);
}

TEST_CASE("cli exit codes: config error and verdict fail") {
    const auto bad = write_config("bad.ini", "[problem]\np = 1.0\n");
    CliOptions opts;
    opts.command = "solve";
    opts.config_path = bad.string();
    opts.out_dir = (fs::temp_directory_path() / "bsde_cli_tests" / "outbad").string();
    CHECK(run_cli(opts) == kExitConfigError);

    // Mis-declared profile fails the audit verdict.
    const auto audit_cfg = write_config("audit.ini", R"(
[lattice]
steps = 16
paths = 300
seed = 11

[problem]
catalog = quadz_bad

[audit]
probes = 500
)");
    CliOptions audit;
    audit.command = "audit";
    audit.config_path = audit_cfg.string();
    audit.out_dir = (fs::temp_directory_path() / "bsde_cli_tests" / "outaudit").string();
    CHECK(run_cli(audit) == kExitVerdictFail);

    CliOptions unknown;
    unknown.command = "frobnicate";
    unknown.config_path = audit_cfg.string();
    CHECK(run_cli(unknown) == kExitConfigError);
}

TEST_CASE("cli seed override changes the hash and the results") {
    const auto config = write_config("solve2.ini", kSolveConfig);
    const fs::path outA = fs::temp_directory_path() / "bsde_cli_tests" / "outA";
    const fs::path outB = fs::temp_directory_path() / "bsde_cli_tests" / "outB";
    CliOptions a;
    a.command = "solve";
    a.config_path = config.string();
    a.out_dir = outA.string();
    REQUIRE(run_cli(a) == kExitPass);
    CliOptions b = a;
    b.out_dir = outB.string();
    b.seed_override = 777;
    REQUIRE(run_cli(b) == kExitPass);
    CHECK(read_file(outA / "y_summary.csv") != read_file(outB / "y_summary.csv"));
    CHECK(read_file(outB / "config_echo.ini").find("seed = 777") != std::string::npos);
}

TEST_CASE("cli partition and gn commands complete") {
    const auto config = write_config("part.ini", R"(
[lattice]
steps = 32
paths = 40
seed = 5

[problem]
catalog = sqrty

[solver]
subintervals = 4

[gn]
n_list = 1,2
y_points = 11
)");
    CliOptions part;
    part.command = "partition";
    part.config_path = config.string();
    part.out_dir = (fs::temp_directory_path() / "bsde_cli_tests" / "outpart").string();
    CHECK(run_cli(part) == kExitPass);
    CHECK(read_file(fs::path(part.out_dir) / "partition.csv").find("grid_index") !=
          std::string::npos);

    CliOptions gn = part;
    gn.command = "gn";
    gn.out_dir = (fs::temp_directory_path() / "bsde_cli_tests" / "outgn").string();
    CHECK(run_cli(gn) == kExitPass);
    const std::string table = read_file(fs::path(gn.out_dir) / "gn.csv");
    CHECK(table.find("g_n") != std::string::npos);
}

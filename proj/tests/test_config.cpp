#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "sturmcert/config.hpp"
#include "sturmcert/error.hpp"

using namespace sturmcert;

namespace {

std::string read_sample(const std::string& name) {
    std::ifstream in(std::string(STURMCERT_SAMPLES_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* minimal = R"(
[boundary]
alpha = 1
beta = 0
gamma = 1
delta = 0

[cone]
a = 1/4
b = 3/4

[piece]
region = true
f = 1
)";

int error_line(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(Config, MinimalDirichlet) {
    auto cfg = parse_config(minimal);
    ASSERT_TRUE(cfg.boundary);
    EXPECT_EQ(*cfg.boundary, BoundaryParams::dirichlet());
    EXPECT_EQ(cfg.a, 0.25);
    EXPECT_EQ(cfg.grid_n, 401u);
    ASSERT_EQ(cfg.pieces.size(), 1u);
    EXPECT_EQ(cfg.pieces[0].label, "piece1");
    auto p = build_problem(cfg, 41);
    EXPECT_EQ(p.cone().c, 0.25);
    EXPECT_EQ(f_eval(p.nonlinearity(), 0.3, 7.0), 1.0);
}

TEST(Config, AdmissibilityViolationAtParseTime) {
    std::string text = minimal;
    text.replace(text.find("b = 3/4"), 7, "b = 1");
    try {
        (void)parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 10);
        EXPECT_NE(std::string(e.what()).find("b < 1 + delta/gamma"), std::string::npos) << e.what();
    }
}

TEST(Config, StepExampleRoundTrips) {
    auto cfg = parse_config(read_sample("step_certified.conf"));
    ASSERT_EQ(cfg.curves.size(), 1u);
    EXPECT_EQ(cfg.curves[0].kind, CurveKind::inviable);
    EXPECT_EQ(*cfg.curves[0].eps, 0.05);
    EXPECT_EQ(cfg.certify.branch, 'b');
    auto text = serialize_config(cfg);
    auto again = parse_config(text);
    EXPECT_EQ(again, cfg);
    EXPECT_EQ(serialize_config(again), text);
}

TEST(Config, EverySampleRoundTrips) {
    for (const auto& entry : std::filesystem::directory_iterator(STURMCERT_SAMPLES_DIR)) {
        if (entry.path().extension() != ".conf") continue;
        auto cfg = load_config(entry.path());
        EXPECT_EQ(parse_config(serialize_config(cfg), entry.path().parent_path()), cfg) << entry.path();
    }
}

TEST(Config, DiagnosticsCarryLines) {
    EXPECT_EQ(error_line("[boundary]\nalpha = 1\nalpha = 2\n"), 3);
    EXPECT_EQ(error_line("alpha = 1\n"), 1);
    EXPECT_EQ(error_line("[boundary]\nalpha\n"), 2);
    EXPECT_EQ(error_line(std::string(minimal) + "\n[piece]\nregion = u < 1\nf = 2 +\n"), 18);
    EXPECT_EQ(error_line(std::string(minimal) + "\n[piece]\nregion = u + 1\nf = 2\n"), 17);
    EXPECT_EQ(error_line(std::string(minimal) + "[grid]\nn = 1\n"), 16);
    EXPECT_EQ(error_line(std::string(minimal) + "[grid]\nspacing = 3\n"), 16);
    EXPECT_EQ(error_line(std::string(minimal) + "[mystery]\n"), 15);
    EXPECT_EQ(error_line(std::string(minimal) + "[cone]\na = 0.1\nb = 0.2\n"), 15);
    EXPECT_EQ(error_line("[boundary]\nalpha = 1\nbeta = 0\ngamma = 1\n"), 1);  // delta missing
    EXPECT_EQ(error_line(std::string(minimal) + "[curve]\ngamma = 1\nkind = inviable\n"), 15);
    EXPECT_EQ(error_line(std::string(minimal) + "[curve]\ngamma = 1\nkind = maybe\n"), 17);
    EXPECT_EQ(error_line(std::string(minimal) + "[solve]\nmethod = bisection\n"), 16);
    EXPECT_THROW((void)parse_config("[cone]\na = 0.25\nb = 0.75\n[piece]\nregion = true\nf = 1\n"), ConfigError);
}

TEST(Config, CustomKernelAndTable) {
    auto dir = std::filesystem::temp_directory_path() / "sturmcert_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream table(dir / "g.txt");
        table << "# s g\n0 1\n0.5, 2\n1 1\n";
    }
    std::string text = R"(
[kernel]
k = min(t, s) * (1 - max(t, s))
phi = s * (1 - s)
c = 1/4

[cone]
a = 0.25
b = 0.75

[weight]
table = g.txt

[piece]
region = u < 1
f = 1

[piece]
region = u >= 1
f = 2 + u
)";
    auto cfg = parse_config(text, dir);
    ASSERT_TRUE(cfg.kernel);
    EXPECT_EQ(cfg.table_s.size(), 3u);
    EXPECT_EQ(parse_config(serialize_config(cfg), dir), cfg);
    auto p = build_problem(cfg, 101);
    EXPECT_DOUBLE_EQ(p.weight()(0.25), 1.5);
    EXPECT_DOUBLE_EQ(p.kernel()(0.25, 0.5), 0.125);
    EXPECT_FALSE(p.kernel().is_green);
    EXPECT_DOUBLE_EQ(f_eval(p.nonlinearity(), 0.5, 2.0), 4.0);
    EXPECT_THROW((void)parse_config(text, dir / "missing"), ConfigError);
}

TEST(Config, OptionsCarryOver) {
    auto cfg = parse_config(read_sample("step_certified.conf"));
    auto co = certify_options(cfg);
    EXPECT_EQ(co.rho1, 1.0);
    EXPECT_EQ(co.rho2, 5.0);
    EXPECT_EQ(co.eps, 0.1);
    EXPECT_EQ(co.branch, 'b');
    auto so = solve_options(cfg);
    EXPECT_EQ(so.method, SolveMethod::automatic);
    auto init = initial_guess(cfg, Grid::uniform(5));
    EXPECT_DOUBLE_EQ(init[2], 1.2);
    EXPECT_THROW((void)certify_options(parse_config(minimal)), ConfigError);
}

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "sturmcert/certifier.hpp"
#include "sturmcert/error.hpp"

using namespace sturmcert;

namespace {

Nonlinearity step_f() {
    auto nl = Nonlinearity::step(1.15, 1.0, 81.0);
    nl.curves[0].declared_kind = CurveKind::inviable;
    nl.curves[0].inviable = InviableData{0.05, [](double) { return 0.5; }};
    return nl;
}

Problem dirichlet(Nonlinearity nl, Weight g = Weight(), std::size_t n = 401) {
    return Problem(make_green_kernel(BoundaryParams::dirichlet(), 0.25, 0.75), std::move(g), std::move(nl),
                   Grid::uniform(n));
}

CertifyOptions step_options() {
    CertifyOptions o;
    o.rho1 = 1.0;
    o.rho2 = 5.0;
    o.eps = 0.1;
    o.branch = 'b';
    return o;
}

}  // namespace

TEST(Constants, DirichletOracles) {
    auto start = std::chrono::steady_clock::now();
    auto k = make_green_kernel(BoundaryParams::dirichlet(), 0.25, 0.75);
    auto grid = Grid::uniform(401);
    double m = compute_m(k, Weight(), grid);
    double M = compute_M(k, Weight(), k.cone, grid);
    EXPECT_NEAR(m / 8.0 - 1.0, 0.0, 1e-5);
    EXPECT_NEAR(M / 16.0 - 1.0, 0.0, 1e-4);
    EXPECT_EQ(k.cone.c, 0.25);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
}

TEST(Constants, SimpsonOracleForNonconstantWeight) {
    auto bc = BoundaryParams{2, 0.5, 3, 1};
    auto k = make_green_kernel(bc, 0.2, 0.9);
    Weight g([](double s) { return 1 + s * s; });
    auto grid = Grid::uniform(801);
    double sup = 0.0, inf = 1e300;
    for (int i = 0; i <= 400; ++i) {
        double t = i / 400.0;
        auto h = [&](double s) { return green_eval(bc, t, s) * g(s); };
        sup = std::max(sup, oracle::simpson(h, 0, t) + oracle::simpson(h, t, 1));
        if (t >= 0.2 && t <= 0.9) {
            double lo = std::max(0.2, std::min(t, 0.9));
            inf = std::min(inf, oracle::simpson(h, 0.2, lo) + oracle::simpson(h, lo, 0.9));
        }
    }
    EXPECT_NEAR(compute_m(k, g, grid) * sup, 1.0, 1e-5);
    EXPECT_NEAR(compute_M(k, g, k.cone, grid) * inf, 1.0, 1e-5);
}

TEST(Constants, ScaleWithWeight) {
    auto k = make_green_kernel(BoundaryParams{1, 0.3, 1, 0.2}, 0.25, 0.75);
    auto grid = Grid::uniform(401);
    Weight g([](double s) { return 1 + std::sin(3 * s); });
    double m1 = compute_m(k, g, grid), M1 = compute_M(k, g, k.cone, grid);
    double m2 = compute_m(k, g.scaled(2.0), grid), M2 = compute_M(k, g.scaled(2.0), k.cone, grid);
    EXPECT_NEAR(m2 / (0.5 * m1), 1.0, 1e-10);
    EXPECT_NEAR(M2 / (0.5 * M1), 1.0, 1e-10);
}

TEST(Constants, DegenerateWeight) {
    auto k = make_green_kernel(BoundaryParams::dirichlet(), 0.25, 0.75);
    EXPECT_THROW((void)compute_m(k, Weight::constant(0.0), Grid::uniform(11)), DegenerateError);
    EXPECT_THROW((void)dirichlet(Nonlinearity::constant(1), Weight::constant(0.0), 11), DegenerateError);
}

TEST(Certify, StepProblemBranchB) {
    auto p = dirichlet(step_f());
    auto cert = certify(p, step_options());
    ASSERT_TRUE(cert.certified());
    EXPECT_EQ(cert.branch, 'b');
    EXPECT_NEAR(cert.m, 8.0, 8e-5);
    EXPECT_NEAR(cert.M_ab, 16.0, 16e-4);
    EXPECT_NEAR(cert.f_upper_at_rho.value, oracle::step_upper(1.15, 1, 81, 1.0, 0.1), 1e-6);
    EXPECT_NEAR(cert.f_lower_at_rho.value, oracle::step_lower(1.15, 1, 81, 5.0, 0.1, 0.25), 1e-6);
    EXPECT_EQ(cert.annulus, (std::pair{1.0, 5.0}));
    ASSERT_EQ(cert.curve_reports.size(), 1u);
    EXPECT_EQ(cert.curve_reports[0].classified, CurveKind::inviable);
    EXPECT_EQ(cert.conditions.size(), 4u);
}

TEST(Certify, WithoutHintFindsTheCertifyingBranch) {
    auto o = step_options();
    o.branch.reset();
    auto cert = certify(dirichlet(step_f()), o);
    EXPECT_TRUE(cert.certified());
    EXPECT_EQ(cert.branch, 'b');
}

TEST(Certify, SublinearProblemBranchA) {
    Nonlinearity nl;
    nl.pieces.push_back({[](double, double) { return true; }, [](double, double u) { return 10 * std::sqrt(u); },
                         "sqrt"});
    CertifyOptions o;
    o.rho1 = 0.01;
    o.rho2 = 100;
    o.eps = 0.001;
    auto cert = certify(dirichlet(nl), o);
    EXPECT_TRUE(cert.certified());
    EXPECT_EQ(cert.branch, 'a');
    o.branch = 'b';
    EXPECT_FALSE(certify(dirichlet(nl), o).certified());
}

TEST(Certify, ZeroNonlinearityIsNotCertified) {
    auto o = step_options();
    o.branch.reset();
    auto cert = certify(dirichlet(Nonlinearity::constant(0.0)), o);
    EXPECT_FALSE(cert.certified());
    EXPECT_EQ(to_json(cert)["verdict"], "not_certified");
}

TEST(Certify, UncoveredCurveBlocksCertificate) {
    auto nl = step_f();
    nl.curves[0].inviable->psi = [](double) { return 100.0; };  // too large for either inequality
    auto cert = certify(dirichlet(nl), step_options());
    EXPECT_FALSE(cert.certified());
    EXPECT_FALSE(cert.curve_reports[0].admissible);
}

TEST(Certify, ArgumentErrors) {
    auto p = dirichlet(step_f(), Weight(), 41);
    auto o = step_options();
    o.rho2 = 1.0;
    EXPECT_THROW((void)certify(p, o), DomainError);
    o = step_options();
    o.rho1 = -1;
    EXPECT_THROW((void)certify(p, o), DomainError);
    o = step_options();
    o.eps = 0;
    EXPECT_THROW((void)certify(p, o), DomainError);
    o = step_options();
    o.branch = 'a';
    o.rho2 = 2.0;  // rho1 / c = 4 > 2
    EXPECT_THROW((void)certify(p, o), DomainError);
    o = step_options();
    o.rho1 = 5;
    o.rho2 = 1;
    o.branch.reset();
    EXPECT_THROW((void)certify(p, o), DomainError);
}

TEST(Certify, JsonCarriesTheRecord) {
    auto cert = certify(dirichlet(step_f()), step_options());
    auto j = to_json(cert);
    EXPECT_EQ(j["verdict"], "certified");
    EXPECT_EQ(j["branch"], "b");
    EXPECT_DOUBLE_EQ(j["f_upper_at_rho"]["value"].get<double>(), cert.f_upper_at_rho.value);
    EXPECT_EQ(j["settings"]["grid_nodes"], 401);
    EXPECT_DOUBLE_EQ(j["settings"]["margin"].get<double>(), 1e-8);
    EXPECT_EQ(j["conditions"].size(), 4u);
    EXPECT_EQ(j["curve_reports"][0]["inviability"]["inequality"], 2);
    EXPECT_EQ(j.dump(), to_json(certify(dirichlet(step_f()), step_options())).dump());
}

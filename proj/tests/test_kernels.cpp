#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sturmcert/error.hpp"
#include "sturmcert/kernels.hpp"

using namespace sturmcert;

TEST(Green, DirichletClosedFormSymmetryDominance) {
    const auto bc = BoundaryParams::dirichlet();
    auto grid = Grid::uniform(101);
    for (double t : grid.nodes()) {
        for (double s : grid.nodes()) {
            double g = green_eval(bc, t, s);
            EXPECT_NEAR(g, oracle::dirichlet_green(t, s), 1e-12);
            EXPECT_NEAR(g, green_eval(bc, s, t), 1e-12);
            EXPECT_LE(g, green_eval(bc, s, s) + 1e-15);
        }
    }
}

// For fixed s, G(., s) is piecewise linear, meets both boundary conditions, and its slope drops by 1 at t = s.
class GreenBvp : public ::testing::TestWithParam<BoundaryParams> {};

TEST_P(GreenBvp, SolvesTheBoundaryValueProblem) {
    const auto bc = GetParam();
    const double h = 1e-6;
    for (double s : {0.1, 0.37, 0.5, 0.8}) {
        auto G = [&](double t) { return green_eval(bc, t, s); };
        double d0 = (G(h) - G(0)) / h;
        double d1 = (G(1) - G(1 - h)) / h;
        EXPECT_NEAR(bc.alpha * G(0) - bc.beta * d0, 0.0, 1e-8);
        EXPECT_NEAR(bc.gamma * G(1) + bc.delta * d1, 0.0, 1e-8);
        double left = (G(s) - G(s - h)) / h, right = (G(s + h) - G(s)) / h;
        EXPECT_NEAR(right - left, -1.0, 1e-6);
        // Linearity on each side: the midpoint equals the chord.
        EXPECT_NEAR(G(s / 2), 0.5 * (G(0) + G(s)), 1e-12);
        EXPECT_NEAR(G((1 + s) / 2), 0.5 * (G(s) + G(1)), 1e-12);
        EXPECT_NEAR(phi_of(bc)(s), G(s), 1e-15);
    }
}

INSTANTIATE_TEST_SUITE_P(Coefficients, GreenBvp,
                         ::testing::Values(BoundaryParams{1, 0, 1, 0}, BoundaryParams{1, 1, 1, 0},
                                           BoundaryParams{1, 0, 1, 2}, BoundaryParams{2, 0.5, 3, 1},
                                           BoundaryParams{0, 1, 1, 0}, BoundaryParams{1, 0, 0, 1}));

TEST(Green, ParameterErrors) {
    EXPECT_THROW(green_eval({-1, 0, 1, 0}, 0.5, 0.5), ParameterError);
    EXPECT_THROW(green_eval({0, 1, 0, 1}, 0.5, 0.5), ParameterError);  // Gamma = 0
    EXPECT_THROW(green_eval(BoundaryParams::dirichlet(), 1.5, 0.5), DomainError);
}

TEST(ConeParams, DirichletQuarterInterval) {
    auto c = cone_params(BoundaryParams::dirichlet(), 0.25, 0.75);
    EXPECT_EQ(c.c, 0.25);
    EXPECT_EQ(c.a, 0.25);
    EXPECT_EQ(c.b, 0.75);
}

TEST(ConeParams, AdmissibilityViolations) {
    const auto dir = BoundaryParams::dirichlet();
    EXPECT_THROW(cone_params(dir, 0.25, 1.0), AdmissibilityError);  // b < 1 + delta/gamma fails
    EXPECT_THROW(cone_params(dir, 0.0, 0.5), AdmissibilityError);   // -beta/alpha < a fails
    EXPECT_THROW(cone_params(dir, 0.6, 0.4), AdmissibilityError);
    EXPECT_NO_THROW(cone_params({1, 0, 0, 1}, 0.25, 1.0));          // gamma = 0: right side vacuous
    EXPECT_NO_THROW(cone_params({1, 1, 1, 0}, 0.0, 0.5));           // beta > 0 admits a = 0
}

TEST(H4, GreenKernelsPass) {
    auto grid = Grid::uniform(101);
    for (auto bc : {BoundaryParams{1, 0, 1, 0}, BoundaryParams{2, 0.5, 3, 1}, BoundaryParams{1, 0, 1, 2}}) {
        auto k = make_green_kernel(bc, 0.25, 0.75);
        auto rep = verify_h4(k, grid);
        EXPECT_TRUE(rep.passed) << rep.describe();
        EXPECT_GT(rep.checked_points, grid.size() * grid.size());
    }
}

TEST(H4, ViolationIsLocated) {
    auto k = make_green_kernel(BoundaryParams::dirichlet(), 0.25, 0.75);
    auto bad = k;
    bad.eval = [e = k.eval](double t, double s) { return 2.0 * e(t, s); };
    auto rep = verify_h4(bad, Grid::uniform(41));
    EXPECT_FALSE(rep.passed);
    EXPECT_LT(rep.worst_upper_margin, 0.0);
    EXPECT_NEAR(rep.upper_s, 0.5, 1e-12);
}

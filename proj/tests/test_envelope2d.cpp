#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sturmcert/envelope2d.hpp"
#include "sturmcert/error.hpp"

using namespace sturmcert;
using namespace sturmcert::plane;

namespace {

const double pi = std::numbers::pi;

}  // namespace

TEST(Hull, MonotoneChainDropsCollinearAndInterior) {
    auto h = convex_hull({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {1, 2}, {0, 1}});
    ASSERT_EQ(h.size(), 4u);
    EXPECT_NEAR(diameter(h), std::sqrt(8.0), 1e-15);
    EXPECT_EQ(convex_hull({{1, 1}, {1, 1}}).size(), 1u);
    EXPECT_EQ(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size(), 2u);
    EXPECT_DOUBLE_EQ(distance_to({1, 1}, h), 0.0);
    EXPECT_DOUBLE_EQ(distance_to({3, 1}, h), 1.0);
    EXPECT_DOUBLE_EQ(hausdorff(h, convex_hull({{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 3}})), 1.0);
}

TEST(Envelope, PolarExampleDiagonalIsTriangle) {
    auto T = polar_example_operator(1.0);
    auto env = cc_envelope(T, from_polar(1.0, pi / 4));
    Polygon triangle = convex_hull({{0, 0}, {1, 0}, {0, 1}});
    EXPECT_LT(hausdorff(env.intersection, triangle), 1e-2);
    EXPECT_TRUE(env.converged);
}

TEST(Envelope, PolarExampleOffCircleIsOrigin) {
    auto T = polar_example_operator(1.0);
    for (double rho : {0.5, 0.9, 1.05, 1.5}) {
        auto env = cc_envelope(T, from_polar(rho, 0.7));
        EXPECT_LT(diameter(env.intersection), 1e-6) << rho;
        EXPECT_LT(distance_to({0, 0}, env.intersection), 1e-12);
    }
}

TEST(Envelope, PolarExampleSidesAreSegments) {
    auto T = polar_example_operator(2.0);
    auto below = cc_envelope(T, from_polar(2.0, pi / 8));
    EXPECT_LT(hausdorff(below.intersection, {{0, 0}, {0, 2}}), 1e-9);
    auto above = cc_envelope(T, from_polar(2.0, 3 * pi / 8));
    EXPECT_LT(hausdorff(above.intersection, {{0, 0}, {2, 0}}), 1e-9);
}

TEST(Envelope, ContinuousOperatorsGiveSingletons) {
    auto id = identity_operator();
    for (Point x : {Point{0.3, 0.4}, Point{0, 0}, Point{2, 0}}) {
        auto env = cc_envelope(id, x);
        EXPECT_LT(hausdorff(env.intersection, {x}), 1e-3);
        EXPECT_TRUE(envelope_condition_check(id, x, env));
    }
    auto cst = constant_operator({1, 2});
    auto env = cc_envelope(cst, {0.5, 0.5});
    ASSERT_EQ(env.intersection.size(), 1u);
    EXPECT_EQ(env.intersection[0], (Point{1, 2}));
    EXPECT_TRUE(envelope_condition_check(cst, {0.5, 0.5}, env));
}

TEST(Envelope, HullsAreNested) {
    auto T = polar_example_operator(1.0);
    for (double theta : {pi / 4, pi / 8, 0.1, 1.3}) {
        for (double rho : {1.0, 1.02, 0.97}) {
            auto env = cc_envelope(T, from_polar(rho, theta));
            for (std::size_t k = 1; k < env.hulls.size(); ++k) {
                EXPECT_TRUE(contained_in(env.hulls[k], env.hulls[k - 1], 1e-9)) << theta << " " << rho << " " << k;
                EXPECT_LT(env.eps_ladder[k], env.eps_ladder[k - 1]);
            }
            for (const auto& h : env.hulls) EXPECT_TRUE(contained_in(env.intersection, h, 1e-9));
        }
    }
}

TEST(Envelope, ConditionHoldsAroundTheCircle) {
    auto T = polar_example_operator(1.0);
    for (double theta = 0.0; theta <= pi / 2 + 1e-12; theta += pi / 40) {
        Point x = from_polar(1.0, theta);
        EXPECT_TRUE(envelope_condition_check(T, x, cc_envelope(T, x))) << theta;
    }
}

TEST(Envelope, Errors) {
    auto T = identity_operator();
    EnvelopeOptions o;
    o.eps_ladder = {0.1, 0.1};
    EXPECT_THROW((void)cc_envelope(T, {1, 1}, o), DomainError);
    o.eps_ladder = {0.1, -0.05};
    EXPECT_THROW((void)cc_envelope(T, {1, 1}, o), DomainError);
    o.eps_ladder = {0.1, 0.05};
    EXPECT_THROW((void)cc_envelope(T, {-5, -5}, o), DomainError);
    EXPECT_THROW((void)annulus_fixed_point_scan(T, 2.0, 1.0, 10), DomainError);
    EXPECT_THROW((void)annulus_fixed_point_scan(T, 0.0, 1.0, 10), DomainError);
}

TEST(AnnulusScan, PolarExampleHasNoFixedPoint) {
    auto rep = annulus_fixed_point_scan(polar_example_operator(1.0), 1.0, 2.0, 200);
    EXPECT_GT(rep.min_residual, 0.1);
    EXPECT_EQ(rep.points, 201u * 201u);
}

TEST(AnnulusScan, TrivialOperators) {
    EXPECT_EQ(annulus_fixed_point_scan(identity_operator(), 1.0, 2.0, 20).min_residual, 0.0);
    auto zero = annulus_fixed_point_scan(constant_operator({0, 0}), 0.5, 2.0, 20);
    EXPECT_NEAR(zero.min_residual, 0.5, 1e-15);
    EXPECT_NEAR(norm(zero.at), 0.5, 1e-15);
}

TEST(Usc, SequenceIntoTheDiagonal) {
    auto T = polar_example_operator(1.0);
    std::vector<Point> xs, ys;
    for (int n = 1; n <= 6; ++n) {
        double theta = pi / 4 - 0.1 / n;
        xs.push_back(from_polar(1.0, theta));
        ys.push_back({0.0, 1.0 - 0.5 / n});
    }
    auto rep = usc_sequence_probe(T, xs, ys, from_polar(1.0, pi / 4), {0.0, 1.0});
    EXPECT_TRUE(rep.ok);
    EXPECT_EQ(rep.member_violations, 0u);
}

TEST(Usc, ConstantAndIdentitySequences) {
    auto id = identity_operator();
    std::vector<Point> xs(3, Point{0.4, 0.2});
    EXPECT_TRUE(usc_sequence_probe(id, xs, xs, {0.4, 0.2}, {0.4, 0.2}, 1e-3).ok);
    std::vector<Point> moving{{0.5, 0.5}, {0.45, 0.45}, {0.41, 0.41}};
    EXPECT_TRUE(usc_sequence_probe(id, moving, moving, {0.4, 0.4}, {0.4, 0.4}, 1e-3).ok);
    EXPECT_FALSE(usc_sequence_probe(id, moving, moving, {0.4, 0.4}, {0.6, 0.4}, 1e-3).ok);
    EXPECT_THROW((void)usc_sequence_probe(id, moving, std::vector<Point>(2), {0, 0}, {0, 0}), DomainError);
}

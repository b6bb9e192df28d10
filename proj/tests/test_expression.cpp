#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sturmcert/error.hpp"
#include "sturmcert/expression.hpp"

using sturmcert::ConfigError;
using sturmcert::Expression;
using sturmcert::Predicate;

TEST(Expression, ArithmeticAndPrecedence) {
    auto e = Expression::parse("1 + 2*3 - 4/2", {});
    EXPECT_DOUBLE_EQ(e({}), 5.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2^3^2", {})({}), 512.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2**3", {})({}), 8.0);
    EXPECT_DOUBLE_EQ(Expression::parse("-2^2", {})({}), -4.0);
    EXPECT_DOUBLE_EQ(Expression::parse("(1+2)*3", {})({}), 9.0);
    EXPECT_DOUBLE_EQ(Expression::parse("1/4", {})({}), 0.25);
    EXPECT_DOUBLE_EQ(Expression::parse("pi", {})({}), std::numbers::pi);
    EXPECT_DOUBLE_EQ(Expression::parse("1.5e2", {})({}), 150.0);
}

TEST(Expression, VariablesAndFunctions) {
    auto e = Expression::parse("t*(1-t) + u", {"t", "u"});
    EXPECT_DOUBLE_EQ(e({0.5, 2.0}), 2.25);
    auto f = Expression::parse("exp(log(3)) + abs(-2) + sqrt(16) + min(4, 1, 3) + max(1, 7) + pow(2, 5)", {});
    EXPECT_NEAR(f({}), 3 + 2 + 4 + 1 + 7 + 32, 1e-12);
    EXPECT_NEAR(Expression::parse("sin(pi/2) + cos(0)", {})({}), 2.0, 1e-15);
}

TEST(Expression, ErrorsCarryColumn) {
    try {
        (void)Expression::parse("1 + x", {"t"});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("column 5"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("unknown variable 'x'"), std::string::npos);
    }
    EXPECT_THROW((void)Expression::parse("(1 + 2", {}), ConfigError);
    EXPECT_THROW((void)Expression::parse("1 +", {}), ConfigError);
    EXPECT_THROW((void)Expression::parse("foo(1)", {}), ConfigError);
    EXPECT_THROW((void)Expression::parse("pow(1)", {}), ConfigError);
    EXPECT_THROW((void)Expression::parse("min(1)", {}), ConfigError);
    EXPECT_THROW((void)Expression::parse("1 2", {}), ConfigError);
}

TEST(Expression, ConstantRoundTripsThroughSource) {
    for (double v : {0.1, 1.0 / 3.0, 1.15, 81.0, 1e-8, 123456.789}) {
        auto c = Expression::constant(v);
        EXPECT_EQ(c({}), v);
        EXPECT_EQ(Expression::parse(c.source(), {})({}), v) << c.source();
    }
    EXPECT_EQ(Expression()({}), 0.0);
}

TEST(Expression, EqualityComparesSourceAndVariables) {
    EXPECT_EQ(Expression::parse(" u + 1 ", {"u"}), Expression::parse("u + 1", {"u"}));
    EXPECT_FALSE(Expression::parse("u + 1", {"u"}) == Expression::parse("u + 1", {"t", "u"}));
}

TEST(Predicate, ChainsAndConjunctions) {
    auto p = Predicate::parse("0.2 <= t < 0.8 && u >= 1", {"t", "u"});
    EXPECT_TRUE(p({0.2, 1.0}));
    EXPECT_FALSE(p({0.8, 1.0}));
    EXPECT_FALSE(p({0.5, 0.99}));
    auto q = Predicate::parse("u < 1 and t != 0", {"t", "u"});
    EXPECT_TRUE(q({0.5, 0.5}));
    EXPECT_FALSE(q({0.0, 0.5}));
    EXPECT_TRUE(Predicate::parse("true", {"t", "u"})({0.0, 0.0}));
    EXPECT_TRUE(Predicate::parse("u == 2", {"t", "u"})({0.0, 2.0}));
    EXPECT_THROW((void)Predicate::parse("u + 1", {"t", "u"}), ConfigError);
    EXPECT_THROW((void)Predicate::parse("u < z", {"t", "u"}), ConfigError);
}

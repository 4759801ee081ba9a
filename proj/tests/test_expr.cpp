#include <gtest/gtest.h>

#include <algorithm>

#include "omega/compose.hpp"
#include "omega/verify.hpp"
#include "support.hpp"

using namespace omega;
using omega::test::S;
using omega::test::same_prefix;

namespace {

std::string squeeze(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
}

std::exception_ptr cause_of(const std::string &text) {
    try {
        S(text);
    } catch (const ElaborateError &e) {
        return e.cause();
    }
    return nullptr;
}

template <class E> bool cause_is(const std::string &text) {
    auto c = cause_of(text);
    if (!c)
        return false;
    try {
        std::rethrow_exception(c);
    } catch (const E &) {
        return true;
    } catch (...) {
        return false;
    }
}

} // namespace

TEST(Parse, SumTree) {
    const Expr e = parse("x + 1 + x^-1");
    ASSERT_EQ(e.kind(), Expr::Kind::add);
    EXPECT_EQ(e.args()[0].kind(), Expr::Kind::add);
    const Expr &p = e.args()[1];
    ASSERT_EQ(p.kind(), Expr::Kind::pow);
    EXPECT_EQ(p.args()[0].kind(), Expr::Kind::var);
    EXPECT_EQ(p.args()[1].kind(), Expr::Kind::neg);
}

TEST(Parse, GammaExponent) {
    const Expr e = parse("exp(x*log(x) - x - 1/2*log(x))");
    ASSERT_EQ(e.kind(), Expr::Kind::exp);
    const Expr &arg = e.args()[0];
    ASSERT_EQ(arg.kind(), Expr::Kind::sub);
    EXPECT_EQ(arg.args()[0].kind(), Expr::Kind::sub);
    EXPECT_EQ(arg.args()[1].kind(), Expr::Kind::mul);
    EXPECT_EQ(squeeze(print(e)), "exp(x*log(x)-x-1/2*log(x))");
}

TEST(Parse, ErrorPositions) {
    try {
        parse("log(");
        FAIL() << "expected a syntax error";
    } catch (const SyntaxError &e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 5);
    }
    try {
        parse("x +\n  * 2");
        FAIL() << "expected a syntax error";
    } catch (const SyntaxError &e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 3);
    }
    EXPECT_THROW(parse("x)"), SyntaxError);
    EXPECT_THROW(parse("y"), SyntaxError);
    EXPECT_THROW(parse("log^0(x)"), SyntaxError);
    EXPECT_THROW(parse(""), SyntaxError);
}

TEST(Parse, Precedence) {
    // Unary minus binds looser than ^, and ^ is right associative.
    EXPECT_TRUE(same_prefix(S("-x^2"), "-(x^2)"));
    EXPECT_TRUE(same_prefix(S("x^2^2"), "x^4"));
    EXPECT_TRUE(same_prefix(S("x - 1 - 1"), "x - 2"));
    EXPECT_TRUE(same_prefix(S("x / 2 / 2"), "1/4*x"));
    EXPECT_TRUE(same_prefix(S("2*x^-1"), "2/x"));
    EXPECT_TRUE(same_prefix(S("log^2(x)"), "log(log(x))"));
    // @ is loosest and left associative: (x^2 @ x^2) @ exp(x).
    EXPECT_TRUE(same_prefix(S("x^2 @ x^2 @ exp(x)"), "exp(4*x)"));
    EXPECT_TRUE(same_prefix(S("x + 1 @ x^2"), "x^2 + 1"));
}

TEST(Print, RoundTripsUpToWhitespace) {
    for (const std::string s : {"x^2 + 3*x - 1/2", "exp(x) * log(x)^(-1/2)", "1/(x*(1 - x^-1))",
                                "log^2(x) @ exp(exp(x))", "D(exp(x^2))", "-(x + 1.5)",
                                "exp(x*log(x) - x) * (2*pi/x)^(1/2)"})
        EXPECT_EQ(squeeze(print(parse(s))), squeeze(s));
}

TEST(Elaborate, Examples) {
    std::vector<Term> geo;
    for (long k = 1; k <= 8; ++k)
        geo.push_back({Constant(1), Monomial::x().pow(Constant(-k))});
    EXPECT_TRUE(same_prefix(S("1/(x*(1 - x^-1))"), Series::from_terms(geo), 8));
    EXPECT_TRUE(same_prefix(S("D(exp(x^2))"), "2*x*exp(x^2)"));
    EXPECT_TRUE(same_prefix(S("log(x) @ exp(x)"), "x"));
}

TEST(Elaborate, Decimals) { EXPECT_TRUE(same_prefix(S("2.5*x"), "5/2*x")); }

TEST(Elaborate, ExpLogRewrites) {
    EXPECT_TRUE(same_prefix(S("exp(log(x + 1))"), "x + 1"));
    EXPECT_TRUE(same_prefix(S("log(exp(x^2))"), "x^2"));
}

TEST(Elaborate, KernelErrorsCarryCauses) {
    EXPECT_TRUE(cause_is<not_positive>("log(-x)"));
    EXPECT_TRUE(cause_is<not_above_reals>("x @ x^-1"));
    EXPECT_TRUE(cause_is<zero_series>("1/(x - x)"));
    EXPECT_TRUE(cause_is<not_positive>("(-x)^(1/2)"));
    try {
        S("x + log(-x)");
        FAIL() << "expected an elaboration error";
    } catch (const ElaborateError &e) {
        EXPECT_EQ(e.span().begin.column, 5);
        EXPECT_FALSE(e.is_limit());
    }
}

TEST(Elaborate, BudgetErrorsAreLimits) {
    try {
        elaborate(parse("log^9(x)"), Budget{256, 4096, 8, 0});
        FAIL() << "expected a depth error";
    } catch (const ElaborateError &e) {
        EXPECT_TRUE(e.is_limit());
    }
}

TEST(Elaborate, PrintedSeriesReadBack) {
    GenProfile p;
    p.seed = 17;
    for (std::uint64_t t = 0; t < 40; ++t) {
        const Series f = gen_series(p, t, Shape::any).value;
        const Enumeration e = f.enumerate(12);
        if (!e.exhausted)
            continue;
        const std::string text = f.to_string(12);
        EXPECT_EQ(compare(S(text), f), std::strong_ordering::equal) << text;
    }
}

TEST(Elaborate, SampleTextMatchesValue) {
    GenProfile p;
    p.seed = 18;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const Sample s = gen_series(p, t, Shape::above_reals);
        EXPECT_TRUE(same_prefix(S(s.text), s.value, 8)) << s.text;
    }
}

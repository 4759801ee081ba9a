// Acceptance criteria: one PASS/FAIL line each, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "omega/analysis.hpp"
#include "omega/compose.hpp"
#include "omega/error.hpp"
#include "omega/expr.hpp"
#include "omega/monomial.hpp"
#include "omega/verify.hpp"

using namespace omega;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream why;

    void require(bool cond, const std::string &what) {
        if (!cond) {
            ok = false;
            why << " [" << what << "]";
        }
    }
};

std::string tally(const CheckReport &c) {
    std::ostringstream s;
    s << c.name << " " << c.completed << "/" << c.attempted << " completed, " << c.skipped << " skipped, "
      << c.budget << " budget, " << c.failed << " failed";
    for (const auto &[b, n] : c.branches)
        s << ", " << b << "=" << n;
    return s.str();
}

const CheckReport &only(const SuiteReport &r) { return r.checkers.front(); }

bool exact(const Series &a, const Series &b) {
    for (std::size_t i = 0;; ++i) {
        const auto s = a.term(i), t = b.term(i);
        if (!s || !t)
            return !s && !t;
        if (cmp_monomial(s->mono, t->mono) != 0 || cmp_const(s->coef, t->coef) != 0)
            return false;
    }
}

template <class E, class F>
bool throws(F &&f) {
    try {
        f();
    } catch (const E &) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

// Kernel error behind an elaboration failure.
template <class E>
bool cause_is(const std::string &text) {
    try {
        (void)read_series(text);
    } catch (const ElaborateError &e) {
        try {
            if (e.cause())
                std::rethrow_exception(e.cause());
        } catch (const E &) {
            return true;
        } catch (...) {
        }
    }
    return false;
}

std::string capture(const std::string &cmd, int &status) {
    std::string out;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf;
    for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), p)) > 0;)
        out.append(buf.data(), n);
    const int st = pclose(p);
    status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return out;
}

// l_0 * l_1 * ... * l_{n-1}, inverted.
Series reciprocal_log_product(unsigned n) {
    Word w;
    for (unsigned k = 0; k < n; ++k)
        w.emplace_back(k, Constant(-1));
    return Series::monomial(Monomial::make(std::move(w), Series()));
}

Check kernel_algebra(const GenProfile &p) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteReport r = run_suite(p, {"algebra"}, 200);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.why << tally(only(r)) << ", " << secs << " s";
    c.require(only(r).failed == 0, "failures");
    c.require(only(r).completed > 0, "nothing completed");
    c.require(secs < 120, "over 2 minutes");
    return c;
}

Check derivation_laws(const GenProfile &p) {
    Check c;
    const SuiteReport r = run_suite(p, {"derivation"}, 200);
    c.why << tally(only(r));
    c.require(only(r).failed == 0, "failures");
    c.require(only(r).completed > 0, "nothing completed");
    return c;
}

Check monotonicity(const GenProfile &p) {
    Check c;
    const SuiteReport r = run_suite(p, {"monotonicity"}, 500);
    const CheckReport &m = only(r);
    c.why << tally(m);
    c.require(m.failed == 0, "sign mismatch");
    c.require(2 * (m.skipped + m.budget) < m.attempted, "skips+budget not below 50%");
    return c;
}

Check lemmas(const GenProfile &p) {
    Check c;
    const SuiteReport r = run_suite(p, {"monotonicity_j", "gap_j", "weak_mvp", "small_gaps", "gap"}, 300);
    for (const auto &k : r.checkers) {
        c.why << tally(k) << "; ";
        c.require(k.failed == 0, k.name + " failures");
        c.require(k.completed > 0, k.name + " nothing completed");
        if (k.name == "weak_mvp") {
            for (const char *b : {"small", "large"}) {
                const auto it = k.branches.find(b);
                c.require(it != k.branches.end() && it->second >= 50, std::string("weak_mvp ") + b + " < 50");
            }
        }
    }
    return c;
}

Check taylor(const GenProfile &p) {
    Check c;
    const SuiteReport t = run_suite(p, {"taylor"}, 300);
    const SuiteReport n = run_suite(p, {"radius_negative"}, 100);
    c.why << tally(only(t)) << "; " << tally(only(n));
    c.require(only(t).failed == 0, "taylor failures");
    c.require(only(t).completed > 0, "no taylor trial completed");
    c.require(only(n).failed == 0, "radius_negative failures");
    c.require(only(n).completed > 0, "no radius_negative trial completed");
    return c;
}

Check gamma_series() {
    Check c;
    const Series g = read_series("exp(x*log(x) - x) * (2*pi/x)^(1/2)");
    const Term lead = leading_term(g);
    // Expected monomial x^(-1/2) * exp(x log x - x), built directly.
    const Series x = Series::x();
    const Series expo = x * Series::log_iter(1) - x;
    const Monomial want = Monomial::make({{0, Constant::rational(-1, 2)}}, expo);
    c.require(cmp_monomial(lead.mono, want) == 0, "leading monomial");
    c.require(cmp_const(lead.coef * lead.coef, Constant(2) * Constant::pi()) == 0, "coefficient squared is not 2 pi");
    c.require(sign(Series(lead.coef)) > 0, "coefficient sign");
    // The logarithm of the monomial is the hand-written exponent.
    const Series hand = x * Series::log_iter(1) - x - Series::monomial(Monomial::log_power(1), Constant::rational(1, 2));
    c.require(exact(log_monomial(lead.mono), hand), "exponent");
    // Hand derivative of the exponent: log(x) - 1/2 x^-1.
    const Term dl = leading_term(dagger(g));
    c.require(cmp_monomial(dl.mono, Monomial::log_power(1)) == 0 && dl.coef.is_one(), "dagger lead is not log(x)");
    c.why << "lead " << lead.coef.to_string() << "*" << lead.mono.to_string() << ", dagger lead "
          << dl.mono.to_string();
    return c;
}

Check log_chain() {
    Check c;
    for (unsigned n = 0; n <= 4; ++n) {
        const Series l = Series::log_iter(n);
        c.require(exact(derive(l), reciprocal_log_product(n)), "derive l_" + std::to_string(n));
        c.require(exact(dagger(l), reciprocal_log_product(n + 1)), "dagger l_" + std::to_string(n));
    }
    c.why << "derive(l_4) = " << derive(Series::log_iter(4)).to_string(2);
    return c;
}

Check exp_rank_table(const GenProfile &p) {
    Check c;
    const std::pair<const char *, unsigned> table[] = {
        {"log(x)", 0},         {"log^3(x)", 0}, {"x + log(x)", 1},   {"exp(exp(x))", 2},
        {"2*x", 1},            {"x^2", 2},      {"exp(x)", 1},       {"x*log(x)", 2},
        {"exp(x^2)", 3},       {"exp(exp(x) + x)", 2},
    };
    int matched = 0;
    for (const auto &[text, want] : table) {
        const unsigned got = exp_rank(read_series(text));
        c.require(got == want, std::string(text) + " -> " + std::to_string(got));
        matched += got == want;
    }
    const SuiteReport r = run_suite(p, {"exp_rank"}, 200);
    c.why << matched << "/10 table rows; " << tally(only(r));
    c.require(only(r).failed == 0, "subadditivity failures");
    c.require(only(r).completed > 0, "nothing completed");
    return c;
}

Check determinism() {
    Check c;
    const std::string cmd = std::string(OMEGA_BIN) + " check --seed 42 --json";
    int s1 = 0, s2 = 0;
    const std::string a = capture(cmd, s1), b = capture(cmd, s2);
    c.why << a.size() << " bytes, exit " << s1 << "/" << s2;
    c.require(!a.empty(), "empty report");
    c.require(a == b, "reports differ");
    c.require(a.find("\"format_version\"") != std::string::npos, "no format_version");
    return c;
}

Check error_honesty() {
    Check c;
    const Series a = read_series("1/(1 - x^-1)"), b = read_series("1 + x^-1/(1 - x^-1)");
    c.require(throws<budget_exhausted>([&] { (void)compare(a, b); }), "deep cancellation");
    c.require(throws<not_positive>([] { (void)log_series(-Series::x()); }), "log of -x");
    c.require(cause_is<not_positive>("log(-x)"), "log(-x) via the grammar");
    c.require(cause_is<not_above_reals>("x @ x^-1"), "x @ x^-1 via the grammar");
    c.require(throws<not_above_reals>([] { (void)compose(Series::x(), read_series("x^-1")); }), "compose with x^-1");
    c.require(throws<not_above_reals>([] { (void)compose(Series::x(), Series(5)); }), "compose with 5");
    c.why << "budget_exhausted, not_positive, not_above_reals";
    return c;
}

} // namespace

int main() {
    const GenProfile p;
    const std::pair<const char *, std::function<Check()>> criteria[] = {
        {"kernel algebra", [&] { return kernel_algebra(p); }},
        {"derivation laws", [&] { return derivation_laws(p); }},
        {"monotonicity", [&] { return monotonicity(p); }},
        {"lemmas", [&] { return lemmas(p); }},
        {"taylor and radius", [&] { return taylor(p); }},
        {"gamma series", gamma_series},
        {"iterated logarithms", log_chain},
        {"exponential rank", [&] { return exp_rank_table(p); }},
        {"determinism", determinism},
        {"error honesty", error_honesty},
    };
    int failed = 0, index = 0;
    for (const auto &[name, run] : criteria) {
        ++index;
        Check c;
        try {
            c = run();
        } catch (const std::exception &e) {
            c.ok = false;
            c.why << "exception: " << e.what();
        }
        failed += !c.ok;
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << index << " " << name << ": " << c.why.str() << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

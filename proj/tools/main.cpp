#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "omega/compose.hpp"
#include "omega/expr.hpp"
#include "omega/verify.hpp"

namespace {

enum Exit { ok = 0, verdict_fail = 1, usage = 2, limit = 3 };

std::string cmp_token(const omega::DominanceRel &r) {
    using R = omega::DominanceRel::Relation;
    switch (r.relation) {
    case R::prec:
        return "<<";
    case R::succ:
        return ">>";
    case R::asymp:
        return r.similar ? "~~ ~" : "~~";
    }
    return "?";
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact transseries calculator and theorem checker"};
    app.require_subcommand(1);
    app.fallthrough();

    omega::Budget budget;
    app.add_option("--max-terms", budget.max_terms, "Cancellation and enumeration limit")
        ->capture_default_str();
    app.add_option("--max-bits", budget.max_precision, "Interval precision limit for zero tests")
        ->capture_default_str();
    app.add_option("--max-depth", budget.max_depth, "Exp/log nesting limit")->capture_default_str();

    std::string e1, e2;
    std::size_t n_terms = 8;

    auto *expand = app.add_subcommand("expand", "Print the first terms of an expression");
    expand->add_option("expr", e1)->required();
    expand->add_option("-n", n_terms, "Number of terms")->capture_default_str();

    auto *cmp = app.add_subcommand("cmp", "Dominance relation: <<, ~~ (~ when similar) or >>");
    cmp->add_option("lhs", e1)->required();
    cmp->add_option("rhs", e2)->required();

    auto *diff = app.add_subcommand("diff", "Derivative");
    diff->add_option("expr", e1)->required();
    diff->add_option("-n", n_terms, "Number of terms")->capture_default_str();

    auto *comp = app.add_subcommand("compose", "Right composition f o g");
    comp->add_option("f", e1)->required();
    comp->add_option("g", e2)->required();
    comp->add_option("-n", n_terms, "Number of terms")->capture_default_str();

    std::string at, delta;
    unsigned order = 0;
    auto *taylor = app.add_subcommand("taylor", "Taylor expansion of f o (x + delta) with remainder check");
    taylor->add_option("f", e1)->required();
    taylor->add_option("--at", at, "Point x")->required();
    taylor->add_option("--delta", delta, "Increment delta")->required();
    taylor->add_option("-n", order, "Order")->capture_default_str();

    std::string suite = "all";
    std::size_t trials = 100;
    omega::GenProfile profile;
    bool json = false;
    auto *check = app.add_subcommand("check", "Run seeded theorem checkers");
    check->add_option("--suite", suite, "Checker names, comma separated, or all")->capture_default_str();
    check->add_option("--trials", trials, "Trials per checker")->capture_default_str()->check(CLI::PositiveNumber);
    check->add_option("--seed", profile.seed, "Generator seed")->capture_default_str();
    check->add_option("--jobs", profile.jobs, "Worker threads")->capture_default_str();
    check->add_flag("--json", json, "Print the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        omega::BudgetScope scope(budget);
        if (*expand) {
            std::cout << omega::read_series(e1).to_string(n_terms) << "\n";
        } else if (*cmp) {
            const omega::Series a = omega::read_series(e1), b = omega::read_series(e2);
            std::cout << cmp_token(omega::dominance(a, b)) << "\n";
        } else if (*diff) {
            std::cout << omega::derive(omega::read_series(e1)).to_string(n_terms) << "\n";
        } else if (*comp) {
            std::cout << omega::compose(omega::read_series(e1), omega::read_series(e2)).to_string(n_terms)
                      << "\n";
        } else if (*taylor) {
            const auto r = omega::taylor_expand(omega::read_series(e1), omega::read_series(at),
                                                omega::read_series(delta), order);
            std::cout << "partial sum: " << r.partial_sum.to_string(n_terms) << "\n";
            if (r.remainder.is_zero())
                std::cout << "remainder: 0\n";
            else
                std::cout << "remainder: O(" << omega::leading_term(r.remainder).mono.to_string() << ")\n";
            std::cout << "bound: " << r.bound.to_string(1) << "\n";
            std::cout << "verdict: " << (r.within_bound ? "pass" : "fail") << "\n";
            return r.within_bound ? ok : verdict_fail;
        } else if (*check) {
            profile.budget.max_terms = budget.max_terms;
            profile.budget.max_precision = budget.max_precision;
            profile.budget.max_depth = budget.max_depth;
            const auto which = suite == "all" ? omega::suite_names() : split_list(suite);
            const auto report = omega::run_suite(profile, which, trials);
            std::cout << (json ? omega::to_json(report) + "\n" : omega::to_text(report));
            return report.failed() == 0 ? ok : verdict_fail;
        }
    } catch (const omega::precondition_violated &e) {
        std::cerr << "error: precondition " << e.which() << " violated: " << e.what() << "\n";
        return usage;
    } catch (const omega::ElaborateError &e) {
        std::cerr << "error: " << e.what() << " (at line " << e.span().begin.line << ", column "
                  << e.span().begin.column << ")\n";
        return e.is_limit() ? limit : usage;
    } catch (const omega::limit_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return limit;
    } catch (const omega::error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return ok;
}

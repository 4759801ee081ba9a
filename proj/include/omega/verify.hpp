#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "omega/budget.hpp"
#include "omega/compose.hpp"

namespace omega {

/// Bounds for random series generation.
struct GenProfile {
    std::uint64_t seed = 42;
    unsigned max_exp_depth = 2;
    unsigned max_log_index = 3;
    unsigned max_generators = 4;
    unsigned max_terms = 8;
    std::vector<mpq_class> coefficients{1, -1, 2, -2, 3, mpq_class(1, 2), mpq_class(-1, 2),
                                        mpq_class(1, 3), mpq_class(-3, 2), 5};
    std::vector<mpq_class> exponents{1, 2, -1, -2, 3, mpq_class(1, 2), mpq_class(-1, 2),
                                     mpq_class(3, 2), mpq_class(1, 3)};
    /// Budget installed for each trial.
    Budget budget{256, 4096, 8, 30000};
    /// Powers x^k excluded by the Taylor checkers.
    unsigned k_max = 16;
    /// Worker threads; the report does not depend on it.
    unsigned jobs = 1;
};

enum class Shape { any, purely_infinite_positive, above_reals, infinitesimal };

/// A generated series with the grammar text that elaborates to it.
struct Sample {
    Series value;
    std::string text;
};

/// Deterministic in (profile, trial, shape, stream); the value satisfies the
/// shape.
Sample gen_series(const GenProfile &profile, std::uint64_t trial, Shape shape,
                  std::uint64_t stream = 0);

enum class Outcome { pass, fail, skip, budget };

std::string to_string(Outcome o);

struct Verdict {
    Outcome outcome = Outcome::pass;
    std::string detail;
    /// Sub-cases exercised, counted per checker.
    std::vector<std::string> branches;
};

// Checkers on explicit inputs. Each returns fail only for a violated
// statement; unmet premises give skip.

/// Field axioms, order compatibility and exp/log inversion on truncations.
Verdict check_algebra(const Series &f, const Series &g, const Series &h);
/// Linearity, Leibniz, chain rule, H-field implications and the iterated
/// derivative estimates. g > R is needed for the chain rule.
Verdict check_derivation_laws(const Series &f, const Series &g, const Series &u);
Verdict check_monotonicity(const Series &f, const Series &x, const Series &y);
Verdict check_monotonicity_J(const Series &gamma, const Series &x, const Series &y);
Verdict check_gap(const Series &f, const Series &g, const Series &x, const Series &y);
Verdict check_gap_J(const Series &gamma, const Series &delta, const Series &x, const Series &y);
Verdict check_weak_mvp(const Series &gamma, const Series &x, const Series &y);
Verdict check_small_gaps(const Series &gamma, const Series &x, const Series &y);
Verdict check_taylor_suite(const Series &f, const Series &x, const Series &delta, unsigned n,
                           unsigned k_max = 16);
Verdict check_radius_negative(const Series &f, const Series &x, const Series &delta,
                              unsigned k_max = 16);
Verdict check_exp_rank(const Series &f, const Series &g);

/// Failed trial with its inputs as grammar text.
struct Witness {
    std::uint64_t trial = 0;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::string detail;
};

struct CheckReport {
    std::string name;
    std::size_t attempted = 0;
    std::size_t completed = 0;
    std::size_t skipped = 0;
    std::size_t budget = 0;
    std::size_t failed = 0;
    std::map<std::string, std::size_t> branches;
    std::vector<Witness> failures;
};

struct SuiteReport {
    GenProfile profile;
    std::size_t trials = 0;
    std::vector<CheckReport> checkers;

    std::size_t failed() const;
};

/// Checker names in run order.
const std::vector<std::string> &suite_names();

/// Inputs of one trial of a checker.
std::vector<std::pair<std::string, std::string>> trial_inputs(const std::string &checker,
                                                              const GenProfile &profile,
                                                              std::uint64_t trial);

/// Runs a checker on named grammar-text inputs under the current budget,
/// mapping errors to skip or budget.
Verdict run_checker(const std::string &checker,
                    const std::vector<std::pair<std::string, std::string>> &inputs,
                    unsigned k_max = 16);

/// Replays a witness under the profile budget.
Verdict replay(const std::string &checker, const Witness &w, const GenProfile &profile);

/// Unknown names throw domain_error.
SuiteReport run_suite(const GenProfile &profile, const std::vector<std::string> &which,
                      std::size_t trials);

/// Stable serialization with a format_version field.
std::string to_json(const SuiteReport &r, int indent = 2);

/// Human-readable summary.
std::string to_text(const SuiteReport &r);

} // namespace omega

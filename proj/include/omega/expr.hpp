#pragma once

#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "omega/budget.hpp"
#include "omega/core.hpp"
#include "omega/error.hpp"

namespace omega {

/// 1-based source position.
struct SourcePos {
    int line = 1;
    int column = 1;
};

struct Span {
    SourcePos begin;
    SourcePos end;
};

class SyntaxError : public error {
public:
    SyntaxError(const std::string &what, SourcePos pos)
        : error(what + " at line " + std::to_string(pos.line) + ", column " +
                std::to_string(pos.column)),
          pos_(pos) {}
    int line() const { return pos_.line; }
    int column() const { return pos_.column; }

private:
    SourcePos pos_;
};

/// Kernel failure raised while elaborating a subexpression.
class ElaborateError : public error {
public:
    ElaborateError(const std::string &what, Span span, std::exception_ptr cause, bool limit)
        : error(what), span_(span), cause_(std::move(cause)), limit_(limit) {}
    const Span &span() const { return span_; }
    const std::exception_ptr &cause() const { return cause_; }
    /// True when the cause is a limit_error.
    bool is_limit() const { return limit_; }

private:
    Span span_;
    std::exception_ptr cause_;
    bool limit_;
};

class Expr {
public:
    enum class Kind { number, var, pi, paren, neg, add, sub, mul, div, pow, exp, log, deriv, compose };

    Kind kind() const { return node_->kind; }
    /// Literal text of a number.
    const std::string &text() const { return node_->text; }
    /// Iteration count of a log node (log^k).
    unsigned log_count() const { return node_->k; }
    const std::vector<Expr> &args() const { return node_->args; }
    const Span &span() const { return node_->span; }

    static Expr make(Kind k, std::vector<Expr> args, Span span = {}, std::string text = {},
                     unsigned log_count = 1);

private:
    struct Node {
        Kind kind;
        std::string text;
        unsigned k = 1;
        std::vector<Expr> args;
        Span span;
    };
    std::shared_ptr<const Node> node_;
};

/// Parses the expression grammar (see docs/grammar.md). Throws SyntaxError.
Expr parse(const std::string &text);

/// Canonical text; explicit parentheses are kept, so print(parse(s)) equals s
/// up to whitespace.
std::string print(const Expr &e);

/// Maps the tree to kernel operations under the current budget. Throws
/// ElaborateError for kernel failures.
Series elaborate(const Expr &e);
Series elaborate(const Expr &e, const Budget &budget);

/// parse then elaborate.
Series read_series(const std::string &text);

} // namespace omega

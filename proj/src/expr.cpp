#include "omega/expr.hpp"

#include <cctype>

#include "omega/compose.hpp"

namespace omega {

Expr Expr::make(Kind k, std::vector<Expr> args, Span span, std::string text, unsigned log_count) {
    Expr e;
    e.node_ = std::make_shared<const Node>(Node{k, std::move(text), log_count, std::move(args), span});
    return e;
}

namespace {

using K = Expr::Kind;

enum class Tok { number, ident, plus, minus, star, slash, caret, at, lparen, rparen, end };

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
    SourcePos end;
};

std::string describe(const Token &t) {
    return t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
}

class Lexer {
public:
    explicit Lexer(const std::string &s) : s_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.pos = pos_;
            if (i_ >= s_.size()) {
                t.kind = Tok::end;
                t.end = pos_;
                out.push_back(t);
                return out;
            }
            const char c = s_[i_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i_;
                while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j])))
                    ++j;
                if (j < s_.size() && s_[j] == '.') {
                    ++j;
                    if (j >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[j])))
                        throw SyntaxError("digit expected after '.'", at(j));
                    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j])))
                        ++j;
                }
                t.kind = Tok::number;
                t.text = take(j);
            } else if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t j = i_;
                while (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j])))
                    ++j;
                t.kind = Tok::ident;
                t.text = take(j);
            } else {
                switch (c) {
                case '+': t.kind = Tok::plus; break;
                case '-': t.kind = Tok::minus; break;
                case '*': t.kind = Tok::star; break;
                case '/': t.kind = Tok::slash; break;
                case '^': t.kind = Tok::caret; break;
                case '@': t.kind = Tok::at; break;
                case '(': t.kind = Tok::lparen; break;
                case ')': t.kind = Tok::rparen; break;
                default:
                    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
                }
                t.text = take(i_ + 1);
            }
            t.end = pos_;
            out.push_back(std::move(t));
        }
    }

private:
    void skip_space() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
            advance();
    }
    void advance() {
        if (s_[i_] == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        ++i_;
    }
    std::string take(std::size_t j) {
        std::string r = s_.substr(i_, j - i_);
        while (i_ < j)
            advance();
        return r;
    }
    SourcePos at(std::size_t j) const {
        SourcePos p = pos_;
        for (std::size_t k = i_; k < j; ++k)
            ++p.column;
        return p;
    }

    const std::string &s_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    Expr run() {
        Expr e = compose();
        if (peek().kind != Tok::end)
            throw SyntaxError("unexpected " + describe(peek()), peek().pos);
        return e;
    }

private:
    const Token &peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
    const Token &next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }
    bool accept(Tok k) {
        if (peek().kind != k)
            return false;
        next();
        return true;
    }
    const Token &expect(Tok k, const char *what) {
        if (peek().kind != k)
            throw SyntaxError(std::string(what) + " expected, found " + describe(peek()), peek().pos);
        return next();
    }
    SourcePos last_end() const { return t_[p_ == 0 ? 0 : p_ - 1].end; }

    static Expr binary(K k, Expr a, Expr b) {
        Span s{a.span().begin, b.span().end};
        return Expr::make(k, {std::move(a), std::move(b)}, s);
    }

    Expr compose() {
        Expr e = sum();
        while (accept(Tok::at))
            e = binary(K::compose, e, sum());
        return e;
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (accept(Tok::plus))
                e = binary(K::add, e, product());
            else if (accept(Tok::minus))
                e = binary(K::sub, e, product());
            else
                return e;
        }
    }

    Expr product() {
        Expr e = unary();
        for (;;) {
            if (accept(Tok::star))
                e = binary(K::mul, e, unary());
            else if (accept(Tok::slash))
                e = binary(K::div, e, unary());
            else
                return e;
        }
    }

    Expr unary() {
        if (peek().kind == Tok::minus) {
            SourcePos b = next().pos;
            Expr a = unary();
            return Expr::make(K::neg, {a}, Span{b, a.span().end});
        }
        return power();
    }

    // Exponents may carry a sign: x^-1.
    Expr exponent() {
        if (peek().kind == Tok::minus) {
            SourcePos b = next().pos;
            Expr a = exponent();
            return Expr::make(K::neg, {a}, Span{b, a.span().end});
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (accept(Tok::caret))
            return binary(K::pow, base, exponent());
        return base;
    }

    Expr call(K k, SourcePos b, unsigned count = 1) {
        expect(Tok::lparen, "'('");
        Expr a = compose();
        expect(Tok::rparen, "')'");
        return Expr::make(k, {a}, Span{b, last_end()}, {}, count);
    }

    Expr primary() {
        const Token &t = peek();
        switch (t.kind) {
        case Tok::number: {
            next();
            return Expr::make(K::number, {}, Span{t.pos, t.end}, t.text);
        }
        case Tok::lparen: {
            SourcePos b = next().pos;
            Expr a = compose();
            expect(Tok::rparen, "')'");
            return Expr::make(K::paren, {a}, Span{b, last_end()});
        }
        case Tok::ident: {
            const Token id = next();
            if (id.text == "x")
                return Expr::make(K::var, {}, Span{id.pos, id.end});
            if (id.text == "pi")
                return Expr::make(K::pi, {}, Span{id.pos, id.end});
            if (id.text == "exp")
                return call(K::exp, id.pos);
            if (id.text == "D")
                return call(K::deriv, id.pos);
            if (id.text == "log") {
                if (peek().kind == Tok::caret && peek(1).kind == Tok::number &&
                    peek(2).kind == Tok::lparen) {
                    next();
                    const Token n = next();
                    if (n.text.find('.') != std::string::npos || n.text.size() > 2 || n.text == "0")
                        throw SyntaxError("iteration count must be a positive integer", n.pos);
                    return call(K::log, id.pos, static_cast<unsigned>(std::stoul(n.text)));
                }
                return call(K::log, id.pos);
            }
            throw SyntaxError("unknown identifier '" + id.text + "'", id.pos);
        }
        default:
            throw SyntaxError("unexpected " + describe(t), t.pos);
        }
    }

    std::vector<Token> t_;
    std::size_t p_ = 0;
};

int precedence(K k) {
    switch (k) {
    case K::compose: return 0;
    case K::add:
    case K::sub: return 1;
    case K::mul:
    case K::div: return 2;
    case K::neg: return 3;
    case K::pow: return 4;
    default: return 5;
    }
}

std::string wrap(const Expr &e, int min_prec) {
    std::string s = print(e);
    return precedence(e.kind()) < min_prec ? "(" + s + ")" : s;
}

mpq_class decimal(const std::string &text) {
    auto dot = text.find('.');
    if (dot == std::string::npos)
        return mpq_class(mpz_class(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
    mpq_class q(mpz_class(digits), den);
    q.canonicalize();
    return q;
}

std::optional<Constant> as_constant(const Series &s) {
    auto t = s.term(0);
    if (!t)
        return Constant();
    if (!t->mono.is_one() || s.term(1))
        return std::nullopt;
    return t->coef;
}

Series eval(const Expr &e);

Series eval_checked(const Expr &e) {
    try {
        return eval(e);
    } catch (const ElaborateError &) {
        throw;
    } catch (const SyntaxError &) {
        throw;
    } catch (const limit_error &err) {
        throw ElaborateError(err.what(), e.span(), std::current_exception(), true);
    } catch (const error &err) {
        throw ElaborateError(err.what(), e.span(), std::current_exception(), false);
    }
}

const Expr &unparen(const Expr &e) {
    return e.kind() == K::paren ? unparen(e.args()[0]) : e;
}

Series eval(const Expr &e) {
    const auto &a = e.args();
    switch (e.kind()) {
    case K::number:
        return Series(Constant(decimal(e.text())));
    case K::var:
        return Series::x();
    case K::pi:
        return Series(Constant::pi());
    case K::paren:
        return eval_checked(a[0]);
    case K::neg:
        return -eval_checked(a[0]);
    case K::add:
        return eval_checked(a[0]) + eval_checked(a[1]);
    case K::sub:
        return eval_checked(a[0]) - eval_checked(a[1]);
    case K::mul:
        return eval_checked(a[0]) * eval_checked(a[1]);
    case K::div:
        return eval_checked(a[0]) / eval_checked(a[1]);
    case K::pow: {
        Series base = eval_checked(a[0]);
        Series ex = eval_checked(a[1]);
        if (auto c = as_constant(ex))
            return power(base, *c);
        return exp_series(ex * log_series(base));
    }
    case K::exp: {
        // exp(log(u)) is u once u > 0 is known.
        const Expr &in = unparen(a[0]);
        if (in.kind() == K::log && in.log_count() == 1) {
            Series u = eval_checked(in.args()[0]);
            if (u.is_zero() || leading_term(u).coef.sign() <= 0)
                throw not_positive("log of a series that is not positive");
            return u;
        }
        return exp_series(eval_checked(a[0]));
    }
    case K::log: {
        const Expr &in = unparen(a[0]);
        if (in.kind() == K::exp && e.log_count() == 1)
            return eval_checked(in.args()[0]);
        Series u = eval_checked(a[0]);
        for (unsigned i = 0; i < e.log_count(); ++i)
            u = log_series(u);
        return u;
    }
    case K::deriv:
        return derive(eval_checked(a[0]));
    case K::compose:
        return compose(eval_checked(a[0]), eval_checked(a[1]));
    }
    return Series();
}

} // namespace

Expr parse(const std::string &text) { return Parser(Lexer(text).run()).run(); }

std::string print(const Expr &e) {
    const auto &a = e.args();
    switch (e.kind()) {
    case K::number:
        return e.text();
    case K::var:
        return "x";
    case K::pi:
        return "pi";
    case K::paren:
        return "(" + print(a[0]) + ")";
    case K::neg:
        return "-" + wrap(a[0], 3);
    case K::add:
        return wrap(a[0], 1) + " + " + wrap(a[1], 2);
    case K::sub:
        return wrap(a[0], 1) + " - " + wrap(a[1], 2);
    case K::mul:
        return wrap(a[0], 2) + "*" + wrap(a[1], 3);
    case K::div:
        return wrap(a[0], 2) + "/" + wrap(a[1], 3);
    case K::pow:
        return wrap(a[0], 5) + "^" + wrap(a[1], a[1].kind() == K::neg ? 3 : 4);
    case K::exp:
        return "exp(" + print(a[0]) + ")";
    case K::log:
        return (e.log_count() == 1 ? "log(" : "log^" + std::to_string(e.log_count()) + "(") +
               print(a[0]) + ")";
    case K::deriv:
        return "D(" + print(a[0]) + ")";
    case K::compose:
        return wrap(a[0], 0) + " @ " + wrap(a[1], 1);
    }
    return {};
}

Series elaborate(const Expr &e) { return eval_checked(e); }

Series elaborate(const Expr &e, const Budget &budget) {
    BudgetScope scope(budget);
    return eval_checked(e);
}

Series read_series(const std::string &text) { return elaborate(parse(text)); }

} // namespace omega

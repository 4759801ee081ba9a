#include "omega/constant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omega {

Interval::Interval(mpfr_prec_t prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval &other) {
    mpfr_init2(lo_, other.precision());
    mpfr_init2(hi_, other.precision());
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval &&other) noexcept {
    mpfr_init2(lo_, MPFR_PREC_MIN);
    mpfr_init2(hi_, MPFR_PREC_MIN);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
}

Interval &Interval::operator=(const Interval &other) {
    if (this != &other) {
        mpfr_set_prec(lo_, other.precision());
        mpfr_set_prec(hi_, other.precision());
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval &Interval::operator=(Interval &&other) noexcept {
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Interval Interval::point(const mpq_class &q, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

bool Interval::valid() const { return !mpfr_nan_p(lo_) && !mpfr_nan_p(hi_); }

bool Interval::contains(const mpq_class &q) const {
    if (!valid())
        return false;
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool Interval::contains_zero() const {
    return !valid() || (mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0);
}

int Interval::sign() const {
    if (!valid())
        return 0;
    if (mpfr_sgn(lo_) > 0)
        return 1;
    if (mpfr_sgn(hi_) < 0)
        return -1;
    return 0;
}

bool Interval::subset_of(const Interval &o) const {
    return valid() && o.valid() && mpfr_cmp(lo_, o.lo_) >= 0 && mpfr_cmp(hi_, o.hi_) <= 0;
}

bool Interval::intersects(const Interval &o) const {
    return valid() && o.valid() && mpfr_cmp(lo_, o.hi_) <= 0 && mpfr_cmp(o.lo_, hi_) <= 0;
}

double Interval::width() const {
    mpfr_t w;
    mpfr_init2(w, precision() + 2);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

double Interval::midpoint() const {
    return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
}

std::string Interval::to_string(int digits) const {
    auto fmt = [digits](mpfr_srcptr v, mpfr_rnd_t rnd) {
        char *buf = nullptr;
        std::string spec = "%." + std::to_string(digits) + "R" + (rnd == MPFR_RNDD ? "D" : "U") + "g";
        mpfr_asprintf(&buf, spec.c_str(), v);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    };
    return "[" + fmt(lo_, MPFR_RNDD) + ", " + fmt(hi_, MPFR_RNDU) + "]";
}

namespace {

mpfr_prec_t joint_prec(const Interval &a, const Interval &b) {
    return std::min(a.precision(), b.precision());
}

} // namespace

Interval operator+(const Interval &a, const Interval &b) {
    Interval r(joint_prec(a, b));
    mpfr_add(r.lower(), a.lower(), b.lower(), MPFR_RNDD);
    mpfr_add(r.upper(), a.upper(), b.upper(), MPFR_RNDU);
    return r;
}

Interval operator-(const Interval &a) {
    Interval r(a.precision());
    mpfr_neg(r.lower(), a.upper(), MPFR_RNDD);
    mpfr_neg(r.upper(), a.lower(), MPFR_RNDU);
    return r;
}

Interval operator*(const Interval &a, const Interval &b) {
    const mpfr_prec_t p = joint_prec(a, b);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    mpfr_srcptr xs[2] = {a.lower(), a.upper()};
    mpfr_srcptr ys[2] = {b.lower(), b.upper()};
    bool first = true;
    for (auto x : xs) {
        for (auto y : ys) {
            mpfr_mul(t, x, y, MPFR_RNDD);
            if (first || mpfr_cmp(t, r.lower()) < 0)
                mpfr_set(r.lower(), t, MPFR_RNDD);
            mpfr_mul(t, x, y, MPFR_RNDU);
            if (first || mpfr_cmp(t, r.upper()) > 0)
                mpfr_set(r.upper(), t, MPFR_RNDU);
            first = false;
        }
    }
    mpfr_clear(t);
    return r;
}

Interval reciprocal(const Interval &a) {
    Interval r(a.precision());
    if (a.contains_zero()) {
        mpfr_set_nan(r.lower());
        mpfr_set_nan(r.upper());
        return r;
    }
    mpfr_ui_div(r.lower(), 1, a.upper(), MPFR_RNDD);
    mpfr_ui_div(r.upper(), 1, a.lower(), MPFR_RNDU);
    return r;
}

Interval exp(const Interval &a) {
    Interval r(a.precision());
    mpfr_exp(r.lower(), a.lower(), MPFR_RNDD);
    mpfr_exp(r.upper(), a.upper(), MPFR_RNDU);
    return r;
}

Interval log(const Interval &a) {
    Interval r(a.precision());
    if (!a.valid() || mpfr_sgn(a.lower()) <= 0) {
        mpfr_set_nan(r.lower());
        mpfr_set_nan(r.upper());
        return r;
    }
    mpfr_log(r.lower(), a.lower(), MPFR_RNDD);
    mpfr_log(r.upper(), a.upper(), MPFR_RNDU);
    return r;
}

Interval pi_interval(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_pi(r.lower(), MPFR_RNDD);
    mpfr_const_pi(r.upper(), MPFR_RNDU);
    return r;
}

} // namespace omega

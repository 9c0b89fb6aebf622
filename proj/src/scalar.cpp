#include "crrigid/scalar.hpp"

#include <atomic>
#include <functional>
#include <vector>

namespace crr {

namespace {
std::atomic<int> g_d{2};
}

bool isSquareFree(long d) {
    if (d <= 0) return false;
    for (long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

int fieldD() { return g_d.load(std::memory_order_relaxed); }

void setFieldD(int d) {
    if (!isSquareFree(d) || d == 1)
        throw std::invalid_argument("d must be a square-free integer > 1, got " + std::to_string(d));
    g_d.store(d);
}

FieldScope::FieldScope(int d) : saved_(fieldD()) { setFieldD(d); }
FieldScope::~FieldScope() { g_d.store(saved_); }

// ---- Real ----

int Real::sign() const {
    int a = sgn(r), b = sgn(s);
    if (b == 0) return a;
    if (a == 0 || a == b) return b;
    // opposite signs: compare r^2 with d*s^2
    mpq_class lhs = r * r, rhs = s * s * fieldD();
    int c = cmp(lhs, rhs);
    return c > 0 ? a : (c < 0 ? b : 0);
}

Real &Real::operator+=(const Real &o) {
    r += o.r;
    if (sgn(o.s)) s += o.s;
    return *this;
}

Real &Real::operator-=(const Real &o) {
    r -= o.r;
    if (sgn(o.s)) s -= o.s;
    return *this;
}

Real &Real::operator*=(const Real &o) {
    if (sgn(s) == 0 && sgn(o.s) == 0) {
        r *= o.r;
        return *this;
    }
    mpq_class nr = r * o.r + s * o.s * fieldD();
    mpq_class ns = r * o.s + s * o.r;
    r.swap(nr);
    s.swap(ns);
    return *this;
}

Real Real::inv() const {
    if (isZero()) throw DivisionByZero("inverse of 0 in Q(sqrt d)");
    if (sgn(s) == 0) return Real(1 / r);
    mpq_class n = r * r - s * s * fieldD();
    return Real(r / n, -s / n);
}

void addMul(Real &acc, const Real &b, const Real &c) {
    if (sgn(b.s) == 0 && sgn(c.s) == 0) {
        acc.r += b.r * c.r;
        return;
    }
    acc.r += b.r * c.r + b.s * c.s * fieldD();
    acc.s += b.r * c.s + b.s * c.r;
}

namespace {
std::string qstr(const mpq_class &q) { return q.get_str(); }

// appends sign-aware "coef*unit" to out
void appendTerm(std::string &out, const mpq_class &q, const std::string &unit) {
    if (sgn(q) == 0) return;
    mpq_class a = abs(q);
    std::string body;
    if (unit.empty())
        body = qstr(a);
    else if (a == 1)
        body = unit;
    else if (a.get_den() == 1)
        body = a.get_num().get_str() + "*" + unit;
    else if (a.get_num() == 1)
        body = unit + "/" + a.get_den().get_str();
    else
        body = a.get_num().get_str() + "*" + unit + "/" + a.get_den().get_str();
    if (out.empty())
        out = (sgn(q) < 0 ? "-" : "") + body;
    else
        out += (sgn(q) < 0 ? " - " : " + ") + body;
}
} // namespace

std::string Real::str() const {
    std::string out;
    appendTerm(out, r, "");
    appendTerm(out, s, "sqrt(" + std::to_string(fieldD()) + ")");
    return out.empty() ? "0" : out;
}

std::size_t Real::hash() const {
    std::hash<std::string> h;
    return h(r.get_str()) * 31u + h(s.get_str());
}

// ---- Scalar ----

Scalar &Scalar::operator+=(const Scalar &o) {
    re += o.re;
    if (!o.im.isZero()) im += o.im;
    return *this;
}

Scalar &Scalar::operator-=(const Scalar &o) {
    re -= o.re;
    if (!o.im.isZero()) im -= o.im;
    return *this;
}

Scalar &Scalar::operator*=(const Scalar &o) {
    bool ai = im.isZero(), bi = o.im.isZero();
    if (ai && bi) {
        re *= o.re;
        return *this;
    }
    if (bi) {
        re *= o.re;
        im *= o.re;
        return *this;
    }
    if (ai) {
        im = re * o.im;
        re *= o.re;
        return *this;
    }
    Real nr = re * o.re - im * o.im;
    Real ni = re * o.im + im * o.re;
    re = std::move(nr);
    im = std::move(ni);
    return *this;
}

Scalar Scalar::inv() const {
    if (isZero()) throw DivisionByZero("inverse of 0 in Q(i, sqrt d)");
    if (im.isZero()) return Scalar(re.inv());
    Real n = re * re + im * im;
    Real ni = n.inv();
    return Scalar(re * ni, -(im * ni));
}

void addMul(Scalar &acc, const Scalar &b, const Scalar &c) {
    bool bi = b.im.isZero(), ci = c.im.isZero();
    if (bi && ci) {
        addMul(acc.re, b.re, c.re);
        return;
    }
    if (ci) {
        addMul(acc.re, b.re, c.re);
        addMul(acc.im, b.im, c.re);
        return;
    }
    if (bi) {
        addMul(acc.re, b.re, c.re);
        addMul(acc.im, b.re, c.im);
        return;
    }
    addMul(acc.re, b.re, c.re);
    addMul(acc.re, -b.im, c.im);
    addMul(acc.im, b.re, c.im);
    addMul(acc.im, b.im, c.re);
}

std::string Scalar::str() const {
    std::string out, sd = "sqrt(" + std::to_string(fieldD()) + ")";
    appendTerm(out, re.r, "");
    appendTerm(out, re.s, sd);
    appendTerm(out, im.r, "i");
    appendTerm(out, im.s, "i*" + sd);
    return out.empty() ? "0" : out;
}

} // namespace crr

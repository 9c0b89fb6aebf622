#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crr {

struct DivisionByZero : std::domain_error {
    using std::domain_error::domain_error;
};

// The square-free d of Q(sqrt d). One value per computation; FieldScope
// swaps it for the lifetime of a block.
int fieldD();
void setFieldD(int d);
bool isSquareFree(long d);

class FieldScope {
public:
    explicit FieldScope(int d);
    ~FieldScope();
    FieldScope(const FieldScope &) = delete;
    FieldScope &operator=(const FieldScope &) = delete;

private:
    int saved_;
};

// r + s*sqrt(d), the real subfield.
class Real {
public:
    mpq_class r, s;

    Real() = default;
    Real(long v) : r(v) {}
    explicit Real(const mpq_class &q, const mpq_class &t = 0) : r(q), s(t) {}

    static Real sqrtD() { return Real(0, 1); }

    bool isZero() const { return sgn(r) == 0 && sgn(s) == 0; }
    bool isRational() const { return sgn(s) == 0; }
    int sign() const;

    Real operator-() const { return Real(-r, -s); }
    Real &operator+=(const Real &o);
    Real &operator-=(const Real &o);
    Real &operator*=(const Real &o);
    Real inv() const;

    friend Real operator+(Real a, const Real &b) { return a += b; }
    friend Real operator-(Real a, const Real &b) { return a -= b; }
    friend Real operator*(Real a, const Real &b) { return a *= b; }
    friend Real operator/(const Real &a, const Real &b) { return a * b.inv(); }
    friend bool operator==(const Real &a, const Real &b) { return a.r == b.r && a.s == b.s; }
    friend bool operator!=(const Real &a, const Real &b) { return !(a == b); }

    std::string str() const;
    std::size_t hash() const;
};

// a + b*sqrt(d) + i*(c + e*sqrt(d))
class Scalar {
public:
    Real re, im;

    Scalar() = default;
    Scalar(long v) : re(v) {}
    Scalar(const Real &x, const Real &y = Real()) : re(x), im(y) {}
    static Scalar rational(const mpq_class &q) { return Scalar(Real(q)); }
    static Scalar fromParts(const mpq_class &a, const mpq_class &b, const mpq_class &c,
                            const mpq_class &e) {
        return Scalar(Real(a, b), Real(c, e));
    }
    static Scalar I() { return Scalar(Real(), Real(1)); }
    static Scalar sqrtD() { return Scalar(Real::sqrtD()); }

    const mpq_class &a() const { return re.r; }
    const mpq_class &b() const { return re.s; }
    const mpq_class &c() const { return im.r; }
    const mpq_class &e() const { return im.s; }

    bool isZero() const { return re.isZero() && im.isZero(); }
    bool isReal() const { return im.isZero(); }
    bool isOne() const { return re.r == 1 && sgn(re.s) == 0 && im.isZero(); }

    Scalar conj() const { return Scalar(re, -im); }
    Scalar operator-() const { return Scalar(-re, -im); }
    Scalar &operator+=(const Scalar &o);
    Scalar &operator-=(const Scalar &o);
    Scalar &operator*=(const Scalar &o);
    Scalar inv() const;
    Scalar timesI() const { return Scalar(-im, re); }

    friend Scalar operator+(Scalar a, const Scalar &b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar &b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar &b) { return a *= b; }
    friend Scalar operator/(const Scalar &a, const Scalar &b) { return a * b.inv(); }
    friend bool operator==(const Scalar &a, const Scalar &b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Scalar &a, const Scalar &b) { return !(a == b); }

    // Literal syntax, e.g. "1/2 - 3*i*sqrt(2)".
    std::string str() const;
};

struct RealImag {
    Real real, imag;
};
inline RealImag realImagSplit(const Scalar &x) { return {x.re, x.im}; }

// a += b*c without temporaries where possible
void addMul(Scalar &acc, const Scalar &b, const Scalar &c);
void addMul(Real &acc, const Real &b, const Real &c);

} // namespace crr

#pragma once

#include "crrigid/errors.hpp"
#include "crrigid/scalar.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace crr {

constexpr int kMaxVars = 8;
using Mono = std::array<std::int16_t, kMaxVars>;

struct MonoHash {
    std::size_t operator()(const Mono &m) const noexcept;
};

// Ordered variable names with per-variable weights. Truncation is by weighted
// degree sum(w_i e_i); all weights 1 gives plain total degree. At most one
// variable may take negative exponents, bounded below by -floor.
class VarSet {
public:
    VarSet(std::vector<std::string> names, std::vector<int> weights = {}, int laurent = -1,
           int floor = 0);

    std::size_t size() const { return names_.size(); }
    const std::string &name(std::size_t i) const { return names_[i]; }
    const std::vector<std::string> &names() const { return names_; }
    int weight(std::size_t i) const { return weights_[i]; }
    int laurent() const { return laurent_; }
    int floor() const { return floor_; }
    int index(const std::string &name) const;

    int degree(const Mono &m) const {
        int d = 0;
        for (std::size_t i = 0; i < names_.size(); ++i) d += weights_[i] * m[i];
        return d;
    }

    bool sameAs(const VarSet &o) const;
    std::string describe() const;

private:
    std::vector<std::string> names_;
    std::vector<int> weights_;
    int laurent_;
    int floor_;
};

using Vars = std::shared_ptr<const VarSet>;
Vars makeVars(std::vector<std::string> names, std::vector<int> weights = {}, int laurent = -1,
              int floor = 0);

// Order used for data known exactly (polynomials); min() with anything finite
// yields the finite order.
constexpr int kExact = 1 << 20;

class Series {
public:
    using Term = std::pair<Mono, Scalar>;

    Series() = default;
    Series(Vars vars, int order);

    static Series constant(Vars vars, const Scalar &c, int order);
    static Series variable(Vars vars, std::size_t idx, int order);
    static Series variable(Vars vars, const std::string &name, int order);
    static Series monomial(Vars vars, const Mono &m, const Scalar &c, int order);

    const Vars &vars() const { return vars_; }
    int order() const { return order_; }
    const std::vector<Term> &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool isZero() const { return terms_.empty(); }

    Scalar coeff(const Mono &m) const;
    Scalar constantTerm() const;
    // lowest weighted degree present, or order+1 when no term survives
    int valuation() const;
    int maxDegree() const;

    Series truncated(int order) const;
    Series conj() const; // coefficients only

    Series &operator+=(const Series &o);
    Series &operator-=(const Series &o);
    Series operator-() const;
    Series &operator*=(const Scalar &c);

    friend Series operator+(Series a, const Series &b) { return a += b; }
    friend Series operator-(Series a, const Series &b) { return a -= b; }
    friend Series operator*(Series a, const Scalar &c) { return a *= c; }
    friend Series operator*(const Scalar &c, Series a) { return a *= c; }
    friend Series operator*(const Series &a, const Series &b);

    // equal coefficient maps (orders are compared by the caller when relevant)
    bool sameTerms(const Series &o) const { return terms_ == o.terms_; }
    friend bool operator==(const Series &a, const Series &b) {
        return a.order_ == b.order_ && a.terms_ == b.terms_;
    }

    // graded lex: ascending weighted degree, larger exponents first inside a degree
    std::string str() const;

    // builder access
    class Builder;

private:
    friend class Builder;
    Vars vars_;
    int order_ = 0;
    std::vector<Term> terms_; // sorted by Mono (lexicographic), no zeros
};

// Accumulates monomials then produces a normalized Series.
class Series::Builder {
public:
    Builder(Vars vars, int order);
    void add(const Mono &m, const Scalar &c);
    void addMul(const Mono &m, const Scalar &a, const Scalar &b);
    Series build();

private:
    Vars vars_;
    int order_;
    std::vector<Term> raw_;
};

void requireSameVars(const Series &a, const Series &b, const char *op);

Series mul(const Series &a, const Series &b);
Series pow(const Series &a, int n);
Series partialDerivative(const Series &f, std::size_t var, int times = 1);
Series partialDerivative(const Series &f, const std::string &var, int times = 1);

// Conjugates coefficients and moves variable i of f to variable perm[i] of
// `target` (weights must agree).
Series conjugateSeries(const Series &f, const Vars &target, const std::vector<int> &perm);
// Same renaming without conjugation.
Series remap(const Series &f, const Vars &target, const std::vector<int> &perm);
Series remap(const Series &f, const Vars &target); // by variable name
// Sets variable idx to zero.
Series setZero(const Series &f, std::size_t idx);

// f(images...), one image per variable of f, all in `target` variables.
// Images must have zero constant term.
Series substitute(const Series &f, const std::vector<Series> &images, int order);
Series substitute(const Series &f, const std::map<std::string, Series> &bindings,
                  const Vars &target, int order);

Series invertUnit(const Series &f);
Series sqrtUnit(const Series &f);

// Solves F(x..., y) = 0 for y = y(x...) with y(0)=0, degree by degree.
// Returns a series in `target` (the variables of F other than y, in order).
Series solveImplicit(const Series &F, std::size_t y, const Vars &target, int order);

// psiHat(z,u) = u + sum_{j>=2} C_j(z) u^j  ->  psi(z,t) with psiHat(z,psi) = t.
// Both use a two-variable set (z, u) / (z, t) with u/t at index 1.
Series reversion(const Series &psiHat, const Vars &target, int order);

// Splits a series with Laurent variable z (index 0) and w (index 1) of weights
// (1,2) into the part with non-negative z exponent and the coefficients of the
// negative part, indexed by (m1, m2) = (e_z + 2 e_w, e_w).
struct LaurentSplit {
    Series holomorphic;
    std::map<std::pair<int, int>, Scalar> obstruction;
};
LaurentSplit laurentSplit(const Series &f, const Vars &holomorphicVars);

} // namespace crr

#include "crrigid/series.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace crr {

std::size_t MonoHash::operator()(const Mono &m) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto e : m) {
        h ^= static_cast<std::uint16_t>(e);
        h *= 0x100000001b3ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

// ---- VarSet ----

VarSet::VarSet(std::vector<std::string> names, std::vector<int> weights, int laurent, int floor)
    : names_(std::move(names)), weights_(std::move(weights)), laurent_(laurent), floor_(floor) {
    if (names_.size() > static_cast<std::size_t>(kMaxVars))
        throw VariableMismatch("too many variables");
    if (weights_.empty()) weights_.assign(names_.size(), 1);
    if (weights_.size() != names_.size()) throw VariableMismatch("weights/names length differ");
    std::set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) throw VariableMismatch("duplicate variable name");
    for (int w : weights_)
        if (w < 1) throw VariableMismatch("variable weights must be positive");
    if (laurent_ >= static_cast<int>(names_.size()) || laurent_ < -1)
        throw VariableMismatch("bad Laurent variable index");
    if (floor_ < 0) throw VariableMismatch("negative Laurent floor");
}

int VarSet::index(const std::string &name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

bool VarSet::sameAs(const VarSet &o) const {
    return names_ == o.names_ && weights_ == o.weights_ && laurent_ == o.laurent_ &&
           floor_ == o.floor_;
}

std::string VarSet::describe() const {
    std::string s = "(";
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (i) s += ",";
        s += names_[i];
        if (weights_[i] != 1) s += ":" + std::to_string(weights_[i]);
    }
    return s + ")";
}

Vars makeVars(std::vector<std::string> names, std::vector<int> weights, int laurent, int floor) {
    return std::make_shared<const VarSet>(std::move(names), std::move(weights), laurent, floor);
}

void requireSameVars(const Series &a, const Series &b, const char *op) {
    if (a.vars() == b.vars()) return;
    if (!a.vars() || !b.vars() || !a.vars()->sameAs(*b.vars()))
        throw VariableMismatch(std::string(op) + ": " +
                               (a.vars() ? a.vars()->describe() : "?") + " vs " +
                               (b.vars() ? b.vars()->describe() : "?"));
}

// ---- Builder ----

Series::Builder::Builder(Vars vars, int order) : vars_(std::move(vars)), order_(order) {}

void Series::Builder::add(const Mono &m, const Scalar &c) {
    if (c.isZero()) return;
    raw_.emplace_back(m, c);
}

void Series::Builder::addMul(const Mono &m, const Scalar &a, const Scalar &b) {
    Scalar c = a * b;
    if (!c.isZero()) raw_.emplace_back(m, std::move(c));
}

Series Series::Builder::build() {
    Series s(vars_, order_);
    std::sort(raw_.begin(), raw_.end(),
              [](const Term &x, const Term &y) { return x.first < y.first; });
    const VarSet &vs = *vars_;
    int lv = vs.laurent();
    for (std::size_t i = 0; i < raw_.size();) {
        std::size_t j = i + 1;
        Scalar c = std::move(raw_[i].second);
        while (j < raw_.size() && raw_[j].first == raw_[i].first) c += raw_[j++].second;
        const Mono &m = raw_[i].first;
        if (!c.isZero() && vs.degree(m) <= order_) {
            if (lv >= 0 && m[lv] < -vs.floor())
                throw LaurentFloor("exponent " + std::to_string(m[lv]) + " below floor -" +
                                   std::to_string(vs.floor()));
            s.terms_.emplace_back(m, std::move(c));
        }
        i = j;
    }
    raw_.clear();
    return s;
}

// ---- Series basics ----

Series::Series(Vars vars, int order) : vars_(std::move(vars)), order_(order) {}

Series Series::constant(Vars vars, const Scalar &c, int order) {
    Builder b(vars, order);
    b.add(Mono{}, c);
    return b.build();
}

Series Series::variable(Vars vars, std::size_t idx, int order) {
    if (idx >= vars->size()) throw VariableMismatch("variable index out of range");
    Mono m{};
    m[idx] = 1;
    return monomial(std::move(vars), m, Scalar(1), order);
}

Series Series::variable(Vars vars, const std::string &name, int order) {
    int i = vars->index(name);
    if (i < 0) throw VariableMismatch("unknown variable " + name);
    return variable(std::move(vars), static_cast<std::size_t>(i), order);
}

Series Series::monomial(Vars vars, const Mono &m, const Scalar &c, int order) {
    Builder b(vars, order);
    b.add(m, c);
    return b.build();
}

Scalar Series::coeff(const Mono &m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term &t, const Mono &k) { return t.first < k; });
    if (it != terms_.end() && it->first == m) return it->second;
    return Scalar();
}

Scalar Series::constantTerm() const { return coeff(Mono{}); }

int Series::valuation() const {
    if (terms_.empty()) return order_ >= kExact ? kExact : order_ + 1;
    int v = kExact;
    for (auto &t : terms_) v = std::min(v, vars_->degree(t.first));
    return v;
}

int Series::maxDegree() const {
    int v = -kExact;
    for (auto &t : terms_) v = std::max(v, vars_->degree(t.first));
    return v;
}

Series Series::truncated(int order) const {
    Series s(vars_, std::min(order, order_));
    for (auto &t : terms_)
        if (vars_->degree(t.first) <= s.order_) s.terms_.push_back(t);
    return s;
}

Series Series::conj() const {
    Series s = *this;
    for (auto &t : s.terms_) t.second = t.second.conj();
    return s;
}

Series &Series::operator+=(const Series &o) {
    requireSameVars(*this, o, "add");
    int ord = std::min(order_, o.order_);
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto i = terms_.begin();
    auto j = o.terms_.begin();
    auto push = [&](Term t) {
        if (!t.second.isZero() && vars_->degree(t.first) <= ord) out.push_back(std::move(t));
    };
    while (i != terms_.end() || j != o.terms_.end()) {
        if (j == o.terms_.end() || (i != terms_.end() && i->first < j->first)) {
            push(std::move(*i++));
        } else if (i == terms_.end() || j->first < i->first) {
            push(*j++);
        } else {
            Term t = std::move(*i++);
            t.second += (j++)->second;
            push(std::move(t));
        }
    }
    terms_.swap(out);
    order_ = ord;
    return *this;
}

Series Series::operator-() const {
    Series s = *this;
    for (auto &t : s.terms_) t.second = -t.second;
    return s;
}

Series &Series::operator-=(const Series &o) { return *this += -o; }

Series &Series::operator*=(const Scalar &c) {
    if (c.isZero()) {
        terms_.clear();
        return *this;
    }
    for (auto &t : terms_) t.second *= c;
    return *this;
}

namespace {

Series mulTo(const Series &a, const Series &b, int ord) {
    const VarSet &vs = *a.vars();
    std::size_t n = vs.size();
    // b terms sorted by degree for early exit
    std::vector<std::pair<int, const Series::Term *>> bs;
    bs.reserve(b.size());
    for (auto &t : b.terms()) bs.emplace_back(vs.degree(t.first), &t);
    std::stable_sort(bs.begin(), bs.end(),
                     [](const auto &x, const auto &y) { return x.first < y.first; });
    std::unordered_map<Mono, Scalar, MonoHash> acc;
    acc.reserve(a.size() * 4 + 16);
    for (auto &ta : a.terms()) {
        int da = vs.degree(ta.first);
        for (auto &[db, tb] : bs) {
            if (da + db > ord) break;
            Mono m{};
            for (std::size_t k = 0; k < n; ++k)
                m[k] = static_cast<std::int16_t>(ta.first[k] + tb->first[k]);
            addMul(acc[m], ta.second, tb->second);
        }
    }
    Series::Builder bld(a.vars(), ord);
    for (auto &[m, c] : acc) bld.add(m, c);
    return bld.build();
}

int mulOrder(const Series &a, const Series &b) {
    int va = a.valuation(), vb = b.valuation();
    if (a.order() >= kExact && b.order() >= kExact) return kExact;
    long oa = static_cast<long>(a.order()) + std::min(0, vb);
    long ob = static_cast<long>(b.order()) + std::min(0, va);
    return static_cast<int>(std::min({oa, ob, static_cast<long>(kExact)}));
}

} // namespace

Series operator*(const Series &a, const Series &b) {
    requireSameVars(a, b, "mul");
    return mulTo(a, b, mulOrder(a, b));
}

Series mul(const Series &a, const Series &b) { return a * b; }

Series pow(const Series &a, int n) {
    if (n < 0) throw std::invalid_argument("negative power");
    Series r = Series::constant(a.vars(), Scalar(1), a.order());
    Series base = a;
    while (n) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return r;
}

std::string Series::str() const {
    if (!vars_ || terms_.empty()) return "0";
    std::vector<const Term *> ts;
    for (auto &t : terms_) ts.push_back(&t);
    const VarSet &vs = *vars_;
    std::sort(ts.begin(), ts.end(), [&](const Term *x, const Term *y) {
        int dx = vs.degree(x->first), dy = vs.degree(y->first);
        if (dx != dy) return dx < dy;
        return y->first < x->first;
    });
    std::string out;
    for (const Term *t : ts) {
        std::string mono;
        for (std::size_t k = 0; k < vs.size(); ++k) {
            int e = t->first[k];
            if (!e) continue;
            if (!mono.empty()) mono += "*";
            mono += vs.name(k);
            if (e != 1) mono += "^" + (e < 0 ? "(" + std::to_string(e) + ")" : std::to_string(e));
        }
        std::string cs = t->second.str();
        bool compound = cs.find(' ') != std::string::npos;
        bool neg = !compound && cs[0] == '-';
        if (neg) cs = cs.substr(1);
        std::string body;
        if (mono.empty())
            body = compound ? "(" + cs + ")" : cs;
        else if (cs == "1")
            body = mono;
        else if (!compound && cs.find('/') != std::string::npos) {
            // keep the denominator last: 3*i/2 * w -> 3*i*w/2
            auto slash = cs.find('/');
            std::string num = cs.substr(0, slash);
            body = (num == "1" ? "" : num + "*") + mono + cs.substr(slash);
        }
        else
            body = (compound ? "(" + cs + ")" : cs) + "*" + mono;
        if (out.empty())
            out = (neg ? "-" : "") + body;
        else
            out += (neg ? " - " : " + ") + body;
    }
    return out;
}

// ---- calculus ----

Series partialDerivative(const Series &f, std::size_t var, int times) {
    const VarSet &vs = *f.vars();
    if (var >= vs.size()) throw VariableMismatch("derivative variable out of range");
    int ord = f.order() >= kExact ? kExact : f.order() - times * vs.weight(var);
    Series::Builder b(f.vars(), ord);
    for (auto &t : f.terms()) {
        long e = t.first[var];
        mpq_class k = 1;
        for (int j = 0; j < times; ++j) k *= (e - j);
        if (sgn(k) == 0) continue;
        Mono m = t.first;
        m[var] = static_cast<std::int16_t>(m[var] - times);
        b.add(m, t.second * Scalar::rational(k));
    }
    return b.build();
}

Series partialDerivative(const Series &f, const std::string &var, int times) {
    int i = f.vars()->index(var);
    if (i < 0) throw VariableMismatch("unknown variable " + var);
    return partialDerivative(f, static_cast<std::size_t>(i), times);
}

namespace {
Series permuteVars(const Series &f, const Vars &target, const std::vector<int> &perm, bool cj) {
    const VarSet &vs = *f.vars();
    if (perm.size() != vs.size()) throw VariableMismatch("renaming has wrong length");
    std::vector<bool> used(target->size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        int j = perm[i];
        if (j < 0 || j >= static_cast<int>(target->size()) || used[j])
            throw VariableMismatch("renaming is not injective");
        used[j] = true;
        bool hasTerms = false;
        for (auto &t : f.terms()) hasTerms |= t.first[i] != 0;
        if (hasTerms && target->weight(j) != vs.weight(i))
            throw VariableMismatch("renaming changes weight of " + vs.name(i));
        if (static_cast<int>(i) == vs.laurent() && target->laurent() != j)
            for (auto &t : f.terms())
                if (t.first[i] < 0) throw VariableMismatch("negative exponent moved off Laurent slot");
    }
    Series::Builder b(target, f.order());
    for (auto &t : f.terms()) {
        Mono m{};
        for (std::size_t i = 0; i < perm.size(); ++i) m[perm[i]] = t.first[i];
        b.add(m, cj ? t.second.conj() : t.second);
    }
    return b.build();
}
} // namespace

Series conjugateSeries(const Series &f, const Vars &target, const std::vector<int> &perm) {
    return permuteVars(f, target, perm, true);
}

Series remap(const Series &f, const Vars &target, const std::vector<int> &perm) {
    return permuteVars(f, target, perm, false);
}

Series remap(const Series &f, const Vars &target) {
    const VarSet &vs = *f.vars();
    std::vector<int> perm(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        perm[i] = target->index(vs.name(i));
        if (perm[i] < 0) {
            for (auto &t : f.terms())
                if (t.first[i] != 0) throw VariableMismatch("variable " + vs.name(i) + " not in target");
        }
    }
    // unused source variables with no terms map to spare target slots
    Series::Builder b(target, f.order());
    for (auto &t : f.terms()) {
        Mono m{};
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (perm[i] >= 0) m[perm[i]] = t.first[i];
        b.add(m, t.second);
    }
    return b.build();
}

Series setZero(const Series &f, std::size_t idx) {
    Series::Builder b(f.vars(), f.order());
    for (auto &t : f.terms())
        if (t.first[idx] == 0) b.add(t.first, t.second);
    return b.build();
}

// ---- substitution ----

namespace {

struct Substituter {
    const std::vector<Series> &images;
    Vars target;
    int order;
    std::vector<int> vals;
    std::vector<std::vector<Series>> powers;

    const Series &power(std::size_t k, int e) {
        auto &pk = powers[k];
        if (pk.empty()) pk.push_back(Series::constant(target, Scalar(1), order));
        while (static_cast<int>(pk.size()) <= e) pk.push_back(mulTo(pk.back(), images[k], order));
        return pk[e];
    }

    // substitutes variables 0..k of the given terms, result truncated at ord
    Series rec(const std::vector<const Series::Term *> &ts, int k, int ord) {
        if (k < 0) {
            Scalar c;
            for (auto *t : ts) c += t->second;
            return Series::constant(target, c, ord);
        }
        std::map<int, std::vector<const Series::Term *>> groups;
        for (auto *t : ts) groups[t->first[k]].push_back(t);
        Series total(target, ord);
        bool first = true;
        for (auto &[e, g] : groups) {
            if (e < 0) throw VariableMismatch("cannot substitute into a negative exponent");
            long v = static_cast<long>(e) * vals[k];
            if (v > ord) continue;
            int inner = static_cast<int>(ord - v);
            Series part = rec(g, k - 1, inner);
            if (e > 0) part = mulTo(part, power(static_cast<std::size_t>(k), e), ord);
            else part = part.truncated(ord);
            if (first) {
                total = std::move(part);
                first = false;
            } else {
                total += part;
            }
        }
        if (first) return Series(target, ord);
        return Series(total).truncated(ord);
    }
};

} // namespace

Series substitute(const Series &f, const std::vector<Series> &images, int order) {
    const VarSet &vs = *f.vars();
    if (images.size() != vs.size()) throw VariableMismatch("one image per variable required");
    if (images.empty()) throw VariableMismatch("nothing to substitute");
    Vars target = images[0].vars();
    for (auto &im : images) {
        if (!im.vars()->sameAs(*target)) throw VariableMismatch("images over different variables");
    }
    std::vector<bool> used(vs.size(), false);
    for (auto &t : f.terms())
        for (std::size_t i = 0; i < vs.size(); ++i) used[i] = used[i] || t.first[i] != 0;

    long ord = order;
    std::vector<int> vals(vs.size());
    // lambda = min val(img_i)/w_i over used variables, kept as a fraction
    long lp = 1, lq = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!used[i]) {
            vals[i] = kExact;
            continue;
        }
        const Series &im = images[i];
        if (!im.constantTerm().isZero())
            throw NonvanishingConstantTerm("image of " + vs.name(i) + " has a constant term");
        int v = im.valuation();
        if (v <= 0) throw NonvanishingConstantTerm("image of " + vs.name(i) + " has valuation <= 0");
        vals[i] = v;
        ord = std::min<long>(ord, im.order());
        long p = v, q = vs.weight(i);
        if (lq == 0 || p * lq < lp * q) {
            lp = p;
            lq = q;
        }
    }
    if (f.order() < kExact && lq != 0) {
        long bound = (lp * (static_cast<long>(f.order()) + 1) - 1) / lq;
        ord = std::min(ord, bound);
    }
    int o = static_cast<int>(std::min<long>(ord, kExact));
    if (o >= kExact) throw VariableMismatch("substitution needs a finite target order");

    Substituter s{images, target, o, vals, std::vector<std::vector<Series>>(vs.size())};
    std::vector<const Series::Term *> ts;
    for (auto &t : f.terms()) ts.push_back(&t);
    Series r = s.rec(ts, static_cast<int>(vs.size()) - 1, o);
    return r;
}

Series substitute(const Series &f, const std::map<std::string, Series> &bindings,
                  const Vars &target, int order) {
    const VarSet &vs = *f.vars();
    std::vector<Series> images;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        auto it = bindings.find(vs.name(i));
        if (it != bindings.end()) {
            images.push_back(it->second);
        } else {
            int j = target->index(vs.name(i));
            if (j < 0) throw VariableMismatch("no binding for " + vs.name(i));
            images.push_back(Series::variable(target, static_cast<std::size_t>(j), order));
        }
    }
    return substitute(f, images, order);
}

// ---- inverses, roots, implicit functions ----

Series invertUnit(const Series &f) {
    Scalar c = f.constantTerm();
    if (c.isZero()) throw ZeroConstantTerm("invertUnit needs f(0) != 0");
    if (f.order() >= kExact) throw ZeroConstantTerm("invertUnit needs a finite truncation order");
    int lv = f.vars()->laurent();
    if (lv >= 0)
        for (auto &t : f.terms())
            if (t.first[lv] < 0) throw ZeroConstantTerm("invertUnit on a Laurent tail");
    Series one = Series::constant(f.vars(), Scalar(1), f.order());
    Series g = Series::constant(f.vars(), c.inv(), f.order());
    // Newton: g <- g (2 - f g), doubling the correct order each step
    for (int it = 0; it < 64; ++it) {
        Series e = one - f * g;
        if (e.isZero()) break;
        g += g * e;
    }
    return g;
}

Series sqrtUnit(const Series &f) {
    Scalar c = f.constantTerm();
    if (!c.isReal() || !c.re.isRational() || sgn(c.re.r) <= 0)
        throw ConstantTermNotAdmissible("sqrtUnit needs a positive rational constant term");
    mpz_class num = c.re.r.get_num(), den = c.re.r.get_den();
    mpz_class rn = sqrt(num), rd = sqrt(den);
    if (rn * rn != num || rd * rd != den)
        throw ConstantTermNotAdmissible("constant term " + c.str() + " is not a rational square");
    if (f.order() >= kExact) throw ConstantTermNotAdmissible("sqrtUnit needs a finite order");
    Series s = Series::constant(f.vars(), Scalar::rational(mpq_class(rn, rd)), f.order());
    Scalar half = Scalar::rational(mpq_class(1, 2));
    for (int it = 0; it < 64; ++it) {
        Series next = (s + f * invertUnit(s)) * half;
        if (next.sameTerms(s)) break;
        s = std::move(next);
    }
    return s;
}

Series solveImplicit(const Series &F, std::size_t y, const Vars &target, int order) {
    const VarSet &vs = *F.vars();
    if (y >= vs.size()) throw VariableMismatch("solve variable out of range");
    if (target->size() + 1 != vs.size()) throw VariableMismatch("target must drop exactly y");
    if (!F.constantTerm().isZero()) throw SingularJacobian("F(0) != 0");
    Mono ey{};
    ey[y] = 1;
    Scalar a = F.coeff(ey);
    if (a.isZero()) throw SingularJacobian("dF/d" + vs.name(y) + "(0) = 0");
    Scalar ainv = a.inv();
    std::vector<Series> images;
    std::size_t k = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i == y) {
            images.emplace_back();
            continue;
        }
        if (target->weight(k) != vs.weight(i)) throw VariableMismatch("weight mismatch in solveImplicit");
        images.push_back(Series::variable(target, k, order));
        ++k;
    }
    // y <- y - F(x,y)/a gains at least one degree per pass
    Series sol(target, order);
    for (int it = 0; it <= order + 2; ++it) {
        images[y] = sol;
        Series r = substitute(F, images, order);
        if (r.isZero()) break;
        sol = sol - r * ainv;
    }
    return sol.truncated(order);
}

Series reversion(const Series &psiHat, const Vars &target, int order) {
    const VarSet &vs = *psiHat.vars();
    if (vs.size() != 2 || target->size() != 2) throw VariableMismatch("reversion works in (z,u)");
    Mono u{};
    u[1] = 1;
    if (!psiHat.coeff(u).isOne()) throw BadNormalization("u-linear coefficient must be 1");
    for (auto &t : psiHat.terms()) {
        if (t.first[1] == 0) throw BadNormalization("psiHat has a u-free term");
        if (t.first[1] == 1 && t.first[0] != 0) throw BadNormalization("u-linear part must be exactly u");
    }
    Series tvar = Series::variable(target, 1, order);
    Series zvar = Series::variable(target, 0, order);
    Series nonlin = psiHat - Series::monomial(psiHat.vars(), u, Scalar(1), psiHat.order());
    Series psi = tvar;
    for (int it = 0; it <= order + 2; ++it) {
        Series next = tvar - substitute(nonlin, {zvar, psi}, order);
        if (next.sameTerms(psi)) break;
        psi = std::move(next);
    }
    return psi;
}

LaurentSplit laurentSplit(const Series &f, const Vars &holomorphicVars) {
    const VarSet &vs = *f.vars();
    if (vs.size() != 2 || vs.laurent() != 0) throw VariableMismatch("laurentSplit expects (z Laurent, w)");
    LaurentSplit out;
    Series::Builder b(holomorphicVars, f.order());
    for (auto &t : f.terms()) {
        int ez = t.first[0], ew = t.first[1];
        if (ez >= 0) {
            b.add(t.first, t.second);
        } else {
            out.obstruction[{ez + 2 * ew, ew}] = t.second;
        }
    }
    out.holomorphic = b.build();
    return out;
}

} // namespace crr

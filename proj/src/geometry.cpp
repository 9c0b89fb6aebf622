#include "crrigid/geometry.hpp"

#include <map>

namespace crr {

namespace vs {
const Vars &zw() {
    static const Vars v = makeVars({"z", "w"}, {1, 2});
    return v;
}
const Vars &zct() {
    static const Vars v = makeVars({"z", "chi", "tau"}, {1, 1, 2});
    return v;
}
const Vars &zwc() {
    static const Vars v = makeVars({"z", "w", "chi"}, {1, 2, 1});
    return v;
}
const Vars &zcwt() {
    static const Vars v = makeVars({"z", "chi", "w", "tau"}, {1, 1, 2, 2});
    return v;
}
const Vars &zc() {
    static const Vars v = makeVars({"z", "chi"}, {1, 1});
    return v;
}
const Vars &zwLaurent(int floor) {
    static std::map<int, Vars> cache;
    auto it = cache.find(floor);
    if (it == cache.end()) it = cache.emplace(floor, makeVars({"z", "w"}, {1, 2}, 0, floor)).first;
    return it->second;
}
Vars target(int nz) {
    static const Vars v1 = makeVars({"z1", "w", "zeta1", "omega"}, {1, 2, 1, 2});
    static const Vars v2 =
        makeVars({"z1", "z2", "w", "zeta1", "zeta2", "omega"}, {1, 1, 2, 1, 1, 2});
    if (nz == 1) return v1;
    if (nz == 2) return v2;
    throw VariableMismatch("target dimension must be 2 or 3");
}
} // namespace vs

Vars targetGraphVars(int nz) {
    static const Vars v1 = makeVars({"z1", "zeta1", "omega"}, {1, 1, 2});
    static const Vars v2 = makeVars({"z1", "z2", "zeta1", "zeta2", "omega"}, {1, 1, 1, 1, 2});
    if (nz == 1) return v1;
    if (nz == 2) return v2;
    throw VariableMismatch("target dimension must be 2 or 3");
}

Vars targetHoloVars(int nz) {
    static const Vars v1 = makeVars({"z1", "w"}, {1, 2});
    static const Vars v2 = makeVars({"z1", "z2", "w"}, {1, 1, 2});
    if (nz == 1) return v1;
    if (nz == 2) return v2;
    throw VariableMismatch("target dimension must be 2 or 3");
}

bool isHermitian(const Series &f, const std::vector<int> &perm) {
    return conjugateSeries(f, f.vars(), perm).sameTerms(f);
}

Series complexifyDefining(const Series &realDefining) {
    const VarSet &v = *realDefining.vars();
    if (v.size() != 4) throw VariableMismatch("real defining function needs (z, zb, w, wb)");
    Series c = remap(realDefining, vs::zcwt(), {0, 1, 2, 3});
    if (!isHermitian(c, {1, 0, 3, 2})) throw NotReal("defining function is not real-valued");
    return c;
}

Scalar SourceHypersurface::leviCoefficient() const { return Q.coeff(Mono{1, 1, 0}); }

Series conjugateQ(const Series &Q) { return conjugateSeries(Q, vs::zwc(), {2, 0, 1}); }

namespace {

void checkNormal(const Series &Q) {
    for (auto &[m, c] : Q.terms()) {
        bool pureTau = m[0] == 0 || m[1] == 0;
        if (!pureTau) continue;
        if (m[0] == 0 && m[1] == 0 && m[2] == 1 && c.isOne()) continue;
        throw BadNormalization("Q is not normal: term " + Series::monomial(Q.vars(), m, c, Q.order()).str());
    }
    if (!Q.coeff(Mono{0, 0, 1}).isOne()) throw BadNormalization("Q must start with tau");
}

} // namespace

SourceHypersurface sourceFromQ(const Series &Q) {
    if (!Q.vars()->sameAs(*vs::zct())) throw VariableMismatch("Q must be over (z, chi, tau)");
    checkNormal(Q);
    SourceHypersurface M;
    M.Q = Q;
    M.Qbar = conjugateQ(Q);
    M.g = Series(vs::zw(), Q.order());
    M.order = Q.order();
    return M;
}

SourceHypersurface toNormalCoordinates(const Series &rho, int order) {
    if (!rho.vars()->sameAs(*vs::zcwt())) throw VariableMismatch("defining function over (z,chi,w,tau) expected");
    if (!rho.constantTerm().isZero()) throw NotHypersurface("defining function does not vanish at 0");
    Scalar cz = rho.coeff(Mono{1, 0, 0, 0}), cc = rho.coeff(Mono{0, 1, 0, 0});
    Scalar cw = rho.coeff(Mono{0, 0, 1, 0}), ct = rho.coeff(Mono{0, 0, 0, 1});
    if (cw.isZero()) throw SingularJacobian("d rho / dw vanishes at 0");
    if (!cz.isZero() || !cc.isZero() || ct != -cw)
        throw NotHypersurface("tangent plane at 0 must be {Im w = 0}");

    // w = Qt(z, chi, tau)
    Series Qt = solveImplicit(rho, 2, vs::zct(), order);
    Series Qt0 = setZero(setZero(Qt, 0), 1);
    Series Qtz = setZero(Qt, 1); // Qt(z, 0, tau)
    Scalar I = Scalar::I();

    // g0(w) from i g0 = Qt(0,0,w - i g0) - w
    static const Vars wy = makeVars({"w", "y"}, {2, 2});
    static const Vars wOnly = makeVars({"w"}, {2});
    Series W = Series::variable(wy, 0, order), Y = Series::variable(wy, 1, order);
    Series zero2(wy, order);
    Series G = I * Y + W - substitute(Qt0, {zero2, zero2, W - I * Y}, order);
    Series g0 = solveImplicit(G, 1, wOnly, order);

    // g(z,w) = -i (Qt(z,0,w - i g0(w)) - w)
    const Vars &zw = vs::zw();
    Series z = Series::variable(zw, 0, order), w = Series::variable(zw, 1, order);
    Series g0zw = substitute(g0, {w}, order);
    Series g = (-I) * (substitute(Qtz, {z, Series(zw, order), w - I * g0zw}, order) - w);

    SourceHypersurface M;
    if (g.isZero()) {
        M = sourceFromQ(Qt);
    } else {
        const Vars &v4 = vs::zcwt();
        Series Z = Series::variable(v4, 0, order), C = Series::variable(v4, 1, order);
        Series Wv = Series::variable(v4, 2, order), T = Series::variable(v4, 3, order);
        Series gz = remap(g, v4, {0, 2});
        Series gbar = conjugateSeries(g, v4, {1, 3});
        Series rhoP = Wv + I * gz - substitute(Qt, {Z, C, T - I * gbar}, order);
        M = sourceFromQ(solveImplicit(rhoP, 2, vs::zct(), order));
    }
    M.rawDefining = rho;
    M.g = g;
    M.order = order;
    if (!realityResidual(M, order).isZero()) throw BadNormalization("reality identity fails for Q");
    return M;
}

Series realityResidual(const SourceHypersurface &M, int order) {
    const Vars &v = vs::zwc();
    Series z = Series::variable(v, 0, order), w = Series::variable(v, 1, order),
           c = Series::variable(v, 2, order);
    Series lhs = substitute(M.Q, {z, c, M.Qbar}, order);
    return lhs - w;
}

CRVectorFields crVectorFields(const SourceHypersurface &M) {
    CRVectorFields f;
    f.QbarChi = partialDerivative(M.Qbar, 2);
    f.QbarW = partialDerivative(M.Qbar, 1);
    f.QbarZ = partialDerivative(M.Qbar, 0);
    f.Qz = partialDerivative(M.Q, 0);
    return f;
}

std::array<Series, 2> segreMap(const SourceHypersurface &M, int q, int order) {
    static const Vars x = makeVars({"x1", "x2"});
    if (q < 1 || q > 2) throw UnsupportedSegreOrder("Segre maps are implemented for q = 1, 2");
    Series x1 = Series::variable(x, 0, order);
    if (q == 1) return {x1, Series(x, order)};
    Series x2 = Series::variable(x, 1, order);
    return {x1, substitute(M.Q, {x1, x2, Series(x, order)}, order)};
}

// ---- targets ----

namespace {

std::vector<int> targetSwap(int nz) {
    int n = nz + 1;
    std::vector<int> p(2 * n);
    for (int i = 0; i < n; ++i) {
        p[i] = n + i;
        p[n + i] = i;
    }
    return p;
}

void fillGradient(TargetHypersurface &T) {
    T.r.clear();
    T.rbar.clear();
    for (int j = 0; j < T.n(); ++j) {
        T.r.push_back(partialDerivative(T.rho, static_cast<std::size_t>(j)));
        T.rbar.push_back(partialDerivative(T.rho, static_cast<std::size_t>(T.n() + j)));
    }
}

Series hyperquadricRho(int epsilon, int nz) {
    Vars v = vs::target(nz);
    int n = nz + 1;
    Series w = Series::variable(v, static_cast<std::size_t>(nz), kExact);
    Series om = Series::variable(v, static_cast<std::size_t>(2 * n - 1), kExact);
    Scalar inv2i = Scalar(Real(), Real(2)).inv();
    Series rho = (w - om) * inv2i;
    for (int a = 0; a < nz; ++a) {
        Series za = Series::variable(v, static_cast<std::size_t>(a), kExact);
        Series zb = Series::variable(v, static_cast<std::size_t>(n + a), kExact);
        Scalar s = a == 0 ? Scalar(1) : Scalar(epsilon);
        rho -= za * zb * s;
    }
    return rho;
}

} // namespace

TargetHypersurface hyperquadric(int epsilon, int nz) {
    if (epsilon != 1 && epsilon != -1) throw ValidationError("hyperquadric sign must be +1 or -1");
    TargetHypersurface T;
    T.kind = TargetHypersurface::Kind::Hyperquadric;
    T.epsilon = epsilon;
    T.nz = nz;
    T.rho = hyperquadricRho(epsilon, nz);
    T.label = std::string("hyperquadric ") + (epsilon > 0 ? "+1" : "-1");
    fillGradient(T);
    return T;
}

TargetHypersurface targetFromDefining(const Series &rho, int nz, const std::string &label) {
    Vars v = vs::target(nz);
    if (!rho.vars()->sameAs(*v)) throw VariableMismatch("target defining function over " + v->describe());
    if (!isHermitian(rho, targetSwap(nz))) throw NotReal("target defining function is not real-valued");
    int n = nz + 1;
    if (!rho.constantTerm().isZero()) throw NotHypersurface("target does not pass through 0");
    Mono mw{}, mo{};
    mw[nz] = 1;
    mo[2 * n - 1] = 1;
    Scalar cw = rho.coeff(mw);
    if (cw.isZero() || rho.coeff(mo) != -cw) throw NotHypersurface("target tangent plane at 0 must be {Im w' = 0}");
    for (int a = 0; a < nz; ++a) {
        Mono m{}, mb{};
        m[a] = 1;
        mb[n + a] = 1;
        if (!rho.coeff(m).isZero() || !rho.coeff(mb).isZero())
            throw NotHypersurface("target tangent plane at 0 must be {Im w' = 0}");
    }
    // normalize so that rho_w(0) = 1/(2i), matching Im w' - ...
    Scalar want = Scalar(Real(), Real(2)).inv();
    TargetHypersurface T;
    T.rho = rho * (want * cw.inv());
    T.nz = nz;
    T.label = label;
    for (int e : {1, -1})
        if (T.rho.sameTerms(hyperquadricRho(e, nz))) {
            T.kind = TargetHypersurface::Kind::Hyperquadric;
            T.epsilon = e;
        }
    fillGradient(T);
    return T;
}

std::string LeviSignature::str() const {
    if (degenerate) return "degenerate";
    return "(" + std::to_string(positive) + "," + std::to_string(negative) + ")";
}

LeviSignature leviSignature(const TargetHypersurface &T) {
    int nz = T.nz, n = T.n();
    // Levi matrix of Im w' - phi: L_ab = -coefficient of z_a zeta_b
    auto L = [&](int a, int b) {
        Mono m{};
        m[a] = 1;
        m[n + b] = 1;
        return -T.rho.coeff(m);
    };
    LeviSignature s;
    if (nz == 1) {
        int sg = L(0, 0).re.sign();
        if (sg == 0) s.degenerate = true;
        else (sg > 0 ? s.positive : s.negative) = 1;
        return s;
    }
    Scalar a = L(0, 0), d = L(1, 1), b = L(0, 1);
    Real det = (a * d - b * b.conj()).re;
    Real tr = (a + d).re;
    int sd = det.sign();
    if (sd == 0) {
        s.degenerate = true;
    } else if (sd < 0) {
        s.positive = s.negative = 1;
    } else if (tr.sign() > 0) {
        s.positive = 2;
    } else {
        s.negative = 2;
    }
    return s;
}

Series targetGraph(const TargetHypersurface &T, int order) {
    return solveImplicit(T.rho, static_cast<std::size_t>(T.nz), targetGraphVars(T.nz), order);
}

} // namespace crr

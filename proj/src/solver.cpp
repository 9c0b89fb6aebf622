#include "crrigid/solver.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace crr {

const char *verdictName(Verdict v) {
    switch (v) {
    case Verdict::RigidThm46:
        return "Rigid-Thm4.6";
    case Verdict::RigidThm47:
        return "Rigid-Thm4.7";
    case Verdict::Inconclusive:
        return "Inconclusive";
    }
    return "?";
}

void decide(DimensionTrace &t, int window) {
    t.order = -1;
    t.dimension = -1;
    t.status = "not-stabilized";
    for (auto &[n, d] : t.dims) {
        if (d < t.lowerBound)
            throw Error("InconsistentBounds", "truncated kernel of dimension " + std::to_string(d) + " at order " +
                                                  std::to_string(n) + " misses a verified solution");
        if (d == t.lowerBound) {
            t.order = n;
            t.dimension = d;
            t.status = "certified";
            return;
        }
    }
    int k = static_cast<int>(t.dims.size());
    if (k < window) return;
    int last = t.dims.back().second;
    for (int i = k - window; i < k; ++i)
        if (t.dims[static_cast<std::size_t>(i)].second != last) return;
    t.order = t.dims.back().first;
    t.dimension = last;
    t.status = "stabilized";
}

namespace {

std::string traceString(const DimensionTrace &t) {
    std::string s;
    for (auto &[n, d] : t.dims) s += (s.empty() ? "" : ", ") + std::to_string(n) + ":" + std::to_string(d);
    return s;
}

int kernelDim(const std::vector<SparseRow> &rows, int ncols) {
    Echelon e(ncols);
    for (auto &r : rows) e.add(r);
    return ncols - e.rank();
}

Mono monoOf(std::initializer_list<int> e) {
    Mono m{};
    std::size_t i = 0;
    for (int x : e) m[i++] = static_cast<std::int16_t>(x);
    return m;
}

Series term(const Vars &v, std::initializer_list<int> e, const Scalar &c) {
    return Series::monomial(v, monoOf(e), c, kExact);
}

// exponent vectors of (z1.., w) with weighted degree 1..n; plain degree <= 2 first
std::vector<Mono> fieldMonomials(int nz, int n, std::size_t &projected) {
    Vars v = targetHoloVars(nz);
    std::vector<Mono> low, high;
    int nv = nz + 1;
    Mono e{};
    std::function<void(int)> rec = [&](int i) {
        if (i == nv) {
            int d = v->degree(e);
            if (d < 1 || d > n) return;
            int plain = 0;
            for (int j = 0; j < nv; ++j) plain += e[static_cast<std::size_t>(j)];
            (plain <= 2 ? low : high).push_back(e);
            return;
        }
        int base = v->degree(e);
        for (int k = 0; base + k * v->weight(static_cast<std::size_t>(i)) <= n; ++k) {
            e[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(k);
            rec(i + 1);
        }
        e[static_cast<std::size_t>(i)] = 0;
    };
    rec(0);
    auto byDegree = [&](const Mono &a, const Mono &b) {
        int da = v->degree(a), db = v->degree(b);
        return da != db ? da < db : a > b;
    };
    std::sort(low.begin(), low.end(), byDegree);
    std::sort(high.begin(), high.end(), byDegree);
    projected = low.size();
    low.insert(low.end(), high.begin(), high.end());
    return low;
}

std::vector<int> conjPerm(int nz) {
    std::vector<int> p;
    for (int a = 0; a < nz; ++a) p.push_back(nz + a);
    p.push_back(2 * nz);
    return p;
}

struct GraphData {
    Vars gv;
    std::vector<Series> rArgs; // z.., G, zeta.., omega
    std::vector<Series> r, rbar;
};

GraphData graphData(const TargetHypersurface &T, int order) {
    GraphData d;
    int nz = T.nz;
    d.gv = targetGraphVars(nz);
    Series G = targetGraph(T, order);
    for (int a = 0; a < nz; ++a) d.rArgs.push_back(Series::variable(d.gv, static_cast<std::size_t>(a), order));
    d.rArgs.push_back(G);
    for (int a = 0; a <= nz; ++a)
        d.rArgs.push_back(Series::variable(d.gv, static_cast<std::size_t>(nz + a), order));
    for (int j = 0; j <= nz; ++j) {
        d.r.push_back(substitute(T.r[static_cast<std::size_t>(j)], d.rArgs, order));
        d.rbar.push_back(substitute(T.rbar[static_cast<std::size_t>(j)], d.rArgs, order));
    }
    return d;
}

// real coordinates of the plain-degree <= 2 part of a field
std::vector<Real> twoJet(const VectorField &V, int nz) {
    std::size_t np = 0;
    auto monos = fieldMonomials(nz, 4, np);
    std::vector<Real> out;
    for (auto &c : V.v)
        for (std::size_t i = 0; i < np; ++i) {
            Scalar x = c.coeff(monos[i]);
            out.push_back(x.re);
            out.push_back(x.im);
        }
    return out;
}

std::vector<VectorField> verifiedCandidates(const TargetHypersurface &T, int order) {
    std::vector<VectorField> out;
    std::vector<int> signs = T.kind == TargetHypersurface::Kind::Hyperquadric ? std::vector<int>{T.epsilon}
                                                                              : std::vector<int>{1, -1};
    if (T.nz == 1) signs = {1};
    Echelon span(2 * (T.nz + 1) * (T.nz == 1 ? 5 : 9));
    for (int e : signs)
        for (auto &V : hyperquadricGenerators(e, T.nz))
            if (automorphismResidual(T, V, order).isZero() && span.add(twoJet(V, T.nz))) out.push_back(V);
    return out;
}

DeformationField restrictAlong(const VectorField &V, const MapGerm &H, int order) {
    DeformationField f;
    std::vector<Series> img{H[0].truncated(order), H[1].truncated(order), H[2].truncated(order)};
    for (int j = 0; j < 3; ++j) f.alpha[j] = substitute(V.v[static_cast<std::size_t>(j)], img, order);
    f.label = "target:" + V.label;
    return f;
}

} // namespace

std::vector<VectorField> hyperquadricGenerators(int eps, int nz) {
    Vars v = targetHoloVars(nz);
    Scalar I = Scalar::I(), e(eps), h = Scalar::rational(mpq_class(1, 2));
    std::vector<VectorField> out;
    if (nz == 1) {
        auto t = [&](std::initializer_list<int> m, Scalar c) { return term(v, m, c); };
        Series zero(v, kExact);
        out.push_back({{t({1, 0}, 1), t({0, 1}, 2)}, "t"});
        out.push_back({{t({1, 0}, I), zero}, "h11"});
        out.push_back({{t({1, 1}, 1), t({0, 2}, 1)}, "s"});
        out.push_back({{t({0, 1}, I * h) + t({2, 0}, 1), t({1, 1}, 1)}, "b1"});
        out.push_back({{t({0, 1}, h) + t({2, 0}, I), t({1, 1}, I)}, "i b1"});
        return out;
    }
    if (nz != 2) throw VariableMismatch("hyperquadric generators for nz = 1 or 2");
    auto t = [&](std::initializer_list<int> m, Scalar c) { return term(v, m, c); };
    Series zero(v, kExact);
    out.push_back({{t({1, 0, 0}, 1), t({0, 1, 0}, 1), t({0, 0, 1}, 2)}, "t"});
    out.push_back({{t({1, 0, 0}, I), zero, zero}, "h11"});
    out.push_back({{zero, t({0, 1, 0}, I), zero}, "h22"});
    out.push_back({{t({1, 0, 1}, 1), t({0, 1, 1}, 1), t({0, 0, 2}, 1)}, "s"});
    out.push_back({{t({0, 1, 0}, 1), t({1, 0, 0}, -e), zero}, "h12"});
    out.push_back({{t({0, 1, 0}, I), t({1, 0, 0}, I * e), zero}, "i h12"});
    out.push_back({{t({0, 0, 1}, I * h) + t({2, 0, 0}, 1), t({1, 1, 0}, 1), t({1, 0, 1}, 1)}, "b1"});
    out.push_back({{t({0, 0, 1}, h) + t({2, 0, 0}, I), t({1, 1, 0}, I), t({1, 0, 1}, I)}, "i b1"});
    out.push_back({{t({1, 1, 0}, e), t({0, 0, 1}, I * h) + t({0, 2, 0}, e), t({0, 1, 1}, e)}, "b2"});
    out.push_back({{t({1, 1, 0}, I * e), t({0, 0, 1}, h) + t({0, 2, 0}, I * e), t({0, 1, 1}, I * e)}, "i b2"});
    return out;
}

Series automorphismResidual(const TargetHypersurface &T, const VectorField &V, int order) {
    if (static_cast<int>(V.v.size()) != T.n()) throw VariableMismatch("vector field has the wrong number of components");
    auto d = graphData(T, order);
    std::vector<Series> args(d.rArgs.begin(), d.rArgs.begin() + T.n());
    Series out(d.gv, order);
    for (int j = 0; j < T.n(); ++j) {
        const Series &c = V.v[static_cast<std::size_t>(j)];
        if (!c.constantTerm().isZero()) throw NonvanishingConstantTerm("vector field must vanish at 0");
        Series a = substitute(c, args, order);
        Series ab = conjugateSeries(c, d.gv, conjPerm(T.nz)).truncated(order);
        out += (d.r[static_cast<std::size_t>(j)] * a + d.rbar[static_cast<std::size_t>(j)] * ab).truncated(order);
    }
    return out;
}

TargetHypersurface sourceAsTarget(const SourceHypersurface &M) {
    Vars v = vs::target(1);
    // Q over (z, chi, tau) -> (z1, zeta1, omega); Qbar over (z, w, chi) -> (z1, w, zeta1)
    Series Q = remap(M.Q, v, {0, 2, 3});
    Series Qb = remap(M.Qbar, v, {0, 1, 2});
    Series w = Series::variable(v, 1, kExact), om = Series::variable(v, 3, kExact);
    Scalar inv4i = Scalar(Real(), Real(4)).inv();
    Series rho = (w - om - Q + Qb) * inv4i;
    return targetFromDefining(rho, 1, "source");
}

int automorphismKernelDim(const TargetHypersurface &T, int n) {
    int nz = T.nz;
    std::size_t np = 0;
    auto monos = fieldMonomials(nz, n, np);
    auto d = graphData(T, n);
    const Series &G = d.rArgs[static_cast<std::size_t>(nz)];
    int maxW = 0;
    for (auto &m : monos) maxW = std::max(maxW, static_cast<int>(m[static_cast<std::size_t>(nz)]));
    std::vector<Series> Gp{Series::constant(d.gv, Scalar(1), n)};
    while (static_cast<int>(Gp.size()) <= maxW) Gp.push_back((Gp.back() * G).truncated(n));

    std::map<Mono, std::map<int, Scalar>> eq;
    int ncomp = nz + 1;
    for (std::size_t i = 0; i < monos.size(); ++i) {
        const Mono &m = monos[i];
        Mono zpart{}, bar{};
        for (int a = 0; a < nz; ++a) {
            zpart[static_cast<std::size_t>(a)] = m[static_cast<std::size_t>(a)];
            bar[static_cast<std::size_t>(nz + a)] = m[static_cast<std::size_t>(a)];
        }
        bar[static_cast<std::size_t>(2 * nz)] = m[static_cast<std::size_t>(nz)];
        Series hol = Series::monomial(d.gv, zpart, Scalar(1), n) * Gp[static_cast<std::size_t>(m[static_cast<std::size_t>(nz)])];
        Series anti = Series::monomial(d.gv, bar, Scalar(1), n);
        for (int j = 0; j < ncomp; ++j) {
            int col = 2 * (static_cast<int>(i) * ncomp + j);
            Series wp = (d.r[static_cast<std::size_t>(j)] * hol).truncated(n);
            Series wm = (d.rbar[static_cast<std::size_t>(j)] * anti).truncated(n);
            for (auto &t : wp.terms()) {
                eq[t.first][col] += t.second;
                eq[t.first][col + 1] += t.second.timesI();
            }
            for (auto &t : wm.terms()) {
                eq[t.first][col] += t.second;
                eq[t.first][col + 1] -= t.second.timesI();
            }
        }
    }
    std::vector<SparseRow> rows;
    for (auto &[mono, cols] : eq) {
        SparseRow re, im;
        for (auto &[c, val] : cols) {
            if (!val.re.isZero()) re.emplace_back(c, val.re);
            if (!val.im.isZero()) im.emplace_back(c, val.im);
        }
        if (!re.empty()) rows.push_back(std::move(re));
        if (!im.empty()) rows.push_back(std::move(im));
    }
    int split = 2 * static_cast<int>(np) * ncomp;
    return kernelDim(eliminateColumns(std::move(rows), split), split);
}

AutomorphismSpace infinitesimalAutomorphisms(const TargetHypersurface &T, bool direct, const SolveOptions &opt) {
    AutomorphismSpace A;
    A.known = verifiedCandidates(T, std::max(opt.maxOrder, 8));
    A.trace.lowerBound = static_cast<int>(A.known.size());
    if (T.kind == TargetHypersurface::Kind::Hyperquadric && !direct) {
        A.closedForm = true;
        A.dimension = A.trace.lowerBound;
        A.trace.dimension = A.dimension;
        A.trace.status = "closed-form";
        return A;
    }
    for (int n = opt.startOrder; n <= opt.maxOrder; ++n) {
        A.trace.dims.emplace_back(n, automorphismKernelDim(T, n));
        decide(A.trace, opt.window);
        if (A.trace.accepted()) break;
    }
    if (!A.trace.accepted())
        throw RankNotStabilized("infinitesimal automorphisms of " + (T.label.empty() ? std::string("target") : T.label) +
                                ": " + traceString(A.trace));
    A.dimension = A.trace.dimension;
    return A;
}

std::vector<DeformationField> trivialSubspace(const TargetHypersurface &T, const MapGerm &H, int order) {
    std::vector<DeformationField> out;
    for (auto &V : verifiedCandidates(T, order)) out.push_back(restrictAlong(V, H, order));
    return out;
}

std::vector<DeformationField> sourceTrivialFields(const SourceHypersurface &M, const MapGerm &H, int order) {
    TargetHypersurface S = sourceAsTarget(M);
    const Vars &zw = vs::zw();
    std::vector<DeformationField> out;
    for (auto &X : verifiedCandidates(S, order)) {
        Series xz = remap(X.v[0], zw, {0, 1}), xw = remap(X.v[1], zw, {0, 1});
        DeformationField f;
        for (int j = 0; j < 3; ++j)
            f.alpha[j] = (partialDerivative(H[j], 0) * xz + partialDerivative(H[j], 1) * xw).truncated(order);
        f.label = "source:" + X.label;
        out.push_back(std::move(f));
    }
    return out;
}

int jetRank(const std::vector<DeformationField> &fields) {
    Echelon e(kJetReal);
    for (auto &f : fields) e.add(jetOf(MapGerm{f.alpha}).realCoords());
    return e.rank();
}

std::vector<JetVector> kernelBasis(const std::vector<SparseRow> &rows) {
    Echelon e(kJetReal);
    for (auto &r : rows) e.add(r);
    std::vector<JetVector> out;
    for (auto &k : e.kernel()) out.push_back(JetVector::fromReal(k));
    return out;
}

Verdict rigidityVerdict(int dimension, int targetAutDim, bool leviNondegenerate) {
    if (dimension == 0) return Verdict::RigidThm46;
    if (leviNondegenerate && dimension == targetAutDim) return Verdict::RigidThm47;
    return Verdict::Inconclusive;
}

DeformationSpace computeDeformationSpace(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                         const std::vector<DeformationField> &extra, const SolveOptions &opt) {
    DeformationSpace S;
    const int vo = opt.startOrder;
    auto aut = infinitesimalAutomorphisms(T);
    S.targetAutDim = aut.dimension;

    auto triv = trivialSubspace(T, H, vo);
    auto src = sourceTrivialFields(M, H, vo);
    S.trivialDim = jetRank(triv);
    std::vector<DeformationField> candidates = triv;
    candidates.insert(candidates.end(), src.begin(), src.end());
    S.sourceTrivialDim = jetRank(candidates);
    candidates.insert(candidates.end(), extra.begin(), extra.end());
    for (auto &f : candidates) {
        if (buildDeformationResidual(M, T, H, f, vo).isZero())
            S.known.push_back(f);
        else
            S.rejected.push_back(f.label);
    }
    S.trace.lowerBound = jetRank(S.known);

    PipelineArtifacts art;
    int done = opt.startOrder - 1;
    int build = std::min(opt.maxOrder, opt.startOrder + opt.window - 1);
    while (true) {
        S.system = RealLinearSystem{};
        art = buildPsiAndConditions(M, T, H, build, S.system);
        S.buildOrder = build;
        for (int n = done + 1; n <= build; ++n)
            S.trace.dims.emplace_back(n, kernelDim(S.system.select(n), kJetReal));
        done = build;
        decide(S.trace, opt.window);
        if (S.trace.accepted() || build >= opt.maxOrder) break;
        build = std::min(opt.maxOrder, build + opt.window);
    }
    if (!S.trace.accepted()) return S;

    int n = S.trace.order;
    S.dimension = S.trace.dimension;
    S.jetBasis = kernelBasis(S.system.select(n));
    Echelon span(kJetReal);
    for (std::size_t i = 0; i < S.jetBasis.size(); ++i) {
        span.add(S.jetBasis[i].realCoords());
        auto f = fieldFromJet(art.K, S.jetBasis[i], "basis " + std::to_string(i + 1));
        for (auto &a : f.alpha) a = a.truncated(n);
        if (!buildDeformationResidual(M, T, H, f, n).isZero()) S.basisVerified = false;
        S.fieldBasis.push_back(std::move(f));
    }
    for (auto &f : S.known)
        if (!span.contains(makeRow(jetOf(MapGerm{f.alpha}).realCoords()))) S.trivialContained = false;
    S.verdict = rigidityVerdict(S.dimension, S.targetAutDim, !leviSignature(T).degenerate);
    return S;
}

DimensionTrace oracleDimension(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                               int lowerBound, const SolveOptions &opt) {
    DimensionTrace t;
    t.lowerBound = lowerBound;
    for (int n = opt.startOrder; n <= opt.maxOrder; ++n) {
        t.dims.emplace_back(n, kernelDim(eliminateColumns(oracleSystem(M, T, H, n), kJetReal), kJetReal));
        decide(t, opt.window);
        if (t.accepted()) break;
    }
    return t;
}

MapGerm mapInNormalCoordinates(const MapGerm &H, const SourceHypersurface &M, int order) {
    if (M.g.isZero()) return H;
    const Vars &zw = vs::zw();
    Series z = Series::variable(zw, 0, order), w = Series::variable(zw, 1, order);
    return compose(H, {z, w + M.g.truncated(order) * Scalar::I()}, order);
}

std::pair<SourceHypersurface, MapGerm> genericitySetting(const Series &F, int eps, int order) {
    if (!F.vars()->sameAs(*vs::zw())) throw VariableMismatch("F must be a series in (z, w)");
    if (!F.constantTerm().isZero()) throw NonvanishingConstantTerm("F(0) must vanish");
    if (F.coeff(monoOf({2, 0})).isZero()) throw DegenerateMap("F_{z^2}(0) = 0");
    const Vars &zw = vs::zw();
    MapGerm H{{Series::variable(zw, 0, kExact), F, Series::variable(zw, 1, kExact)}};
    bool rigid = F.order() >= kExact;
    for (auto &t : F.terms()) rigid = rigid && t.first[1] == 0;
    if (rigid) {
        // Q = tau + 2i (z chi + eps F(z) Fbar(chi))
        const Vars &v = vs::zct();
        Series Fz = remap(F, v, {0, 1});
        Series Fc = conjugateSeries(F, v, {1, 2});
        Series Q = Series::variable(v, 2, kExact) +
                   (Series::variable(v, 0, kExact) * Series::variable(v, 1, kExact) + Fz * Fc * Scalar(eps)) *
                       Scalar(Real(), Real(2));
        return {sourceFromQ(Q), H};
    }
    const Vars &v = vs::zcwt();
    Series Fz = remap(F, v, {0, 2}).truncated(order), Fc = conjugateSeries(F, v, {1, 3}).truncated(order);
    Series rho = (Series::variable(v, 2, order) - Series::variable(v, 3, order)) * Scalar(Real(), Real(2)).inv() -
                 Series::variable(v, 0, order) * Series::variable(v, 1, order) - Fz * Fc * Scalar(eps);
    SourceHypersurface M = toNormalCoordinates(rho.truncated(order), order);
    return {M, mapInNormalCoordinates(H, M, order)};
}

GenericityReport genericityCertificate(const Series &F, int eps, int order) {
    GenericityReport R;
    R.epsilon = eps;
    R.order = order;
    static std::map<std::pair<int, int>, std::vector<int>> modelFree;
    auto key = std::make_pair(eps, order);
    if (!modelFree.count(key)) {
        const Vars &zw = vs::zw();
        Series z = Series::variable(zw, 0, kExact);
        auto [M0, H0] = genericitySetting(z * z, eps, order);
        RealLinearSystem sys;
        buildPsiAndConditions(M0, hyperquadric(eps), H0, order, sys);
        Echelon e(kJetReal);
        for (auto &r : sys.select(order)) e.add(r);
        modelFree[key] = e.freeColumns();
    }
    R.mu0 = modelFree[key];

    // same margin as the deformation path; order + 8 already loses rows at order 16
    int work = order + 16;
    auto [M, H] = genericitySetting(F, eps, work);
    RealLinearSystem sys;
    buildPsiAndConditions(M, hyperquadric(eps), H, order, sys);
    auto rows = sys.select(order);
    Echelon all(kJetReal);
    for (auto &r : rows) all.add(r);
    R.rank = all.rank();

    std::vector<int> newIndex(kJetReal, -1);
    int k = 0;
    for (int c = 0; c < kJetReal; ++c)
        if (!std::binary_search(R.mu0.begin(), R.mu0.end(), c)) newIndex[static_cast<std::size_t>(c)] = k++;
    Echelon comp(k);
    for (auto &r : rows) {
        SparseRow s;
        for (auto &[c, v] : r)
            if (newIndex[static_cast<std::size_t>(c)] >= 0) s.emplace_back(newIndex[static_cast<std::size_t>(c)], v);
        if (!s.empty()) comp.add(std::move(s));
    }
    R.complementRank = comp.rank();
    // below the order where the model kernel has shrunk to its 10 automorphisms the rank is only relative
    R.fullRank = k == kJetReal - 10 && R.complementRank == k;
    return R;
}

} // namespace crr

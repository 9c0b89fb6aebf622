#include "crrigid/reflection.hpp"

#include <algorithm>

namespace crr {

namespace {

void requireThreeDim(const TargetHypersurface &T) {
    if (T.n() != 3) throw VariableMismatch("deformations are computed for targets in C^3");
}

void addTo(JetForm &F, const DKey &k, const Series &c) {
    if (c.isZero()) return;
    auto it = F.find(k);
    if (it == F.end())
        F.emplace(k, c);
    else
        it->second += c;
}

long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Series det3(const std::array<std::array<Series, 3>, 3> &A) {
    return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
           A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
}

template <class Fn> ReflectionPrimitives mapPrimitives(const ReflectionPrimitives &p, Fn fn) {
    ReflectionPrimitives out;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
            out.a[k][j] = fn(p.a[k][j]);
            out.b[k][j] = fn(p.b[k][j]);
        }
    out.Qc = fn(p.Qc);
    out.Qcc = fn(p.Qcc);
    return out;
}

} // namespace

Series buildDeformationResidual(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                const DeformationField &field, int order) {
    requireThreeDim(T);
    for (auto &a : field.alpha)
        if (!a.constantTerm().isZero()) throw NonvanishingConstantTerm("deformation field must vanish at 0");
    if (!mappingResidual(H, M, T, order).isZero()) throw NotMapped("H does not map the source into the target");
    const Vars &v = vs::zct();
    auto args = targetArgsZCT(H, M, order);
    Series z = Series::variable(v, 0, order);
    Series Q = M.Q.truncated(order);
    Series out(v, order);
    for (int j = 0; j < 3; ++j) {
        Series rZ = substitute(T.r[j], args, order);
        Series rz = substitute(T.rbar[j], args, order);
        Series a = substitute(field.alpha[j], {z, Q}, order);
        Series ab = conjugateSeries(field.alpha[j], v, {1, 2}).truncated(order);
        out += (rZ * a + rz * ab).truncated(order);
    }
    return out;
}

ReflectionPrimitives reflectionPrimitives(const SourceHypersurface &M, const TargetHypersurface &T,
                                          const MapGerm &H, const Vars &v, int order) {
    requireThreeDim(T);
    Series z = Series::variable(v, 0, order), w = Series::variable(v, 1, order), c = Series::variable(v, 2, order);
    Series Qb = remap(M.Qbar, v).truncated(order);
    std::vector<Series> args;
    for (int i = 0; i < 3; ++i) args.push_back(substitute(H[i], {z, w}, order));
    for (int i = 0; i < 3; ++i) args.push_back(substitute(H[i].conj(), {c, Qb}, order));
    ReflectionPrimitives p;
    for (int j = 0; j < 3; ++j) {
        Series a = substitute(T.r[j], args, order);
        Series b = substitute(T.rbar[j], args, order);
        for (int k = 0; k < 3; ++k) {
            p.a[k][j] = k == 0 ? a : partialDerivative(a, 2, k);
            p.b[k][j] = k == 0 ? b : partialDerivative(b, 2, k);
        }
    }
    p.Qc = partialDerivative(Qb, 2);
    p.Qcc = partialDerivative(Qb, 2, 2);
    return p;
}

ReflectionPrimitives restrictPrimitives(const ReflectionPrimitives &p, const std::vector<Series> &images, int order) {
    return mapPrimitives(p, [&](const Series &f) { return substitute(f, images, order); });
}

ReflectionIdentity reflectionIdentity(const ReflectionPrimitives &p) {
    ReflectionIdentity out;
    const auto &A = p.a;
    out.s = det3(A);
    if (out.s.constantTerm().isZero()) throw DegenerateMap("det(r, Lr, L^2 r) vanishes at 0: H is not 2-nondegenerate");
    Series si = invertUnit(out.s);
    auto C = [&](int i, int j) {
        return A[(i + 1) % 3][(j + 1) % 3] * A[(i + 2) % 3][(j + 2) % 3] -
               A[(i + 1) % 3][(j + 2) % 3] * A[(i + 2) % 3][(j + 1) % 3];
    };
    // A alpha = -R  =>  alpha = -adj(A) R / s
    std::array<std::array<Series, 3>, 3> m;
    for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) m[l][k] = -(C(k, l) * si);

    // R_k = L^k applied to sum_h b_h alphabar_h(chi, Qbar)
    std::array<JetForm, 3> R;
    const auto &b = p.b;
    for (int h = 0; h < 3; ++h) {
        addTo(R[0], {h, 0, 0}, b[0][h]);

        addTo(R[1], {h, 0, 0}, b[1][h]);
        addTo(R[1], {h, 1, 0}, b[0][h]);
        addTo(R[1], {h, 0, 1}, b[0][h] * p.Qc);

        addTo(R[2], {h, 0, 0}, b[2][h]);
        addTo(R[2], {h, 1, 0}, b[1][h] * Scalar(2));
        addTo(R[2], {h, 0, 1}, b[1][h] * p.Qc * Scalar(2) + b[0][h] * p.Qcc);
        addTo(R[2], {h, 2, 0}, b[0][h]);
        addTo(R[2], {h, 1, 1}, b[0][h] * p.Qc * Scalar(2));
        addTo(R[2], {h, 0, 2}, b[0][h] * p.Qc * p.Qc);
    }
    for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k)
            for (auto &[key, c] : R[k]) addTo(out.F[l], key, m[l][k] * c);
    return out;
}

JetForm differentiatedIdentity(const JetForm &axisForm, int n1, int n2) {
    JetForm cur = axisForm;
    for (int i = 0; i < n1; ++i) {
        JetForm next;
        for (auto &[k, c] : cur) addTo(next, k, partialDerivative(c, 0));
        cur = std::move(next);
    }
    for (int i = 0; i < n2; ++i) {
        JetForm next;
        for (auto &[k, c] : cur) {
            addTo(next, k, partialDerivative(c, 1));
            addTo(next, {k.h, k.j1, k.j2 + 1}, c);
        }
        cur = std::move(next);
    }
    return cur;
}

SegreKernels segreIterate(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H, int N) {
    requireThreeDim(T);
    if (!M.strictlyPseudoconvex()) throw DegenerateMap("source is not strictly pseudoconvex at 0");
    // On the axis chi = 0 only w-degree <= 2 matters, so w and chi get a large
    // weight W there; truncated inputs limit how large W may be.
    int known = std::min(H.order(), M.Q.order());
    int W = N + 1;
    if (known < kExact) {
        if (known < N + 8) throw TruncationTooLow("map and source must be known to order " + std::to_string(N + 8));
        W = std::clamp((known - N) / 4, 2, N + 1);
    }

    // Segre slice w = Q(z, chi, 0)
    const Vars &zc = vs::zc();
    auto pS = reflectionPrimitives(M, T, H, vs::zwc(), N + 2);
    Series Q0 = remap(setZero(M.Q, 2), zc).truncated(N + 2);
    auto seg = reflectionIdentity(
        restrictPrimitives(pS, {Series::variable(zc, 0, N), Q0, Series::variable(zc, 1, N)}, N));

    // axis chi = 0
    Vars va = makeVars({"z", "w", "chi"}, {1, W, W});
    Vars vaxis = makeVars({"z", "w"}, {1, W});
    auto pA = reflectionPrimitives(M, T, H, va, N + 4 * W);
    auto axis = reflectionIdentity(
        mapPrimitives(pA, [&](const Series &f) { return remap(setZero(f, 2), vaxis).truncated(N + 2 * W); }));

    static const Vars vz = makeVars({"z"});
    std::map<DKey, std::map<int, Series>> G;
    for (int h = 0; h < 3; ++h)
        for (int n1 = 0; n1 <= 2; ++n1)
            for (int n2 = 0; n1 + n2 <= 2; ++n2) {
                auto &row = G[{h, n1, n2}];
                for (auto &[k, c] : differentiatedIdentity(axis.F[h], n1, n2)) {
                    if (k.j1 + k.j2 == 0) continue; // alphabar(0) = 0
                    int mono = jetMonoIndex(k.j1, k.j2);
                    if (mono < 0) throw Error("InternalError", "reflection identity produced a derivative of order > 4");
                    Series g = remap(setZero(c, 1), vz).truncated(N) * Scalar(factorial(k.j1) * factorial(k.j2));
                    Series gc = conjugateSeries(g, zc, {1});
                    int idx = jetIndex(k.h, mono);
                    auto it = row.find(idx);
                    if (it == row.end())
                        row.emplace(idx, gc);
                    else
                        it->second += gc;
                }
            }

    SegreKernels out;
    out.order = N;
    out.s0 = seg.s.constantTerm();
    for (int l = 0; l < 3; ++l) {
        for (auto &e : out.phi[l]) e = Series(zc, N);
        for (auto &[k, f] : seg.F[l]) {
            auto it = G.find(k);
            if (it == G.end()) continue;
            for (auto &[idx, g] : it->second) out.phi[l][idx] += (f * g).truncated(N);
        }
    }
    return out;
}

DeformationField fieldFromJet(const KernelTable &K, const JetVector &J, const std::string &label) {
    DeformationField f;
    f.label = label;
    for (int l = 0; l < 3; ++l) {
        Series acc = K[l][0] * J.v[0];
        for (int i = 1; i < kJetSize; ++i)
            if (!J.v[i].isZero()) acc += K[l][i] * J.v[i];
        f.alpha[l] = acc;
    }
    return f;
}

} // namespace crr

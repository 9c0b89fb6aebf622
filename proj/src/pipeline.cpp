#include "crrigid/pipeline.hpp"

#include <algorithm>
#include <set>

namespace crr {

const char *rowGroupName(RowGroup g) {
    switch (g) {
    case RowGroup::Obstruction:
        return "obstruction";
    case RowGroup::JetConsistency:
        return "jet-consistency";
    case RowGroup::Residual:
        return "residual";
    }
    return "?";
}

void RealLinearSystem::addComplex(const std::map<int, Scalar> &f, const std::map<int, Scalar> &g, RowGroup group,
                                  int degree) {
    // Lambda = x + i y:  f Lambda + g conj(Lambda) = (f + g) x + i (f - g) y
    std::map<int, Scalar> c;
    for (auto &[k, v] : f) {
        c[2 * k] += v;
        c[2 * k + 1] += v.timesI();
    }
    for (auto &[k, v] : g) {
        c[2 * k] += v;
        c[2 * k + 1] -= v.timesI();
    }
    SparseRow re, im;
    for (auto &[col, v] : c) {
        if (!v.re.isZero()) re.emplace_back(col, v.re);
        if (!v.im.isZero()) im.emplace_back(col, v.im);
    }
    for (SparseRow *r : {&re, &im})
        if (!r->empty()) {
            rows.push_back(std::move(*r));
            groups.push_back(group);
            degrees.push_back(degree);
        }
}

std::vector<SparseRow> RealLinearSystem::select(int maxDegree, unsigned groupMask) const {
    std::vector<SparseRow> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (degrees[i] <= maxDegree && (groupMask >> static_cast<unsigned>(groups[i]) & 1u)) out.push_back(rows[i]);
    return out;
}

namespace {

const Vars &zOnly() {
    static const Vars v = makeVars({"z"});
    return v;
}

// f * mono, dropping terms above `order`
Series shifted(const Series &f, const Mono &m, int order) {
    Series::Builder b(f.vars(), std::min(order, f.order() + f.vars()->degree(m)));
    for (auto &t : f.terms()) {
        Mono e = t.first;
        for (std::size_t i = 0; i < f.vars()->size(); ++i) e[i] = static_cast<std::int16_t>(e[i] + m[i]);
        if (f.vars()->degree(e) <= order) b.add(e, t.second);
    }
    return b.build();
}

Mono mono2(int a, int b) { return Mono{static_cast<std::int16_t>(a), static_cast<std::int16_t>(b)}; }
Mono mono3(int a, int b, int c) {
    return Mono{static_cast<std::int16_t>(a), static_cast<std::int16_t>(b), static_cast<std::int16_t>(c)};
}

// Columns x_c and y_c of the residual equation for one unknown coefficient
// c of alpha_l at z^m w^n: c Wp + conj(c) Wm with Wp = z^m Q^n r_l, Wm = chi^m tau^n rbar_l.
struct ResidualColumns {
    int order;
    std::vector<std::pair<int, int>> monos;
    // wp[l][monoIndex], wm[l][monoIndex], over vs::zct()
    std::array<std::vector<Series>, 3> wp, wm;
};

ResidualColumns residualColumns(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                int order) {
    const Vars &v = vs::zct();
    ResidualColumns rc;
    rc.order = order;
    rc.monos = oracleMonomials(order);
    auto args = targetArgsZCT(H, M, order);
    Series Q = M.Q.truncated(order);
    int maxN = 0;
    for (auto &[m, n] : rc.monos) maxN = std::max(maxN, n);
    std::vector<Series> Qp{Series::constant(v, Scalar(1), order)};
    while (static_cast<int>(Qp.size()) <= maxN) Qp.push_back(Qp.back() * Q);
    for (int l = 0; l < 3; ++l) {
        Series rZ = substitute(T.r[l], args, order);
        Series rz = substitute(T.rbar[l], args, order);
        std::vector<Series> QrZ;
        for (auto &q : Qp) QrZ.push_back((q * rZ).truncated(order));
        for (auto &[m, n] : rc.monos) {
            rc.wp[l].push_back(shifted(QrZ[n], mono3(m, 0, 0), order));
            rc.wm[l].push_back(shifted(rz, mono3(0, m, n), order));
        }
    }
    return rc;
}

} // namespace

std::vector<Series> segreCoefficients(const SourceHypersurface &M, int order) {
    std::map<int, Series::Builder> by;
    for (auto &t : M.Q.terms()) {
        if (t.first[2] != 0) continue;
        int j = t.first[1];
        int ord = M.Q.order() >= kExact ? order : std::min(order, M.Q.order() - j);
        auto it = by.find(j);
        if (it == by.end()) it = by.emplace(j, Series::Builder(zOnly(), ord)).first;
        it->second.add(Mono{t.first[0]}, t.second);
    }
    int maxJ = by.empty() ? 0 : by.rbegin()->first;
    std::vector<Series> A(static_cast<std::size_t>(maxJ + 1), Series(zOnly(), order));
    for (auto &[j, b] : by) A[static_cast<std::size_t>(j)] = b.build();
    if (A.size() < 2) A.resize(2, Series(zOnly(), order));
    return A;
}

PipelineArtifacts laurentInverse(const SourceHypersurface &M, int N) {
    PipelineArtifacts art;
    art.order = N;
    const int T = 2 * N + 3;
    auto A = segreCoefficients(M, T);
    art.A1 = A[1];
    if (art.A1.coeff(Mono{1}).isZero()) throw DegenerateMap("Q_chi(z,0,0) has no linear term: source is Levi-degenerate");
    art.B = art.A1 * art.A1;
    {
        Series::Builder b(zOnly(), art.B.order() - 2);
        for (auto &t : art.B.terms()) b.add(Mono{static_cast<std::int16_t>(t.first[0] - 2)}, t.second);
        art.U = b.build();
    }
    // psiHat(z, u) = u + sum_{j >= 2} A_j A1^(j-2) u^j
    static const Vars vzu = makeVars({"z", "u"});
    static const Vars vzt = makeVars({"z", "t"});
    Series::Builder ph(vzu, T);
    ph.add(mono2(0, 1), Scalar(1));
    Series a1pow = Series::constant(zOnly(), Scalar(1), T);
    for (std::size_t j = 2; j < A.size(); ++j) {
        Series c = A[j] * a1pow;
        for (auto &t : c.terms())
            if (t.first[0] + static_cast<int>(j) <= T) ph.add(mono2(t.first[0], static_cast<int>(j)), t.second);
        a1pow = a1pow * art.A1;
    }
    art.psiHat = ph.build();
    art.psi = reversion(art.psiHat, vzt, T);

    // chi(z, w) = A1(z) sum psi_ab z^(a - 2b) w^b U^(-b)
    const Vars &vL = vs::zwLaurent(N + 4);
    const int O = N + 1;
    Series Ui = remap(invertUnit(art.U.truncated(O)), vL);
    std::map<int, Series::Builder> byB;
    for (auto &t : art.psi.terms()) {
        int a = t.first[0], b = t.first[1];
        if (a > O) continue;
        auto it = byB.find(b);
        if (it == byB.end()) it = byB.emplace(b, Series::Builder(vL, O)).first;
        it->second.add(mono2(a - 2 * b, b), t.second);
    }
    Series sum(vL, O);
    Series uPow = Series::constant(vL, Scalar(1), O);
    int lastB = 0;
    for (auto &[b, builder] : byB) {
        while (lastB < b) {
            uPow = (uPow * Ui).truncated(O);
            ++lastB;
        }
        sum += (builder.build() * uPow).truncated(O);
    }
    art.chi = (remap(art.A1.truncated(O), vL) * sum).truncated(O);
    return art;
}

PipelineArtifacts buildPsiAndConditions(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                        int N, RealLinearSystem &sys) {
    PipelineArtifacts art = laurentInverse(M, N);
    auto seg = segreIterate(M, T, H, N);
    art.s0 = seg.s0;
    art.phi = seg.phi;

    const Vars &vL = vs::zwLaurent(N + 4);
    std::vector<Series> chiPow{Series::constant(vL, Scalar(1), N)};
    while (static_cast<int>(chiPow.size()) <= N) chiPow.push_back((chiPow.back() * art.chi).truncated(N));

    for (int l = 0; l < 3; ++l)
        for (int k = 0; k < kJetSize; ++k) {
            std::map<int, Series::Builder> byB;
            for (auto &t : art.phi[l][k].terms()) {
                int b = t.first[1];
                auto it = byB.find(b);
                if (it == byB.end()) it = byB.emplace(b, Series::Builder(vL, N)).first;
                it->second.add(mono2(t.first[0], 0), t.second);
            }
            Series psi(vL, N);
            for (auto &[b, builder] : byB) psi += (builder.build() * chiPow[static_cast<std::size_t>(b)]).truncated(N);
            auto split = laurentSplit(psi, vs::zw());
            art.Psi[l][k] = std::move(psi);
            art.K[l][k] = std::move(split.holomorphic);
            art.obstruction[l][k] = std::move(split.obstruction);
        }

    // (i) coefficients of negative powers of z vanish
    for (int l = 0; l < 3; ++l) {
        std::set<std::pair<int, int>> keys;
        for (auto &ob : art.obstruction[l])
            for (auto &[m, c] : ob) keys.insert(m);
        for (auto &m : keys) {
            std::map<int, Scalar> f;
            for (int k = 0; k < kJetSize; ++k) {
                auto it = art.obstruction[l][k].find(m);
                if (it != art.obstruction[l][k].end()) f[k] = it->second;
            }
            sys.addComplex(f, {}, RowGroup::Obstruction, m.first);
        }
    }
    // (ii) the 4-jet of K(Lambda) is Lambda
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < kJetMonos; ++i) {
            const JetMono &jm = jetMonos()[i];
            std::map<int, Scalar> f;
            for (int k = 0; k < kJetSize; ++k) {
                Scalar c = art.K[l][k].coeff(mono2(jm.m, jm.l));
                if (!c.isZero()) f[k] = c;
            }
            f[jetIndex(l, i)] -= Scalar(1);
            sys.addComplex(f, {}, RowGroup::JetConsistency, jm.m + 2 * jm.l);
        }
    // (iii) K(Lambda) solves the linearized equation up to order N
    auto rc = residualColumns(M, T, H, N);
    std::map<std::pair<int, int>, int> monoIdx;
    for (std::size_t i = 0; i < rc.monos.size(); ++i) monoIdx[rc.monos[i]] = static_cast<int>(i);
    std::map<Mono, std::pair<std::map<int, Scalar>, std::map<int, Scalar>>> eq;
    const Vars &v = vs::zct();
    for (int k = 0; k < kJetSize; ++k) {
        Series::Builder e1(v, N), e2(v, N);
        for (int l = 0; l < 3; ++l)
            for (auto &t : art.K[l][k].terms()) {
                auto it = monoIdx.find({t.first[0], t.first[1]});
                if (it == monoIdx.end()) continue;
                Scalar cb = t.second.conj();
                for (auto &u : rc.wp[l][static_cast<std::size_t>(it->second)].terms()) e1.addMul(u.first, t.second, u.second);
                for (auto &u : rc.wm[l][static_cast<std::size_t>(it->second)].terms()) e2.addMul(u.first, cb, u.second);
            }
        Series s1 = e1.build(), s2 = e2.build();
        for (auto &t : s1.terms()) eq[t.first].first[k] = t.second;
        for (auto &t : s2.terms()) eq[t.first].second[k] = t.second;
    }
    for (auto &[m, fg] : eq) sys.addComplex(fg.first, fg.second, RowGroup::Residual, v->degree(m));
    return art;
}

std::vector<std::pair<int, int>> oracleMonomials(int order) {
    std::vector<std::pair<int, int>> out;
    for (auto &jm : jetMonos()) out.emplace_back(jm.m, jm.l);
    for (int d = 1; d <= order; ++d)
        for (int n = 0; 2 * n <= d; ++n) {
            int m = d - 2 * n;
            if (m + n > 4) out.emplace_back(m, n);
        }
    return out;
}

std::vector<SparseRow> oracleSystem(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                    int order) {
    auto rc = residualColumns(M, T, H, order);
    std::map<Mono, std::map<int, Scalar>> eq;
    for (int l = 0; l < 3; ++l)
        for (std::size_t i = 0; i < rc.monos.size(); ++i) {
            int col = 2 * (3 * static_cast<int>(i) + l);
            // x column: Wp + Wm ; y column: i (Wp - Wm)
            for (auto &t : rc.wp[l][i].terms()) {
                eq[t.first][col] += t.second;
                eq[t.first][col + 1] += t.second.timesI();
            }
            for (auto &t : rc.wm[l][i].terms()) {
                eq[t.first][col] += t.second;
                eq[t.first][col + 1] -= t.second.timesI();
            }
        }
    std::vector<SparseRow> rows;
    for (auto &[m, cols] : eq) {
        SparseRow re, im;
        for (auto &[c, val] : cols) {
            if (!val.re.isZero()) re.emplace_back(c, val.re);
            if (!val.im.isZero()) im.emplace_back(c, val.im);
        }
        if (!re.empty()) rows.push_back(std::move(re));
        if (!im.empty()) rows.push_back(std::move(im));
    }
    return rows;
}

} // namespace crr

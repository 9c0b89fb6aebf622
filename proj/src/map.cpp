#include "crrigid/map.hpp"

#include "crrigid/linalg.hpp"

#include <algorithm>

namespace crr {

int MapGerm::order() const { return std::min({H[0].order(), H[1].order(), H[2].order()}); }

const std::array<JetMono, kJetMonos> &jetMonos() {
    static const std::array<JetMono, kJetMonos> m = [] {
        std::array<JetMono, kJetMonos> out{};
        int k = 0;
        for (int d = 1; d <= 4; ++d)
            for (int a = d; a >= 0; --a) out[k++] = {a, d - a};
        return out;
    }();
    return m;
}

int jetMonoIndex(int m, int l) {
    int d = m + l;
    if (m < 0 || l < 0 || d < 1 || d > 4) return -1;
    // monomials of degree < d come first: 2 + 3 + ... + d
    int before = (d * (d + 1)) / 2 - 1;
    return before + (d - m);
}

std::string jetName(int index) {
    const JetMono &jm = jetMonos()[static_cast<std::size_t>(index / 3)];
    return "L" + std::to_string(index % 3 + 1) + "^{" + std::to_string(jm.m) + "," + std::to_string(jm.l) + "}";
}

std::vector<Real> JetVector::realCoords() const {
    std::vector<Real> x(kJetReal);
    for (int i = 0; i < kJetSize; ++i) {
        x[2 * i] = v[i].re;
        x[2 * i + 1] = v[i].im;
    }
    return x;
}

JetVector JetVector::fromReal(const std::vector<Real> &x) {
    JetVector J;
    for (int i = 0; i < kJetSize; ++i) J.v[i] = Scalar(x[2 * i], x[2 * i + 1]);
    return J;
}

JetVector jetOf(const MapGerm &H, int k) {
    JetVector J;
    for (int h = 0; h < 3; ++h)
        for (int i = 0; i < kJetMonos; ++i) {
            const JetMono &jm = jetMonos()[i];
            if (jm.m + jm.l > k) continue;
            J.v[jetIndex(h, i)] = H[h].coeff(Mono{static_cast<std::int16_t>(jm.m), static_cast<std::int16_t>(jm.l)});
        }
    return J;
}

MapGerm mapFromJet(const JetVector &J, int order) {
    MapGerm H;
    for (int h = 0; h < 3; ++h) {
        Series::Builder b(vs::zw(), order);
        for (int i = 0; i < kJetMonos; ++i) {
            const JetMono &jm = jetMonos()[i];
            b.add(Mono{static_cast<std::int16_t>(jm.m), static_cast<std::int16_t>(jm.l)}, J.v[jetIndex(h, i)]);
        }
        H[h] = b.build();
    }
    return H;
}

bool transversalityCheck(const MapGerm &H) {
    return !H[2].coeff(Mono{1, 0}).isZero() || !H[2].coeff(Mono{0, 1}).isZero();
}

namespace {

struct Lin2 {
    Scalar a, b, c, d; // [[a b],[c d]]
    Scalar det() const { return a * d - b * c; }
};

Lin2 linearPart(const Series &f1, const Series &f2) {
    return {f1.coeff(Mono{1, 0}), f1.coeff(Mono{0, 1}), f2.coeff(Mono{1, 0}), f2.coeff(Mono{0, 1})};
}

} // namespace

std::array<Series, 2> invertGerm(const std::array<Series, 2> &f, int order) {
    const Vars &v = vs::zw();
    for (auto &fi : f)
        if (!fi.constantTerm().isZero()) throw NonvanishingConstantTerm("germ does not fix 0");
    Lin2 J = linearPart(f[0], f[1]);
    Scalar det = J.det();
    if (det.isZero()) throw RankDeficient("linear part of the germ is singular");
    Scalar id = det.inv();
    Lin2 Ji{J.d * id, -(J.b * id), -(J.c * id), J.a * id};
    Series z = Series::variable(v, 0, order), w = Series::variable(v, 1, order);
    auto apply = [&](const Series &x, const Series &y) {
        return std::array<Series, 2>{x * Ji.a + y * Ji.b, x * Ji.c + y * Ji.d};
    };
    std::array<Series, 2> phi = apply(z, w);
    for (int it = 0; it <= 2 * order + 4; ++it) {
        Series e1 = substitute(f[0], {phi[0], phi[1]}, order) - z;
        Series e2 = substitute(f[1], {phi[0], phi[1]}, order) - w;
        if (e1.isZero() && e2.isZero()) break;
        auto corr = apply(e1, e2);
        phi[0] -= corr[0];
        phi[1] -= corr[1];
    }
    return phi;
}

MapGerm compose(const MapGerm &H, const std::array<Series, 2> &phi, int order) {
    MapGerm out;
    for (int i = 0; i < 3; ++i) out[i] = substitute(H[i], {phi[0], phi[1]}, order);
    return out;
}

NormalizedMap normalizeMap(const MapGerm &H, int order) {
    if (!transversalityCheck(H)) throw NotTransversal("dH3(0) = 0");
    NormalizedMap out;
    MapGerm G = H;
    if (linearPart(H[0], H[2]).det().isZero()) {
        if (linearPart(H[1], H[2]).det().isZero()) throw RankDeficient("no component pairs with H3 to a local chart");
        std::swap(G[0], G[1]);
        out.swapped = true;
    }
    out.phi = invertGerm({G[0], G[2]}, order);
    out.H = compose(G, out.phi, order);
    const Vars &v = vs::zw();
    if (!(out.H[0] - Series::variable(v, 0, order)).isZero() || !(out.H[2] - Series::variable(v, 1, order)).isZero())
        throw RankDeficient("normalization did not reach the form (z, F, w)");
    return out;
}

std::vector<Series> targetArgsZCT(const MapGerm &H, const SourceHypersurface &M, int order) {
    const Vars &v = vs::zct();
    Series z = Series::variable(v, 0, order);
    std::vector<Series> args;
    for (int i = 0; i < 3; ++i) args.push_back(substitute(H[i], {z, M.Q}, order));
    for (int i = 0; i < 3; ++i) args.push_back(conjugateSeries(H[i], v, {1, 2}));
    for (int i = 3; i < 6; ++i) args[i] = args[i].truncated(order);
    return args;
}

std::vector<Series> targetArgsZWC(const MapGerm &H, const SourceHypersurface &M, int order) {
    const Vars &v = vs::zwc();
    Series z = Series::variable(v, 0, order), w = Series::variable(v, 1, order),
           c = Series::variable(v, 2, order);
    std::vector<Series> args;
    for (int i = 0; i < 3; ++i) args.push_back(substitute(H[i], {z, w}, order));
    for (int i = 0; i < 3; ++i) args.push_back(substitute(H[i].conj(), {c, M.Qbar}, order));
    return args;
}

namespace {
void requireThreeDim(const TargetHypersurface &T) {
    if (T.n() != 3) throw VariableMismatch("maps go into C^3 targets");
}
} // namespace

Series mappingResidual(const MapGerm &H, const SourceHypersurface &M, const TargetHypersurface &T,
                       int order) {
    requireThreeDim(T);
    return substitute(T.rho, targetArgsZCT(H, M, order), order);
}

NondegeneracyCertificate nondegeneracyCheck(const MapGerm &H, const SourceHypersurface &M,
                                            const TargetHypersurface &T, int checkOrder,
                                            bool requireMapped, int bound) {
    requireThreeDim(T);
    NondegeneracyCertificate cert;
    cert.mapped = mappingResidual(H, M, T, checkOrder).isZero();
    if (!cert.mapped && requireMapped) throw NotMapped("rho(H, Hbar) does not vanish on the complexified source");
    int order = bound + 2;
    auto args = targetArgsZWC(H, M, order);
    std::vector<std::array<Scalar, 3>> rows;
    std::vector<Series> a;
    for (int j = 0; j < 3; ++j) a.push_back(substitute(T.r[j], args, order));
    for (int k = 0; k <= bound; ++k) {
        std::array<Scalar, 3> row;
        for (int j = 0; j < 3; ++j) {
            mpz_class f = 1;
            for (int t = 2; t <= k; ++t) f *= t;
            row[j] = a[j].coeff(Mono{0, 0, static_cast<std::int16_t>(k)}) * Scalar::rational(mpq_class(f));
        }
        rows.push_back(row);
    }
    // complex span dimension via the real span of {v, i v}
    Echelon e(6);
    for (int k = 0; k <= bound; ++k) {
        std::vector<Real> x(6), y(6);
        for (int j = 0; j < 3; ++j) {
            x[2 * j] = rows[k][j].re;
            x[2 * j + 1] = rows[k][j].im;
            Scalar iv = rows[k][j].timesI();
            y[2 * j] = iv.re;
            y[2 * j + 1] = iv.im;
        }
        e.add(x);
        e.add(y);
        cert.spanDims.push_back(e.rank() / 2);
        if (cert.k0 < 0 && e.rank() == 6) cert.k0 = k;
    }
    auto &r = rows;
    cert.s0 = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
              r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    return cert;
}

// ---- isotropies ----

namespace {

bool realPositive(const Scalar &x) { return x.isReal() && x.re.sign() > 0; }

} // namespace

std::array<Series, 2> sourceIsotropyMap(const SourceIsotropy &g, int order) {
    if (!realPositive(g.lambda)) throw NonRepresentableParameter("lambda must be real and positive");
    if (!g.r.isReal()) throw NonRepresentableParameter("r must be real");
    if (!(g.u * g.u.conj()).isOne()) throw NonRepresentableParameter("|u| must be 1");
    const Vars &v = vs::zw();
    Series z = Series::variable(v, 0, order), w = Series::variable(v, 1, order);
    Scalar I = Scalar::I();
    Series den = Series::constant(v, Scalar(1), order) - z * (Scalar(2) * I * g.c.conj()) +
                 w * (g.r - I * g.c * g.c.conj());
    Series di = invertUnit(den);
    return {(z + w * g.c) * (g.lambda * g.u) * di, w * (g.lambda * g.lambda) * di};
}

std::array<Series, 3> targetIsotropyMap(const TargetIsotropy &g, int order) {
    if (!realPositive(g.lambda)) throw NonRepresentableParameter("lambda' must be real and positive");
    if (!g.r.isReal()) throw NonRepresentableParameter("r' must be real");
    Scalar eps(g.epsilon);
    // U^* diag(1,eps) U = diag(1,eps)
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Scalar s = g.U[0][i].conj() * g.U[0][j] + eps * g.U[1][i].conj() * g.U[1][j];
            Scalar want = i != j ? Scalar() : (i == 0 ? Scalar(1) : eps);
            if (s != want) throw NonRepresentableParameter("U' is not unitary for the form of signature eps");
        }
    Vars v = targetHoloVars(2);
    Series z1 = Series::variable(v, 0, order), z2 = Series::variable(v, 1, order), w = Series::variable(v, 2, order);
    Scalar I = Scalar::I();
    Scalar norm = g.c[0].conj() * g.c[0] + eps * g.c[1].conj() * g.c[1];
    Series den = Series::constant(v, Scalar(1), order) -
                 (z1 * g.c[0].conj() + z2 * (eps * g.c[1].conj())) * (Scalar(2) * I) + w * (g.r - I * norm);
    Series di = invertUnit(den);
    Series a = z1 + w * g.c[0], b = z2 + w * g.c[1];
    return {(a * g.U[0][0] + b * g.U[0][1]) * g.lambda * di, (a * g.U[1][0] + b * g.U[1][1]) * g.lambda * di,
            w * (g.lambda * g.lambda) * di};
}

MapGerm applyIsotropy(const IsotropyElement &g, const MapGerm &H, int order) {
    auto sigma = sourceIsotropyMap(g.source, order);
    auto sigmaInv = invertGerm(sigma, order);
    MapGerm Hs = compose(H, sigmaInv, order);
    auto sp = targetIsotropyMap(g.target, order);
    MapGerm out;
    for (int i = 0; i < 3; ++i) out[i] = substitute(sp[i], {Hs[0], Hs[1], Hs[2]}, order);
    return out;
}

JetVector applyIsotropy(const IsotropyElement &g, const JetVector &J) {
    // weighted order 8 covers every monomial of total degree <= 4
    const int order = 8;
    return jetOf(applyIsotropy(g, mapFromJet(J, order), order), 4);
}

} // namespace crr

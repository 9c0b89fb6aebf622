#include "doctest.h"
#include "problems.hpp"

#include "crrigid/pipeline.hpp"

using namespace crr;
using namespace crrtest;

namespace {

struct LTerm {
    Scalar c;
    int h, m, n;
    bool bar = false;
};

long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// A linear form written in derivatives d^(m+n) alpha_h / dz^m dw^n (0), converted
// to Taylor coordinates and checked against the row space of the system.
bool inRowSpace(const Echelon &E, const std::vector<LTerm> &terms) {
    std::map<int, Scalar> f, g;
    for (auto &t : terms) {
        int k = jetIndex(t.h - 1, jetMonoIndex(t.m, t.n));
        (t.bar ? g : f)[k] += t.c * Scalar(factorial(t.m) * factorial(t.n));
    }
    RealLinearSystem s;
    s.addComplex(f, g, RowGroup::Residual, 0);
    for (auto &r : s.rows)
        if (!E.contains(r)) return false;
    return true;
}

Echelon echelonOf(const std::vector<SparseRow> &rows) {
    Echelon e(kJetReal);
    for (auto &r : rows) e.add(r);
    return e;
}

int kernelDim(const std::vector<SparseRow> &rows) { return kJetReal - echelonOf(rows).rank(); }

bool sameSpan(const Echelon &a, const Echelon &b) {
    if (a.rank() != b.rank()) return false;
    for (auto &r : a.rows())
        if (!b.contains(r)) return false;
    return true;
}

} // namespace

TEST_CASE("Segre data of the model source") {
    auto A = segreCoefficients(m0(), 8);
    REQUIRE(A.size() == 3);
    CHECK((A[1] - (Series::variable(A[1].vars(), 0, 8) * qi(2))).isZero());
    auto art = laurentInverse(m0(), 10);
    Series z = Series::variable(art.B.vars(), 0, 10);
    CHECK((art.B - z * z * q(-4)).truncated(8).isZero());
}

TEST_CASE("the Laurent inverse of the Segre map") {
    // w = 2i(u + u^2) with u = z chi, so chi = -(1 - sqrt(1 - 2iw)) / (2z)
    const int N = 12;
    auto art = laurentInverse(m0(), N);
    static const Vars vw = makeVars({"w"});
    Series w = Series::variable(vw, 0, N);
    Series root = sqrtUnit(Series::constant(vw, q(1), N) - w * qi(2));
    Series expect = (root - Series::constant(vw, q(1), N)) * q(1, 2);
    for (auto &t : art.chi.terms()) CHECK(t.first[0] == -1);
    for (int k = 1; 2 * k - 1 <= N; ++k)
        CHECK(art.chi.coeff(Mono{-1, static_cast<std::int16_t>(k)}) == expect.coeff(Mono{static_cast<std::int16_t>(k)}));
    CHECK(art.chi.coeff(Mono{-1, 1}) == qi(-1, 2));
    CHECK(art.chi.coeff(Mono{-1, 2}) == q(1, 4));
}

TEST_CASE("model example: rows of the jet parametrization") {
    const int N = 16;
    RealLinearSystem sys;
    auto art = buildPsiAndConditions(m0(), hyperquadric(1), h0(), N, sys);
    CHECK(art.s0 == qi(-1));
    // z^-1 w^4 in Psi_1 is an obstruction
    bool found = false;
    for (auto &ob : art.obstruction[0]) found = found || ob.count({7, 4});
    CHECK(found);

    Echelon E = echelonOf(sys.select(N));
    CHECK(kJetReal - E.rank() == 10);
    // (i)
    CHECK(inRowSpace(E, {{q(3), 2, 0, 2}, {qi(2), 2, 0, 3}}));
    CHECK(inRowSpace(E, {{q(12), 1, 0, 2}, {q(-2), 1, 0, 3}, {q(3), 2, 1, 1}, {qi(3), 2, 1, 2}}));
    // (iii)
    CHECK(inRowSpace(E, {{q(2), 1, 0, 1}, {qi(-1), 3, 1, 1, true}}));
    CHECK(inRowSpace(E, {{q(1), 3, 0, 1}, {q(-1), 1, 1, 0}, {q(-1), 1, 1, 0, true}}));
    CHECK(inRowSpace(E, {{qi(4), 1, 0, 1}, {q(2), 2, 1, 0}, {q(1), 1, 2, 0, true}}));
    CHECK(inRowSpace(E, {{qi(4), 2, 0, 1}, {q(1), 3, 2, 1, true}}));
    CHECK(inRowSpace(E, {{q(1), 1, 1, 1}, {q(1), 1, 1, 1, true}, {q(-1), 3, 0, 2}}));
    CHECK(inRowSpace(E, {{q(10), 1, 1, 1}, {qi(-2), 1, 1, 2}, {q(-1), 2, 2, 1}, {q(-4), 3, 0, 2}}));
}

TEST_CASE("sphere map: rows of the jet parametrization") {
    const int N = 14;
    RealLinearSystem sys;
    buildPsiAndConditions(sphere2(), hyperquadric(1), sphereMap(6 * N), N, sys);
    Echelon E = echelonOf(sys.select(N));
    Scalar s = Scalar::sqrtD();
    CHECK(inRowSpace(E, {{q(2), 1, 0, 1}, {qi(-1), 3, 1, 1, true}}));
    CHECK(inRowSpace(E, {{q(1), 3, 0, 1}, {q(-1), 1, 1, 0}, {q(-1), 1, 1, 0, true}}));
    CHECK(inRowSpace(E, {{qi(4), 1, 0, 1}, {s * q(2), 2, 1, 0}, {q(1), 1, 2, 0, true}}));
    CHECK(inRowSpace(E, {{s * qi(4), 2, 0, 1}, {q(1), 3, 2, 1, true}}));
    // the coefficient of z chi tau involves alpha_3 at w^2
    CHECK(inRowSpace(E, {{qi(1), 1, 1, 0},
                         {qi(-1), 1, 1, 0, true},
                         {q(-1), 1, 1, 1},
                         {q(-1), 1, 1, 1, true},
                         {q(1), 3, 0, 2}}));
}

TEST_CASE("kernel dimensions of the bundled examples") {
    auto dims = [](const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H, int N) {
        RealLinearSystem sys;
        buildPsiAndConditions(M, T, H, N, sys);
        std::vector<int> out;
        for (int n = 12; n <= N; ++n) out.push_back(kernelDim(sys.select(n)));
        return out;
    };
    CHECK(dims(m0(), hyperquadric(1), h0(), 17) == std::vector<int>{17, 13, 11, 11, 10, 10});
    CHECK(dims(m62(), m1p(), h0(), 13) == std::vector<int>{0, 0});
    CHECK(dims(m63(), m2p(), h0(), 16) == std::vector<int>{5, 3, 2, 1, 1});
    CHECK(dims(sphere2(), hyperquadric(1), sphereMap(84), 14) == std::vector<int>{22, 22, 22});
}

TEST_CASE("row groups are nested by mask") {
    RealLinearSystem sys;
    buildPsiAndConditions(m0(), hyperquadric(1), h0(), 12, sys);
    int i = kernelDim(sys.select(12, 1u)), ii = kernelDim(sys.select(12, 3u)), all = kernelDim(sys.select(12));
    CHECK(i == 72);
    CHECK(ii == 44);
    CHECK(all == 17);
}

TEST_CASE("direct truncation agrees with the jet parametrization") {
    struct Case {
        SourceHypersurface M;
        TargetHypersurface T;
        MapGerm H;
        int order;
    };
    std::vector<Case> cases{{m0(), hyperquadric(1), h0(), 18},
                            {m62(), m1p(), h0(), 14},
                            {m63(), m2p(), h0(), 20},
                            {sphere2(), hyperquadric(1), sphereMap(96), 16}};
    for (auto &c : cases) {
        RealLinearSystem sys;
        buildPsiAndConditions(c.M, c.T, c.H, c.order, sys);
        Echelon a = echelonOf(sys.select(c.order));
        Echelon b = echelonOf(eliminateColumns(oracleSystem(c.M, c.T, c.H, c.order), kJetReal));
        CHECK(sameSpan(a, b));
    }
}

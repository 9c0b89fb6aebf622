#include "doctest.h"
#include "problems.hpp"

#include "crrigid/solver.hpp"

using namespace crr;
using namespace crrtest;

namespace {

DeformationField ex63Field() { return {{Z() * qi(1), Z() * Z() * qi(1, 3), Series(vs::zw(), kExact)}, "ex63"}; }

MapGerm h3t(const Scalar &t) { return germ(Z(), Z() * t, W() * (q(1) + t * t)); }

bool inSpan(const std::vector<JetVector> &basis, const DeformationField &f) {
    Echelon e(kJetReal);
    for (auto &b : basis) e.add(b.realCoords());
    return e.contains(makeRow(jetOf(MapGerm{f.alpha}).realCoords()));
}

} // namespace

TEST_CASE("acceptance rule for truncated dimensions") {
    DimensionTrace t;
    t.lowerBound = 10;
    t.dims = {{12, 17}, {13, 13}, {14, 11}, {15, 11}};
    decide(t, 4);
    CHECK_FALSE(t.accepted());
    t.dims.push_back({16, 10});
    decide(t, 4);
    CHECK(t.status == "certified");
    CHECK(t.order == 16);

    DimensionTrace s;
    s.dims = {{12, 5}, {13, 3}, {14, 3}, {15, 3}};
    decide(s, 4);
    CHECK_FALSE(s.accepted());
    s.dims.push_back({16, 3});
    decide(s, 4);
    CHECK(s.status == "stabilized");
    CHECK(s.dimension == 3);

    DimensionTrace bad;
    bad.lowerBound = 2;
    bad.dims = {{12, 1}};
    CHECK_THROWS_AS(decide(bad, 4), Error);
}

TEST_CASE("hyperquadric automorphisms: closed form against the direct solver") {
    for (int eps : {1, -1}) {
        auto T = hyperquadric(eps);
        for (auto &V : hyperquadricGenerators(eps, 2)) CHECK(automorphismResidual(T, V, 10).isZero());
        auto closed = infinitesimalAutomorphisms(T);
        auto direct = infinitesimalAutomorphisms(T, true);
        CHECK(closed.closedForm);
        CHECK(closed.dimension == 10);
        CHECK(direct.dimension == 10);
        CHECK(direct.trace.status == "certified");
    }
    // the eps = -1 generators are not tangent to the eps = +1 hyperquadric
    bool allTangent = true;
    for (auto &V : hyperquadricGenerators(-1, 2))
        allTangent = allTangent && automorphismResidual(hyperquadric(1), V, 8).isZero();
    CHECK_FALSE(allTangent);
    CHECK(infinitesimalAutomorphisms(hyperquadric(1, 1), true).dimension == 5);
}

TEST_CASE("automorphisms of the example hypersurfaces") {
    CHECK(infinitesimalAutomorphisms(m1p()).dimension == 0);
    CHECK(infinitesimalAutomorphisms(m2p()).dimension == 0);
    CHECK(infinitesimalAutomorphisms(m3p()).dimension == 0);
    auto src = infinitesimalAutomorphisms(sourceAsTarget(m0()));
    CHECK(src.dimension == 1);
    REQUIRE(src.known.size() == 1);
    CHECK(src.known[0].label == "h11");
    CHECK(infinitesimalAutomorphisms(sourceAsTarget(sphere2())).dimension == 5);
}

TEST_CASE("model example") {
    auto S = computeDeformationSpace(m0(), hyperquadric(1), h0());
    CHECK(S.dimension == 10);
    CHECK(S.trace.status == "certified");
    CHECK(S.trivialDim == 10);
    CHECK(S.jetBasis.size() == 10);
    CHECK(S.fieldBasis.size() == 10);
    CHECK(S.basisVerified);
    CHECK(S.trivialContained);
    REQUIRE(S.verdict);
    CHECK(*S.verdict == Verdict::RigidThm47);

    // any rational combination of basis fields solves the equation
    DeformationField c = S.fieldBasis[0];
    for (int l = 0; l < 3; ++l) c.alpha[l] = S.fieldBasis[0].alpha[l] * q(3, 7) - S.fieldBasis[4].alpha[l] * q(2);
    CHECK(buildDeformationResidual(m0(), hyperquadric(1), h0(), c, S.trace.order).isZero());
}

TEST_CASE("examples with rigid and non-rigid outcomes") {
    auto S2 = computeDeformationSpace(m62(), m1p(), h0());
    CHECK(S2.dimension == 0);
    REQUIRE(S2.verdict);
    CHECK(*S2.verdict == Verdict::RigidThm46);

    auto S3 = computeDeformationSpace(m63(), m2p(), h0(), {ex63Field()});
    CHECK(S3.dimension == 1);
    CHECK(S3.rejected.empty());
    CHECK(inSpan(S3.jetBasis, ex63Field()));
    CHECK(*S3.verdict == Verdict::Inconclusive);

    for (auto t : {q(1), q(-2, 3)}) {
        auto S4 = computeDeformationSpace(m0(), m3p(), h3t(t));
        CHECK(S4.dimension == 10);
        CHECK(S4.sourceTrivialDim == 1);
    }
    CHECK_THROWS_AS(computeDeformationSpace(m0(), m3p(), h3t(q(0))), DegenerateMap);
}

TEST_CASE("a field that is not a solution is rejected from the lower bound") {
    DeformationField wrong{{Z() * q(1), Series(vs::zw(), kExact), Series(vs::zw(), kExact)}, "wrong"};
    auto S = computeDeformationSpace(m63(), m2p(), h0(), {wrong});
    CHECK(S.rejected == std::vector<std::string>{"wrong"});
    CHECK(S.dimension == 1);
}

TEST_CASE("sphere map") {
    auto H = sphereMap(120);
    auto X = sphereFields(40);
    for (auto &f : X) CHECK(buildDeformationResidual(sphere2(), hyperquadric(1), H, f, 14).isZero());
    CHECK(jetRank(X) == 8);
    auto S = computeDeformationSpace(sphere2(), hyperquadric(1), H, X);
    CHECK(S.trivialDim == 10);
    CHECK(S.sourceTrivialDim == 14);
    CHECK(S.dimension == 22);
    CHECK(S.trace.status == "certified");
    CHECK(S.trivialContained);
    for (auto &f : X) CHECK(inSpan(S.jetBasis, f));
    CHECK(*S.verdict == Verdict::Inconclusive);
}

TEST_CASE("oracle and pipeline agree") {
    struct Case {
        SourceHypersurface M;
        TargetHypersurface T;
        MapGerm H;
        std::vector<DeformationField> extra;
    };
    std::vector<Case> cases{{m0(), hyperquadric(1), h0(), {}},
                            {m62(), m1p(), h0(), {}},
                            {m63(), m2p(), h0(), {ex63Field()}},
                            {sphere2(), hyperquadric(1), sphereMap(160), sphereFields(40)}};
    for (auto &c : cases) {
        auto S = computeDeformationSpace(c.M, c.T, c.H, c.extra);
        auto O = oracleDimension(c.M, c.T, c.H, S.trace.lowerBound);
        REQUIRE(O.accepted());
        CHECK(O.dimension == S.dimension);
    }
}

TEST_CASE("dimension is invariant under isotropies") {
    const int K = 90;
    std::vector<IsotropyElement> gs(3);
    gs[0].source.u = qi(1);
    gs[1].source.u = Scalar(q(3, 5).re, q(4, 5).re);
    gs[1].target.lambda = q(2);
    gs[1].target.r = q(-1, 2);
    gs[2].source.u = q(-1);
    gs[2].target.U = {{{q(0), qi(1)}, {q(1), q(0)}}};
    gs[2].target.c = {qi(1), q(2, 3)};
    for (auto &g : gs) {
        MapGerm G = applyIsotropy(g, h0(), K);
        CHECK(mappingResidual(G, m0(), hyperquadric(1), 20).isZero());
        CHECK(transversalityCheck(G));
        CHECK(nondegeneracyCheck(G, m0(), hyperquadric(1), 12).k0 == 2);
        CHECK(computeDeformationSpace(m0(), hyperquadric(1), G).dimension == 10);
    }
}

TEST_CASE("jets determine solutions") {
    // the same jet reconstructed from two independent builds gives the same field
    auto S = computeDeformationSpace(m63(), m2p(), h0(), {ex63Field()});
    RealLinearSystem a, b;
    auto A = buildPsiAndConditions(m63(), m2p(), h0(), 15, a);
    auto B = buildPsiAndConditions(m63(), m2p(), h0(), 18, b);
    auto fa = fieldFromJet(A.K, S.jetBasis[0]), fb = fieldFromJet(B.K, S.jetBasis[0]);
    for (int l = 0; l < 3; ++l) CHECK((fa.alpha[l] - fb.alpha[l]).truncated(15).isZero());
}

TEST_CASE("genericity certificate") {
    auto R = genericityCertificate(Z() * Z(), 1);
    CHECK(R.mu0.size() == 10);
    CHECK(R.rank == 74);
    CHECK(R.fullRank);
    CHECK_THROWS_AS(genericityCertificate(Z() * Z() * Z(), 1), DegenerateMap);
    auto P = genericityCertificate(Z() * Z() + Z() * Z() * Z() * q(1, 2) - Z() * Z() * Z() * Z(), 1);
    CHECK(P.fullRank);
    // the model kernel is still 22-dimensional at order 8
    auto low = genericityCertificate(Z() * Z(), 1, 8);
    CHECK(low.complementRank == 62);
    CHECK_FALSE(low.fullRank);
}

TEST_CASE("normal coordinates of a non-rigid genericity source") {
    auto [M, H] = genericitySetting(Z() * Z() + Z() * W(), 1, 14);
    CHECK(realityResidual(M, 12).isZero());
    CHECK(mappingResidual(H, M, hyperquadric(1), 12).isZero());
}

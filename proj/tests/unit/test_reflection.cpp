#include "doctest.h"
#include "problems.hpp"

#include "crrigid/reflection.hpp"

using namespace crr;
using namespace crrtest;

namespace {

DeformationField ex63Field() {
    return {{Z() * qi(1), Z() * Z() * qi(1, 3), Series(vs::zw(), kExact)}, "ex63"};
}

// (d/dchi)^j1 (d/dtau)^j2 alphabar_h evaluated at (chi, Qbar(chi, z, w)), over (z, w, chi)
Series barredDerivative(const DeformationField &f, const SourceHypersurface &M, const DKey &k, int order) {
    const Vars &v = vs::zwc();
    Series ab = conjugateSeries(f.alpha[k.h], vs::zct(), {1, 2});
    if (k.j1) ab = partialDerivative(ab, 1, k.j1);
    if (k.j2) ab = partialDerivative(ab, 2, k.j2);
    Series z = Series::variable(v, 0, order), c = Series::variable(v, 2, order);
    return substitute(ab, {z, c, M.Qbar.truncated(order)}, order);
}

} // namespace

TEST_CASE("determinant of the reflection system") {
    auto k = segreIterate(m0(), hyperquadric(1), h0(), 8);
    CHECK(k.s0 == qi(-1));
    auto degenerate = germ(Z(), Series(vs::zw(), kExact), W());
    CHECK_THROWS_AS(segreIterate(sphere2(), hyperquadric(1), degenerate, 8), DegenerateMap);
}

TEST_CASE("a known solution satisfies its reflection identity") {
    const int K = 9;
    auto M = m63();
    auto T = m2p();
    auto f = ex63Field();
    CHECK(buildDeformationResidual(M, T, h0(), f, 12).isZero());
    auto id = reflectionIdentity(reflectionPrimitives(M, T, h0(), vs::zwc(), K + 2));
    for (int l = 0; l < 3; ++l) {
        Series rhs(vs::zwc(), K);
        for (auto &[k, c] : id.F[l]) rhs += (c * barredDerivative(f, M, k, K + 2)).truncated(K);
        Series lhs = remap(f.alpha[l], vs::zwc()).truncated(K);
        CHECK((rhs.truncated(K - 2) - lhs.truncated(K - 2)).isZero());
    }
}

TEST_CASE("zero barred data forces zero") {
    auto id = reflectionIdentity(reflectionPrimitives(m0(), hyperquadric(1), h0(), vs::zwc(), 8));
    // every term of the identity carries a barred derivative, so alphabar = 0 gives alpha = 0
    for (int l = 0; l < 3; ++l) CHECK_FALSE(id.F[l].empty());
}

TEST_CASE("Segre kernels reproduce a known solution along the Segre set") {
    const int N = 10;
    auto M = m63();
    auto f = ex63Field();
    auto k = segreIterate(M, m2p(), h0(), N);
    MapGerm asMap{f.alpha};
    JetVector J = jetOf(asMap);
    const Vars &zc = vs::zc();
    Series Q0 = remap(setZero(M.Q, 2), zc);
    for (int l = 0; l < 3; ++l) {
        Series lhs = substitute(f.alpha[l], {Series::variable(zc, 0, N), Q0}, N);
        Series rhs(zc, N);
        for (int i = 0; i < kJetSize; ++i) rhs += k.phi[l][i] * J.v[i];
        CHECK((lhs - rhs.truncated(N)).isZero());
    }
    // linear in the jet: zero jet gives zero
    JetVector zero;
    auto g = fieldFromJet(k.phi, zero);
    for (auto &a : g.alpha) CHECK(a.isZero());
}

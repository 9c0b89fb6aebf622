#include "doctest.h"
#include "poly.hpp"

#include "crrigid/geometry.hpp"

using namespace crr;
using crrtest::poly;
using crrtest::q;
using crrtest::qi;

namespace {
const Vars &real4() {
    static const Vars v = makeVars({"z", "zb", "w", "wb"}, {1, 1, 2, 2});
    return v;
}
// Im w - |z|^2 - c |z|^4 over (z, zb, w, wb)
Series model(long c) {
    Scalar h = Scalar(Real(), Real(2)).inv();
    return poly(real4(), {{h, {0, 0, 1, 0}}, {-h, {0, 0, 0, 1}}, {q(-1), {1, 1, 0, 0}}, {q(-c), {2, 2, 0, 0}}});
}
} // namespace

TEST_CASE("complexification") {
    Series c = complexifyDefining(model(0));
    CHECK(c.str() == "-z*chi - i*w/2 + i*tau/2");
    Series bad = poly(real4(), {{qi(1), {1, 1, 0, 0}}});
    CHECK_THROWS_AS(complexifyDefining(bad), NotReal);
}

TEST_CASE("normal coordinates of rigid models") {
    auto M = toNormalCoordinates(complexifyDefining(model(0)), 8);
    CHECK(M.Q.str() == "2*i*z*chi + tau");
    CHECK(M.g.isZero());
    auto M0 = toNormalCoordinates(complexifyDefining(model(1)), 8);
    CHECK(M0.Q.str() == "2*i*z*chi + tau + 2*i*z^2*chi^2");
    CHECK(M0.strictlyPseudoconvex());
    CHECK(M0.leviCoefficient() == qi(2));
    // already-normal input stays put
    auto again = sourceFromQ(M0.Q);
    CHECK(again.Q == M0.Q);
}

TEST_CASE("normal coordinates remove pluriharmonic terms") {
    // Im w = |z|^2 + Re(z^3) + Re(z w) + |z|^2 Re(w)
    Scalar h = Scalar(Real(), Real(2)).inv();
    Scalar half = q(1, 2);
    Series real = poly(real4(), {{h, {0, 0, 1, 0}},
                                 {-h, {0, 0, 0, 1}},
                                 {q(-1), {1, 1, 0, 0}},
                                 {-half, {3, 0, 0, 0}},
                                 {-half, {0, 3, 0, 0}},
                                 {-half, {1, 0, 1, 0}},
                                 {-half, {0, 1, 0, 1}},
                                 {-half, {1, 1, 1, 0}},
                                 {-half, {1, 1, 0, 1}}});
    const int K = 9;
    Series rho = complexifyDefining(real);
    auto M = toNormalCoordinates(rho, K);
    CHECK_FALSE(M.g.isZero());
    CHECK(realityResidual(M, K).isZero());
    for (auto &[m, c] : M.Q.terms())
        if (m[0] == 0 || m[1] == 0) CHECK((m == Mono{0, 0, 1}));
    // rho(z, w + i g, chi, tau - i gbar) vanishes on w = Q
    const Vars &v = vs::zct();
    Series z = Series::variable(v, 0, K), c = Series::variable(v, 1, K), t = Series::variable(v, 2, K);
    Series gz = substitute(M.g, {z, M.Q}, K);
    Series gb = substitute(M.g.conj(), {c, t}, K);
    Scalar I = Scalar::I();
    CHECK(substitute(rho, {z, c, M.Q + I * gz, t - I * gb}, K).isZero());
    // idempotent on the normal form it produced
    CHECK(sourceFromQ(M.Q).Q == M.Q);
}

TEST_CASE("non-normalized tangent plane is rejected") {
    Scalar h = Scalar(Real(), Real(2)).inv();
    Series tilted = poly(real4(), {{h, {0, 0, 1, 0}}, {-h, {0, 0, 0, 1}}, {q(1), {1, 0, 0, 0}}, {q(1), {0, 1, 0, 0}}});
    CHECK_THROWS_AS(toNormalCoordinates(complexifyDefining(tilted), 4),
                    NotHypersurface);
}

TEST_CASE("vector fields annihilate the defining equation") {
    auto M = toNormalCoordinates(complexifyDefining(model(1)), 10);
    auto f = crVectorFields(M);
    CHECK(f.QbarChi.truncated(2).str() == "-2*i*z");
    CHECK(f.QbarW.constantTerm().isOne());
    // L(tau) along the complexification is Qbar_chi, and L(w - Q(z,chi,Qbar)) = 0
    const Vars &v = vs::zwc();
    const int K = 10;
    Series z = Series::variable(v, 0, K), c = Series::variable(v, 2, K);
    Series comp = substitute(M.Q, {z, c, M.Qbar}, K); // == w
    CHECK(partialDerivative(comp, 2).isZero());
}

TEST_CASE("Segre maps") {
    auto M = toNormalCoordinates(complexifyDefining(model(0)), 6);
    auto s2 = segreMap(M, 2, 6);
    CHECK(s2[0].str() == "x1");
    CHECK(s2[1].str() == "2*i*x1*x2");
    auto M0 = toNormalCoordinates(complexifyDefining(model(1)), 6);
    CHECK(segreMap(M0, 2, 6)[1].str() == "2*i*x1*x2 + 2*i*x1^2*x2^2");
    CHECK(segreMap(M0, 1, 6)[1].isZero());
    CHECK_THROWS_AS(segreMap(M0, 3, 6), UnsupportedSegreOrder);
    // S^2(x1,x2) with conj S^1(x2) = (x2, 0) lies on the complexification
    const Vars &x = s2[0].vars();
    Series x2 = Series::variable(x, 1, 6);
    auto t2 = segreMap(M0, 2, 6);
    CHECK((t2[1] - substitute(M0.Q, {t2[0], x2, Series(x, 6)}, 6)).isZero());
}

TEST_CASE("targets and Levi signatures") {
    auto Hp = hyperquadric(1), Hm = hyperquadric(-1);
    CHECK(leviSignature(Hp).str() == "(2,0)");
    CHECK(leviSignature(Hm).str() == "(1,1)");
    CHECK(Hp.r[0].str() == "-zeta1");
    CHECK(Hm.r[1].str() == "zeta2");
    CHECK(Hp.r[2].str() == "-i/2");
    auto H2 = hyperquadric(1, 1);
    CHECK(leviSignature(H2).str() == "(1,0)");
    // the M3' target of the nonspherical family: quadratic part |z1|^2 + |z2|^2
    Vars v = vs::target(2);
    Scalar h = Scalar(Real(), Real(2)).inv();
    Series rho = poly(v, {{h, {0, 0, 1, 0, 0, 0}},
                          {-h, {0, 0, 0, 0, 0, 1}},
                          {q(-1), {1, 0, 0, 1, 0, 0}},
                          {q(-1), {0, 1, 0, 0, 1, 0}},
                          {q(-1), {2, 0, 0, 2, 0, 0}},
                          {q(-1), {1, 1, 0, 1, 1, 0}},
                          {-h, {0, 2, 0, 1, 0, 0}},
                          {h, {1, 0, 0, 0, 2, 0}},
                          {-h, {0, 1, 0, 1, 1, 0}},
                          {h, {1, 1, 0, 0, 1, 0}}});
    auto T = targetFromDefining(rho, 2, "M3'");
    CHECK(T.kind == TargetHypersurface::Kind::General);
    CHECK(leviSignature(T).str() == "(2,0)");
    auto Tq = targetFromDefining(hyperquadric(-1).rho, 2);
    CHECK(Tq.kind == TargetHypersurface::Kind::Hyperquadric);
    CHECK(Tq.epsilon == -1);
    // graph of the hyperquadric: w = omega + 2i (z1 zeta1 + z2 zeta2)
    CHECK(targetGraph(Hp, 6).str() == "2*i*z1*zeta1 + 2*i*z2*zeta2 + omega");
}

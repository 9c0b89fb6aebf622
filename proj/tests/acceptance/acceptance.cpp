// One line per acceptance criterion; exit status 1 if any fails.
#include "crrigid/cli.hpp"
#include "crrigid/pipeline.hpp"
#include "crrigid/solver.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace crr;

namespace {

const BuildSettings kBuild{120, 30, 46};

Problem load(const std::string &id, const std::map<std::string, std::string> &set = {}) {
    return buildProblem(parseProblemFile(resolveInput(id)), kBuild, set);
}

Scalar q(long a, long b = 1) { return Scalar::rational(mpq_class(a, b)); }
Scalar qi(long a, long b = 1) { return Scalar(Real(), Real(mpq_class(a, b))); }

long factorial(int n) {
    long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

Echelon span(const std::vector<SparseRow> &rows) {
    Echelon e(kJetReal);
    for (auto &r : rows) e.add(r);
    return e;
}

bool sameSpan(const Echelon &a, const Echelon &b) {
    if (a.rank() != b.rank()) return false;
    for (auto &r : a.rows())
        if (!b.contains(r)) return false;
    return true;
}

bool jetInSpan(const std::vector<JetVector> &basis, const std::array<Series, 3> &alpha) {
    Echelon e(kJetReal);
    for (auto &b : basis) e.add(b.realCoords());
    return e.contains(makeRow(jetOf(MapGerm{alpha}).realCoords()));
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------- 1

Outcome model() {
    auto t0 = std::chrono::steady_clock::now();
    auto P = load("example-6-1");
    auto S = computeDeformationSpace(P.source, P.target, P.map);
    auto O = oracleDimension(P.source, P.target, P.map, S.trace.lowerBound);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream d;
    d << "pipeline " << S.dimension << " (" << S.trace.status << " at " << S.trace.order << "), oracle " << O.dimension
      << " (" << O.status << " at " << O.order << "), verdict " << (S.verdict ? verdictName(*S.verdict) : "none")
      << ", " << static_cast<int>(sec) << "s";
    bool ok = S.dimension == 10 && O.accepted() && O.dimension == 10 && S.verdict && *S.verdict == Verdict::RigidThm47;
    return {ok, d.str()};
}

// ---------------------------------------------------------------- 2

struct LTerm {
    Scalar c;
    int h, m, n;
};

// Printed S1 rows use derivatives d^(m+n) alpha_h / dz^m dw^n (0) with two rescaled
// coordinates: the row Psi_1^{-1,4} = 3 L2^{0,2} + 2i L2^{0,3} against the computed
// -15/4 D + -5i/4 D' fixes L2^{0,2} = 2 D, and Psi_3^{-1,5..7} fix L1^{0,2} = D/2.
Scalar paperScale(int h, int m, int n) {
    if (m == 0 && n == 2 && h == 2) return q(2);
    if (m == 0 && n == 2 && h == 1) return q(1, 2);
    return q(1);
}

void addPaperRow(Echelon &E, const std::vector<LTerm> &terms) {
    std::map<int, Scalar> f, g;
    for (auto &t : terms)
        f[jetIndex(t.h - 1, jetMonoIndex(t.m, t.n))] += t.c * paperScale(t.h, t.m, t.n) * Scalar(factorial(t.m) * factorial(t.n));
    RealLinearSystem s;
    s.addComplex(f, g, RowGroup::Obstruction, 0);
    for (auto &r : s.rows) E.add(r);
}

Echelon paperS1(const Scalar &psi3Lead) {
    Echelon P(kJetReal);
    addPaperRow(P, {{q(3), 2, 0, 2}, {qi(2), 2, 0, 3}});
    addPaperRow(P, {{psi3Lead, 1, 0, 2}, {q(-2), 1, 0, 3}, {q(3), 2, 1, 1}, {qi(3), 2, 1, 2}});
    addPaperRow(P, {{q(12), 2, 0, 2}, {qi(7), 2, 0, 3}, {q(-1), 2, 0, 4}});
    addPaperRow(P, {{q(18), 1, 0, 2}, {qi(4), 1, 0, 3}, {q(-1), 1, 0, 4}, {qi(-6), 2, 1, 1}, {q(3), 2, 1, 2}, {qi(1), 2, 1, 3}});
    addPaperRow(P, {{q(75), 2, 0, 2}, {qi(24), 2, 0, 3}, {q(-2), 2, 0, 4}});
    addPaperRow(P, {{q(54), 1, 0, 2}, {qi(6), 1, 0, 3}, {q(-1), 1, 0, 4}, {qi(-21), 2, 1, 1}, {q(4), 2, 1, 2}, {qi(1), 2, 1, 3}});
    addPaperRow(P, {{q(42), 1, 0, 2}, {qi(1), 1, 0, 3}, {qi(-18), 2, 1, 1}});
    return P;
}

Outcome structure() {
    auto P = load("example-6-1");
    const int N = 16;
    std::ostringstream d;

    auto A = segreCoefficients(P.source, N);
    bool a1 = A.size() > 1 && (A[1] - Series::variable(A[1].vars(), 0, N) * qi(2)).isZero();
    d << "A1 = 2iz " << (a1 ? "yes" : "no");

    // A1 psi(z, w/B) = -(1 - sqrt(1 - 2iw)) / (2z)
    auto art = laurentInverse(P.source, N);
    static const Vars vw = makeVars({"w"});
    Series w = Series::variable(vw, 0, N), one = Series::constant(vw, q(1), N);
    Series expect = (sqrtUnit(one - w * qi(2)) - one) * q(1, 2);
    bool chi = true;
    for (auto &t : art.chi.terms()) chi = chi && t.first[0] == -1;
    for (int k = 1; 2 * k - 1 <= N; ++k)
        chi = chi && art.chi.coeff(Mono{-1, static_cast<std::int16_t>(k)}) == expect.coeff(Mono{static_cast<std::int16_t>(k)});
    d << ", chi expansion " << (chi ? "yes" : "no");

    RealLinearSystem sys;
    buildPsiAndConditions(P.source, P.target, P.map, N, sys);
    Echelon mine = span(sys.select(N, 1u));
    Echelon printed = paperS1(q(12));
    bool kernelEq = sameSpan(mine, printed);
    int rowsIn = 0;
    for (auto &r : printed.rows()) rowsIn += mine.contains(r);
    d << ", S1 kernel equal " << (kernelEq ? "yes" : "no") << " (real rank " << mine.rank() << "/" << printed.rank() << ", "
      << rowsIn << " of " << printed.rank() << " printed real rows in span";
    if (!kernelEq) d << "; with 12i for the L1^{0,2} coefficient of Psi_3^{-1,4}: " << (sameSpan(mine, paperS1(qi(12))) ? "equal" : "not equal");
    d << ")";
    return {a1 && chi && kernelEq, d.str()};
}

// ---------------------------------------------------------------- 3, 4, 5

Outcome rigid62() {
    auto P = load("example-6-2");
    auto S = computeDeformationSpace(P.source, P.target, P.map);
    std::ostringstream d;
    d << "dim " << S.dimension << " (" << S.trace.status << "), verdict " << (S.verdict ? verdictName(*S.verdict) : "none");
    return {S.dimension == 0 && S.verdict && *S.verdict == Verdict::RigidThm46, d.str()};
}

Outcome oneDim63() {
    auto P = load("example-6-3");
    // the known field is supplied separately from the corpus file
    const Series z = Series::variable(vs::zw(), 0, kExact);
    std::array<Series, 3> Y{z * qi(1), z * z * qi(1, 3), Series(vs::zw(), kExact)};
    auto S = computeDeformationSpace(P.source, P.target, P.map, {{Y, "Y"}});
    bool spans = S.jetBasis.size() == 1 && jetInSpan(S.jetBasis, Y) && !(jetOf(MapGerm{Y}) == JetVector{});
    bool residual = buildDeformationResidual(P.source, P.target, P.map, {Y, "Y"}, 24).isZero();
    std::ostringstream d;
    d << "dim " << S.dimension << " (" << S.trace.status << "), spanned by jet of (iz, iz^2/3, 0) " << (spans ? "yes" : "no")
      << ", residual zero to order 24 " << (residual ? "yes" : "no");
    return {S.dimension == 1 && spans && residual, d.str()};
}

Outcome family64() {
    std::ostringstream d;
    bool ok = true;
    for (const char *t : {"1", "1/2"}) {
        auto P = load("example-6-4", {{"t", t}});
        auto S = computeDeformationSpace(P.source, P.target, P.map);
        d << "t=" << t << ": dim " << S.dimension << " (" << S.trace.status << "); ";
        ok = ok && S.dimension == 10;
    }
    bool degenerate = false;
    try {
        auto P = load("example-6-4", {{"t", "0"}});
        computeDeformationSpace(P.source, P.target, P.map);
    } catch (const DegenerateMap &) {
        degenerate = true;
    }
    d << "t=0: " << (degenerate ? "DegenerateMap" : "no error");
    return {ok && degenerate, d.str()};
}

// ---------------------------------------------------------------- 6

Outcome sphere() {
    auto P = load("sphere-8");
    auto S = computeDeformationSpace(P.source, P.target, P.map, P.fields);
    bool residuals = true, inSpan = true;
    for (auto &f : P.fields) {
        residuals = residuals && buildDeformationResidual(P.source, P.target, P.map, f, 14).isZero();
        inSpan = inSpan && S.trace.accepted() && jetInSpan(S.jetBasis, f.alpha);
    }
    // complement of the 10-dimensional target-trivial span
    int complement = S.dimension - S.trivialDim;
    bool inconclusive = S.verdict && *S.verdict == Verdict::Inconclusive;
    std::ostringstream d;
    d << "dim " << S.dimension << " (expected 18; " << S.trace.status << "), trivial " << S.trivialDim
      << ", complement " << complement << " (expected 8), with source automorphisms " << S.sourceTrivialDim
      << ", X1..X8 residuals zero " << (residuals ? "yes" : "no") << ", in span " << (inSpan ? "yes" : "no")
      << ", X jet rank " << jetRank(P.fields) << ", verdict " << (S.verdict ? verdictName(*S.verdict) : "none");
    return {S.dimension == 18 && S.trivialDim == 10 && complement == 8 && residuals && inSpan && inconclusive, d.str()};
}

// ---------------------------------------------------------------- 7

Outcome automorphisms() {
    std::ostringstream d;
    bool ok = true;
    for (int eps : {1, -1}) {
        auto T = hyperquadric(eps);
        auto closed = infinitesimalAutomorphisms(T), direct = infinitesimalAutomorphisms(T, true);
        bool agree = closed.closedForm && closed.dimension == 10 && direct.dimension == 10;
        for (auto &V : closed.known) agree = agree && automorphismResidual(T, V, 12).isZero();
        d << "H3" << (eps > 0 ? "+" : "-") << " " << closed.dimension << "/" << direct.dimension << ", ";
        ok = ok && agree;
    }
    const char *names[] = {"M1'", "M2'", "M3'"};
    const char *ids[] = {"example-6-2", "example-6-3", "example-6-4"};
    for (int k = 0; k < 3; ++k) {
        int dim = infinitesimalAutomorphisms(load(ids[k]).target).dimension;
        d << names[k] << " " << dim << ", ";
        ok = ok && dim == 0;
    }
    int m3 = infinitesimalAutomorphisms(sourceAsTarget(load("example-6-4").source)).dimension;
    d << "M3 " << m3;
    return {ok && m3 == 1, d.str()};
}

// ---------------------------------------------------------------- 8

// dimension at order n + 1 of the given method
int nextOrderDim(bool oracle, const Problem &P, const DimensionTrace &trace, int lower) {
    const int n = trace.order;
    SolveOptions o{n + 1, n + 1, 4};
    if (oracle) return oracleDimension(P.source, P.target, P.map, lower, o).dims.at(0).second;
    for (auto &[m, d] : trace.dims)
        if (m == n + 1) return d;
    RealLinearSystem sys;
    buildPsiAndConditions(P.source, P.target, P.map, n + 1, sys);
    return kJetReal - span(sys.select(n + 1)).rank();
}

Outcome oracleSuite() {
    std::ostringstream d;
    bool ok = true;
    for (auto &id : corpusIds()) {
        auto spec = parseProblemFile(resolveInput(id));
        bool expectsError = false;
        for (auto &e : spec.expect) expectsError = expectsError || e.first == "error";
        if ((spec.command != "deform" && spec.command != "rigidity") || expectsError) continue;
        auto P = buildProblem(spec, kBuild);
        auto S = computeDeformationSpace(P.source, P.target, P.map, P.fields);
        auto O = oracleDimension(P.source, P.target, P.map, S.trace.lowerBound);
        bool agree = S.trace.accepted() && O.accepted() && S.dimension == O.dimension;
        bool stable = agree && nextOrderDim(false, P, S.trace, S.trace.lowerBound) == S.dimension &&
                      nextOrderDim(true, P, O, S.trace.lowerBound) == O.dimension;
        d << id << " " << S.dimension << "/" << O.dimension << (stable ? "" : " (unstable)") << "; ";
        ok = ok && agree && stable;
    }
    return {ok, d.str()};
}

// ---------------------------------------------------------------- 9

Outcome invariance() {
    auto P = load("example-6-1");
    std::vector<IsotropyElement> gs(3);
    gs[0].source.u = qi(1);
    gs[1].source.u = Scalar(Real(mpq_class(3, 5)), Real(mpq_class(4, 5)));
    gs[1].target.lambda = q(2);
    gs[1].target.r = q(-1, 2);
    gs[2].source.u = q(-1);
    gs[2].target.U = {{{q(0), qi(1)}, {q(1), q(0)}}};
    gs[2].target.c = {qi(1), q(2, 3)};
    bool t0 = transversalityCheck(P.map);
    int k0 = nondegeneracyCheck(P.map, P.source, P.target, 12).k0;
    std::ostringstream d;
    bool ok = true;
    for (std::size_t k = 0; k < gs.size(); ++k) {
        MapGerm G = applyIsotropy(gs[k], P.map, 90);
        bool mapped = mappingResidual(G, P.source, P.target, 20).isZero();
        bool t = transversalityCheck(G);
        int kg = nondegeneracyCheck(G, P.source, P.target, 12).k0;
        int dim = computeDeformationSpace(P.source, P.target, G).dimension;
        d << "g" << k << ": dim " << dim << ", transversal " << t << ", k0 " << kg << "; ";
        ok = ok && mapped && t == t0 && kg == k0 && dim == 10;
    }
    return {ok, d.str()};
}

// ---------------------------------------------------------------- 10

Outcome genericity() {
    const Series z = Series::variable(vs::zw(), 0, kExact), w = Series::variable(vs::zw(), 1, kExact);
    auto G = genericityCertificate(z * z, 1);
    std::ostringstream d;
    d << "F=z^2: rank " << G.complementRank << "/" << kJetReal - static_cast<int>(G.mu0.size()) << " full "
      << (G.fullRank ? "yes" : "no");
    // higher-order perturbations (weighted degree 3 and 4); failures are logged only
    std::mt19937 rng(20240611);
    const std::vector<Series> monos{z * z * z, z * w, z * z * z * z, z * z * w, w * w};
    const Scalar coeffs[] = {q(0), q(1), q(-1), q(1, 2), q(-1, 2)};
    std::uniform_int_distribution<int> pick(0, 4);
    for (int k = 0; k < 3; ++k) {
        Series F = z * z;
        for (auto &m : monos) F = F + m * coeffs[pick(rng)];
        try {
            auto R = genericityCertificate(F, 1);
            d << "; F=" << F.str() << ": full " << (R.fullRank ? "yes" : "NO (logged)");
        } catch (const Error &e) {
            d << "; F=" << F.str() << ": " << e.kind() << " (logged)";
        }
    }
    return {G.fullRank && G.complementRank == kJetReal - static_cast<int>(G.mu0.size()), d.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Example 6.1 dimension 10 by pipeline and oracle, Rigid-Thm4.7", model},
        {"Example 6.1 structure: A1, Segre inverse, S1 kernel", structure},
        {"Example 6.2 dimension 0, Rigid-Thm4.6", rigid62},
        {"Example 6.3 dimension 1 spanned by (iz, iz^2/3, 0)", oneDim63},
        {"Example 6.4 dimension 10 for t = 1, 1/2; DegenerateMap at t = 0", family64},
        {"sphere map: dimension 18, 8-dimensional complement, X1..X8 verified", sphere},
        {"automorphisms: H3+- 10, M1' M2' M3' 0, M3 1", automorphisms},
        {"oracle equals pipeline on the corpus, stable over two orders", oracleSuite},
        {"isotropy invariance of dimension, transversality and k0", invariance},
        {"genericity certificate for F = z^2 (perturbations logged)", genericity},
    };
    int passed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        passed += o.pass;
        std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << criteria[k].first << " | "
                  << o.detail << std::endl;
    }
    std::cout << "acceptance: " << passed << "/" << criteria.size() << " passed" << std::endl;
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}

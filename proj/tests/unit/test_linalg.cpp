#include "doctest.h"

#include "crrigid/linalg.hpp"

#include <random>

using namespace crr;

namespace {
Real randReal(std::mt19937 &g, double density) {
    std::uniform_real_distribution<double> u(0, 1);
    if (u(g) > density) return Real();
    std::uniform_int_distribution<int> n(-3, 3), pick(0, 4);
    return Real(mpq_class(n(g), 1 + pick(g) % 2), pick(g) == 0 ? mpq_class(n(g)) : mpq_class(0));
}

Real dot(const SparseRow &r, const std::vector<Real> &v) {
    Real s;
    for (auto &[c, x] : r) addMul(s, x, v[c]);
    return s;
}
} // namespace

TEST_CASE("echelon basics") {
    Echelon e(3);
    CHECK(e.add(std::vector<Real>{1, 2, 3}));
    CHECK(e.add(std::vector<Real>{2, 4, 7}));
    CHECK_FALSE(e.add(std::vector<Real>{3, 6, 10}));
    CHECK(e.rank() == 2);
    CHECK(e.freeColumns() == std::vector<int>{1});
    auto k = e.kernel();
    REQUIRE(k.size() == 1);
    CHECK(k[0][0] == Real(-2));
    CHECK(k[0][1] == Real(1));
    CHECK(k[0][2] == Real(0));
}

TEST_CASE("property: kernel vectors annihilate every row, rank-nullity") {
    std::mt19937 g(9);
    for (int it = 0; it < 30; ++it) {
        int n = 6 + it % 7, m = 3 + it % 9;
        std::vector<SparseRow> rows;
        Echelon e(n);
        for (int i = 0; i < m; ++i) {
            std::vector<Real> d(n);
            for (auto &x : d) x = randReal(g, 0.4);
            rows.push_back(makeRow(d));
            e.add(rows.back());
        }
        auto ker = e.kernel();
        CHECK(e.rank() + static_cast<int>(ker.size()) == n);
        for (auto &v : ker)
            for (auto &r : rows) CHECK(dot(r, v).isZero());
        for (auto &r : rows) CHECK(e.contains(r));
    }
}

TEST_CASE("property: eliminating high columns projects the kernel") {
    std::mt19937 g(21);
    for (int it = 0; it < 25; ++it) {
        int n = 12, split = 5, m = 6 + it % 8;
        std::vector<SparseRow> rows;
        Echelon full(n);
        for (int i = 0; i < m; ++i) {
            std::vector<Real> d(n);
            for (auto &x : d) x = randReal(g, 0.3);
            rows.push_back(makeRow(d));
            full.add(rows.back());
        }
        auto low = eliminateColumns(rows, split);
        Echelon proj(split);
        for (auto &r : low) {
            for (auto &e : r) CHECK(e.first < split);
            proj.add(r);
        }
        // projection of the full kernel spans the low kernel
        Echelon img(split);
        for (auto &v : full.kernel()) img.add(std::vector<Real>(v.begin(), v.begin() + split));
        CHECK(img.rank() == split - proj.rank());
        for (auto &v : full.kernel()) {
            std::vector<Real> lv(v.begin(), v.begin() + split);
            for (auto &r : low) CHECK(dot(r, lv).isZero());
        }
    }
}

#pragma once

#include "crrigid/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace crr {

// Embedding germ H = (H1, H2, H3) over vs::zw().
struct MapGerm {
    std::array<Series, 3> H;
    const Series &operator[](std::size_t i) const { return H[i]; }
    Series &operator[](std::size_t i) { return H[i]; }
    int order() const;
};

// 4-jets: 14 monomials z^m w^l with 1 <= m+l <= 4 in graded order
// (1,0),(0,1),(2,0),(1,1),(0,2),(3,0),... times 3 components.
constexpr int kJetMonos = 14;
constexpr int kJetSize = 3 * kJetMonos;
constexpr int kJetReal = 2 * kJetSize;

struct JetMono {
    int m, l;
};
const std::array<JetMono, kJetMonos> &jetMonos();
int jetMonoIndex(int m, int l); // -1 if outside the 4-jet
inline int jetIndex(int h, int mono) { return mono * 3 + h; }
// real coordinate of (component h, monomial, part) with part 0 = Re, 1 = Im
inline int jetRealIndex(int h, int mono, int part) { return 2 * jetIndex(h, mono) + part; }
std::string jetName(int index); // e.g. "L2^{0,3}"

struct JetVector {
    std::array<Scalar, kJetSize> v;
    Scalar &at(int h, int m, int l) { return v[jetIndex(h, jetMonoIndex(m, l))]; }
    const Scalar &at(int h, int m, int l) const { return v[jetIndex(h, jetMonoIndex(m, l))]; }
    std::vector<Real> realCoords() const;
    static JetVector fromReal(const std::vector<Real> &x);
    friend bool operator==(const JetVector &a, const JetVector &b) { return a.v == b.v; }
};

JetVector jetOf(const MapGerm &H, int k = 4);
MapGerm mapFromJet(const JetVector &J, int order);

bool transversalityCheck(const MapGerm &H);

struct NormalizedMap {
    MapGerm H;                 // (z, F, w)
    std::array<Series, 2> phi; // source change with Hnorm = H o phi
    bool swapped = false;
};
NormalizedMap normalizeMap(const MapGerm &H, int order);

// Inverse of a germ (z,w) -> (f1, f2) of C^2 with invertible linear part.
std::array<Series, 2> invertGerm(const std::array<Series, 2> &f, int order);
// Components of H evaluated at phi.
MapGerm compose(const MapGerm &H, const std::array<Series, 2> &phi, int order);

// (H(z, Q), Hbar(chi, tau)) over (z, chi, tau): arguments of rho on the complexification.
std::vector<Series> targetArgsZCT(const MapGerm &H, const SourceHypersurface &M, int order);
// (H(z, w), Hbar(chi, Qbar(chi,z,w))) over (z, w, chi).
std::vector<Series> targetArgsZWC(const MapGerm &H, const SourceHypersurface &M, int order);

// rho'(H, Hbar) restricted to the complexified source, over (z, chi, tau).
Series mappingResidual(const MapGerm &H, const SourceHypersurface &M, const TargetHypersurface &T,
                       int order);

struct NondegeneracyCertificate {
    int k0 = -1;               // -1: degenerate up to the bound
    std::vector<int> spanDims; // dim E_k(0), k = 0..bound
    Scalar s0;                 // det(r, Lr, L^2 r) at 0
    bool mapped = true;        // H(M) in M' up to the checked order
};
NondegeneracyCertificate nondegeneracyCheck(const MapGerm &H, const SourceHypersurface &M,
                                            const TargetHypersurface &T, int checkOrder,
                                            bool requireMapped = true, int bound = 4);

// Isotropies of H^2 (source) and H^3_eps (target) in the standard parametrization.
struct SourceIsotropy {
    Scalar lambda = Scalar(1), r, u = Scalar(1), c;
};
struct TargetIsotropy {
    Scalar lambda = Scalar(1), r;
    std::array<std::array<Scalar, 2>, 2> U{{{Scalar(1), Scalar()}, {Scalar(), Scalar(1)}}};
    std::array<Scalar, 2> c{};
    int epsilon = 1;
};
struct IsotropyElement {
    SourceIsotropy source;
    TargetIsotropy target;
};

std::array<Series, 2> sourceIsotropyMap(const SourceIsotropy &g, int order);
std::array<Series, 3> targetIsotropyMap(const TargetIsotropy &g, int order);
MapGerm applyIsotropy(const IsotropyElement &g, const MapGerm &H, int order);
JetVector applyIsotropy(const IsotropyElement &g, const JetVector &J);

} // namespace crr

#pragma once

#include "crrigid/map.hpp"

#include <compare>
#include <map>
#include <string>

namespace crr {

// Vector field alpha_1 d/dz1' + alpha_2 d/dz2' + alpha_3 d/dw' along H, over vs::zw().
struct DeformationField {
    std::array<Series, 3> alpha;
    std::string label;
};

// sum_j r_j(H, Hbar) alpha_j(z, w) + rbar_j(Hbar, H) alphabar_j(chi, tau) on w = Q(z, chi, tau).
Series buildDeformationResidual(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                const DeformationField &field, int order);

// (d/dchi)^j1 (d/dtau)^j2 alphabar_h
struct DKey {
    int h, j1, j2;
    auto operator<=>(const DKey &) const = default;
};
// sum over keys of coefficient * (derivative of alphabar_h at (chi, Qbar(chi, z, w)))
using JetForm = std::map<DKey, Series>;

// The series entering the reflection identity, over a variable set named (z, w, chi):
// a[k][j] = d^k/dchi^k r_j(H, Hbar(chi, Qbar)), b likewise for rbar, Qc = Qbar_chi, Qcc = Qbar_chichi.
struct ReflectionPrimitives {
    std::array<std::array<Series, 3>, 3> a, b;
    Series Qc, Qcc;
};
ReflectionPrimitives reflectionPrimitives(const SourceHypersurface &M, const TargetHypersurface &T,
                                          const MapGerm &H, const Vars &v, int order);
// Applies the same substitution to every primitive (e.g. w = Q(z, chi, 0)).
ReflectionPrimitives restrictPrimitives(const ReflectionPrimitives &p, const std::vector<Series> &images, int order);

// alpha_l(z, w) = F[l] evaluated on the barred 2-jet; s = det(a, L a, L^2 a).
struct ReflectionIdentity {
    std::array<JetForm, 3> F;
    Series s;
};
ReflectionIdentity reflectionIdentity(const ReflectionPrimitives &p);

// d^{n1}/dz^{n1} d^{n2}/dw^{n2} of a form restricted to chi = 0 (there Qbar = w).
// The form lives over (z, w).
JetForm differentiatedIdentity(const JetForm &axisForm, int n1, int n2);

// phi[l][jetIndex(h, mono)](z, chi): alpha_l(z, Q(z, chi, 0)) = sum phi * Lambda.
using KernelTable = std::array<std::array<Series, kJetSize>, 3>;
struct SegreKernels {
    KernelTable phi; // over vs::zc()
    Scalar s0;
    int order = 0;
};
SegreKernels segreIterate(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H, int order);

// Field with components sum_key K[l][key] * Lambda_key.
DeformationField fieldFromJet(const KernelTable &K, const JetVector &J, const std::string &label = "");

} // namespace crr

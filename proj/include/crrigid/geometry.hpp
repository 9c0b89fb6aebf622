#pragma once

#include "crrigid/series.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace crr {

// Fixed variable sets. z, chi carry weight 1; w, tau weight 2.
namespace vs {
const Vars &zw();    // (z, w)
const Vars &zct();   // (z, chi, tau)
const Vars &zwc();   // (z, w, chi): coordinates on the complexified source via tau = Qbar
const Vars &zcwt();  // (z, chi, w, tau): complexified real defining functions
const Vars &zc();    // (z, chi), weights (1,1): Segre slice
const Vars &zwLaurent(int floor); // (z, w), z Laurent
Vars target(int nz); // (z1.., w, zeta1.., omega)
} // namespace vs

// Checks that conjugating coefficients and swapping holomorphic/antiholomorphic
// slots returns f. `perm` is the swap as an index permutation of f's variables.
bool isHermitian(const Series &f, const std::vector<int> &perm);

// Real defining function in (z, zb, w, wb) -> complexification in (z, chi, w, tau).
Series complexifyDefining(const Series &realDefining);

struct SourceHypersurface {
    Series Q;    // (z, chi, tau)
    Series Qbar; // Qbar(chi, z, w) stored over (z, w, chi)
    std::optional<Series> rawDefining; // (z, chi, w, tau)
    Series g;    // coordinate change (z,w) -> (z, w + i g(z,w)); zero when input is normal
    int order = 0;

    Scalar leviCoefficient() const; // Q_{z chi}(0)
    bool strictlyPseudoconvex() const { return !leviCoefficient().isZero(); }
};

// Builds the conjugate Qbar(chi,z,w) over (z,w,chi) from Q over (z,chi,tau).
Series conjugateQ(const Series &Q);

SourceHypersurface sourceFromQ(const Series &Q);
SourceHypersurface toNormalCoordinates(const Series &complexDefining, int order);

// Residual of Q(z,chi,Qbar(chi,z,w)) - w over (z,w,chi).
Series realityResidual(const SourceHypersurface &M, int order);

// Coefficient series of the tangent fields on the complexification:
// L = d/dchi + Qbar_chi d/dtau, T = d/dw + Qbar_w d/dtau, S = d/dz + Qbar_z d/dtau,
// Lbar = d/dz + Q_z d/dw (the last over (z, chi, tau)).
struct CRVectorFields {
    Series QbarChi, QbarW, QbarZ; // over (z,w,chi)
    Series Qz;                    // over (z,chi,tau)
};
CRVectorFields crVectorFields(const SourceHypersurface &M);

// S^1(x1) = (x1, 0), S^2(x1,x2) = (x1, Q(x1,x2,0)); returned over (x1, x2).
std::array<Series, 2> segreMap(const SourceHypersurface &M, int q, int order);

struct TargetHypersurface {
    enum class Kind { Hyperquadric, General };
    Kind kind = Kind::General;
    int epsilon = 1;
    int nz = 2;     // number of z variables; the total dimension is nz + 1
    Series rho;     // over vs::target(nz)
    std::vector<Series> r;    // rho_{Z'_j}
    std::vector<Series> rbar; // rho_{zeta'_j}
    std::string label;

    int n() const { return nz + 1; }
};

TargetHypersurface hyperquadric(int epsilon, int nz = 2);
TargetHypersurface targetFromDefining(const Series &rho, int nz, const std::string &label = "");

struct LeviSignature {
    int positive = 0, negative = 0;
    bool degenerate = false;
    std::string str() const;
};
LeviSignature leviSignature(const TargetHypersurface &T);

// Solves rho = 0 for w over (z.., zeta.., omega) (weights 1.., 1.., 2).
Series targetGraph(const TargetHypersurface &T, int order);
Vars targetGraphVars(int nz);
// (z1.., w) with weights (1.., 2): domain of vector fields on the target.
Vars targetHoloVars(int nz);

} // namespace crr

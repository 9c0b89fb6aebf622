#pragma once

#include "crrigid/linalg.hpp"
#include "crrigid/reflection.hpp"

#include <map>
#include <utility>
#include <vector>

namespace crr {

enum class RowGroup { Obstruction, JetConsistency, Residual };
const char *rowGroupName(RowGroup g);

// Real-linear equations in the 84 coordinates (Re, Im) of the 4-jet Lambda.
// Each row carries the weighted degree at which it first appears, so the
// system for a lower truncation order is a prefix of the rows by degree.
struct RealLinearSystem {
    std::vector<SparseRow> rows;
    std::vector<RowGroup> groups;
    std::vector<int> degrees;

    // sum_k f_k Lambda_k + g_k conj(Lambda_k) = 0, split into real and imaginary rows
    void addComplex(const std::map<int, Scalar> &f, const std::map<int, Scalar> &g, RowGroup group, int degree);
    // rows with degree <= maxDegree and group in the mask (bit per RowGroup)
    std::vector<SparseRow> select(int maxDegree, unsigned groupMask = 7u) const;
};

struct PipelineArtifacts {
    int order = 0;
    Scalar s0;
    Series A1, B, U;      // over z
    Series psiHat, psi;   // over (z, u) / (z, t)
    Series chi;           // A1 psi(z, w / B), Laurent in z
    KernelTable phi;      // over (z, chi)
    KernelTable Psi;      // phi(z, chi(z, w)), Laurent in z
    KernelTable K;        // holomorphic part, over (z, w)
    // obstruction[l][key] : (m1, m2) -> coefficient of z^(m1 - 2 m2) w^m2
    std::array<std::array<std::map<std::pair<int, int>, Scalar>, kJetSize>, 3> obstruction;
};

// Coefficients A_j(z) of chi^j in Q(z, chi, 0).
std::vector<Series> segreCoefficients(const SourceHypersurface &M, int order);
// chi(z, w) solving w = Q(z, chi, 0), as a Laurent series in z over vs::zwLaurent.
PipelineArtifacts laurentInverse(const SourceHypersurface &M, int order);

PipelineArtifacts buildPsiAndConditions(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                        int order, RealLinearSystem &system);

// Direct truncation: all Taylor coefficients of alpha with 1 <= m + 2l <= order
// are unknowns. Columns: 2 * (3 * monoIndex + l) + part over the monomials of
// oracleMonomials(order); the first 84 are the 4-jet coordinates.
std::vector<std::pair<int, int>> oracleMonomials(int order);
std::vector<SparseRow> oracleSystem(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                    int order);

} // namespace crr

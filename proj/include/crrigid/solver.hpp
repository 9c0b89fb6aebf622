#pragma once

#include "crrigid/pipeline.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crr {

enum class Verdict { RigidThm46, RigidThm47, Inconclusive };
const char *verdictName(Verdict v);

struct SolveOptions {
    int startOrder = 12;
    int maxOrder = 30;
    int window = 4; // equal dimensions needed when no lower bound matches
};

// Truncated kernel dimensions are upper bounds for the true dimension; exactly
// known solutions give a lower bound. The dimension is certified once the two
// meet, otherwise accepted after `window` equal values.
struct DimensionTrace {
    std::vector<std::pair<int, int>> dims; // (order, dimension)
    int lowerBound = 0;
    int order = -1; // order at which the dimension was accepted
    int dimension = -1;
    std::string status = "not-stabilized"; // certified | stabilized | not-stabilized
    bool accepted() const { return order >= 0; }
};
// Looks at the dims recorded so far and fills order/dimension/status.
void decide(DimensionTrace &t, int window);

// Holomorphic vector field vanishing at 0 over targetHoloVars(nz).
struct VectorField {
    std::vector<Series> v;
    std::string label;
};

// Closed-form basis of hol_0 of {Im w = |z1|^2 (+ eps |z2|^2)}; 5 fields for nz = 1, 10 for nz = 2.
std::vector<VectorField> hyperquadricGenerators(int epsilon, int nz);
// Re(sum rho_{Z_j} V_j) on the complexified target, over targetGraphVars(nz).
Series automorphismResidual(const TargetHypersurface &T, const VectorField &V, int order);
// The source {w = Q} as a hypersurface in C^2 with real defining function
// (w - omega - Q(z, zeta, omega) + Qbar(zeta, z, w)) / (4i).
TargetHypersurface sourceAsTarget(const SourceHypersurface &M);

struct AutomorphismSpace {
    int dimension = 0;
    std::vector<VectorField> known; // exact fields with zero residual
    DimensionTrace trace;
    bool closedForm = false;
};
// Hyperquadrics use the closed form unless `direct` is set.
AutomorphismSpace infinitesimalAutomorphisms(const TargetHypersurface &T, bool direct = false,
                                             const SolveOptions &opt = {4, 16, 4});
// Kernel dimension of the truncated automorphism equation, projected to 2-jets.
int automorphismKernelDim(const TargetHypersurface &T, int order);

// Restrictions V(H(z, w)) of the verified target automorphisms.
std::vector<DeformationField> trivialSubspace(const TargetHypersurface &T, const MapGerm &H, int order);
// dH(X) for the verified source automorphisms X.
std::vector<DeformationField> sourceTrivialFields(const SourceHypersurface &M, const MapGerm &H, int order);

// Real rank of the 4-jets of the fields.
int jetRank(const std::vector<DeformationField> &fields);

struct DeformationSpace {
    int dimension = -1;
    std::vector<JetVector> jetBasis;
    std::vector<DeformationField> fieldBasis;
    int trivialDim = 0;      // target automorphisms restricted along H
    int sourceTrivialDim = 0; // target and source automorphisms together
    int targetAutDim = 0;
    std::optional<Verdict> verdict;
    DimensionTrace trace;
    std::vector<DeformationField> known;  // residual-verified exact solutions
    std::vector<std::string> rejected;     // supplied fields with nonzero residual
    bool trivialContained = true;
    bool basisVerified = true;
    RealLinearSystem system;               // assembled at the last build order
    int buildOrder = 0;
};

DeformationSpace computeDeformationSpace(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                                         const std::vector<DeformationField> &extra = {},
                                         const SolveOptions &opt = {});

// Direct-truncation dimension with the same acceptance rule.
DimensionTrace oracleDimension(const SourceHypersurface &M, const TargetHypersurface &T, const MapGerm &H,
                               int lowerBound, const SolveOptions &opt = {});

Verdict rigidityVerdict(int dimension, int targetAutDim, bool leviNondegenerate);

// Exact kernel of real rows in the 84 jet coordinates.
std::vector<JetVector> kernelBasis(const std::vector<SparseRow> &rows);

struct GenericityReport {
    int epsilon = 1;
    int order = 0;
    int rank = 0;           // rank in all 84 coordinates
    int complementRank = 0; // rank on the 74 coordinates outside mu0
    std::vector<int> mu0;   // free coordinates of the model F = z^2
    bool fullRank = false;
};
// M = {Im w = |z|^2 + eps |F|^2}, H = (z, F, w) into the hyperquadric of sign eps.
GenericityReport genericityCertificate(const Series &F, int epsilon, int order = 16);
// Source and map of the genericity setting, brought to normal coordinates.
std::pair<SourceHypersurface, MapGerm> genericitySetting(const Series &F, int epsilon, int order);

// H o (z, w + i g(z, w)): the map written in the normal coordinates of M.
MapGerm mapInNormalCoordinates(const MapGerm &H, const SourceHypersurface &M, int order);

} // namespace crr

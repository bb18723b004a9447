#pragma once

#include <stdexcept>

#include "qbary/extremality.hpp"

namespace qbary {

struct FaceStep {
  Perturbation direction;  // the admissible direction that was walked
  double t_plus = 0.0;     // largest step along +direction keeping CP
  double t_minus = 0.0;    // largest step along -direction keeping CP
};

// Step lengths to the completely-positive boundary along an admissible
// direction.  In the Kraus coordinates of each branch (the minimal operators
// carried by `space`, whose vectorizations are orthogonal with squared norms
// equal to the Choi eigenvalues), a branch stays CP for 1 + t D_i >= 0, so
// the step lengths come from the extreme eigenvalues of the blocks.  Both are
// finite and positive for a nonzero admissible direction at an interior
// point; at each endpoint at least one branch loses Choi rank (verified at a
// 10x relaxed tolerance).
FaceStep boundary_step(const Instrument& i, const PerturbationBasis& space,
                       const Perturbation& direction,
                       const Tolerance& tol = {});

// The instrument moved t along the direction, branch Chois J_i + t * Delta_i.
Instrument perturb_instrument(const Instrument& i,
                              const PerturbationBasis& space,
                              const Perturbation& direction, double t);

struct DecompositionComponent {
  double weight = 0.0;
  Device device;
};

struct DiscreteDecomposition {
  std::vector<DecompositionComponent> components;
  int iterations = 0;      // face-walk nodes visited
  int max_face_depth = 0;
};

// Raised when the face walk would emit more components than allowed.
struct DecomposeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Barycentric decomposition into extreme devices of the same kind by a
// recursive face walk: split along a witness direction, recurse on both
// boundary devices, merge equal leaves (Choi distance <= 1e-8).  Total Choi
// rank strictly decreases along every recursion edge, so the walk terminates.
// Components all validate, are extreme, and mix back to the input within
// 1e-8 in branchwise max-norm.
// The default budget covers the hardest devices in scope (4-branch qubit
// instruments land around 550 distinct components).
DiscreteDecomposition decompose_extremal(const Device& d,
                                         const Tolerance& tol = {},
                                         int max_components = 1024);

// Weighted mixture of the components (same kind as they are).
Device reconstruct(const DiscreteDecomposition& dec);

double reconstruction_error(const DiscreteDecomposition& dec,
                            const Device& original);

}  // namespace qbary

#pragma once

#include <optional>

#include "qbary/devices.hpp"

namespace qbary {

// One admissible perturbation: a Hermitian r_i x r_i block per branch, where
// r_i is the branch Kraus rank (0 x 0 for zero branches).  The block tuple
// moves the branch Choi matrix along
//   Delta_i = sum_{k,l} (D_i)_{kl} vec(K_{i,k}) vec(K_{i,l})^dag ,
// whose output marginal is (sum_{k,l} (D_i)_{kl} K_{i,l}^dag K_{i,k})^T.
// Admissibility therefore means
//   sum_i sum_{k,l} (D_i)_{kl} K_{i,l}^dag K_{i,k} = 0 ,
// i.e. both signed perturbations of the device stay normalized.  (Note the
// product order; with K_{i,k}^dag K_{i,l} instead, the solution set is the
// entrywise conjugate, which differs once blocks go complex.)
using Perturbation = std::vector<ComplexMatrix>;

struct PerturbationBasis {
  std::vector<std::pair<std::string, int>> blocks_shape;  // (label, r_i)
  std::vector<KrausSet> kraus;       // minimal Kraus set per branch, from the
                                     // Choi eigendecomposition at this node
  std::vector<Perturbation> basis;   // orthonormal under sum_i Tr[D_i D_i']
  // Structured direction used to seed face walks; may be absent even when the
  // basis is nonempty (then basis[0] is the walk direction).
  std::optional<Perturbation> preferred_witness;
  double margin = 0.0;
  bool borderline = false;
};

// Real matrix whose nullspace encodes the admissible perturbations: one column
// per real Hermitian block parameter (per branch: the r_i diagonal entries,
// then re/im pairs for each k < l), one row per real coordinate of the
// Hermitian constraint on C^{d_in}.  Both axes use an isometric realification,
// so Euclidean geometry on coefficients matches the block inner product.
Eigen::MatrixXd criterion_matrix(const Instrument& i, const Tolerance& tol = {});

PerturbationBasis perturbation_space(const Instrument& i,
                                     const Tolerance& tol = {});

struct ExtremalityReport {
  bool extreme = false;
  bool borderline = false;  // some rank decision (branch Choi eigenvalue or
                            // criterion singular value) within a decade of
                            // its cutoff
  double margin = 0.0;      // distance of the decisive singular value to the
                            // rank threshold
  int basis_dim = 0;
  std::optional<Perturbation> witness;  // present iff not extreme
};

// A device is extreme in its convex set iff no nonzero admissible
// perturbation exists.  Effects are judged as the binary POVM {E, 1-E},
// POVMs via their discard instrument.
ExtremalityReport is_extreme(const Device& d, const Tolerance& tol = {});

enum class QubitChannelVerdict { Extreme, NotExtreme, NotApplicable };

struct QubitChannelReport {
  QubitChannelVerdict verdict = QubitChannelVerdict::NotApplicable;
  double margin = 0.0;    // | |<0|K0^dag K1|1>| - |<1|K0^dag K1|0>| |
  double eigengap = 0.0;  // spectral gap of K0^dag K0
  bool borderline = false;
};

// Closed-form test for channels on C^2 given by exactly two Kraus operators:
// in the eigenbasis {|0>, |1>} of K0^dag K0 (descending eigenvalues), the
// channel is extreme iff the two off-diagonal magnitudes of K0^dag K1 differ.
// Requires a nondegenerate K0^dag K0 spectrum; otherwise NotApplicable.
QubitChannelReport qubit_channel_condition(const KrausSet& k,
                                           const Tolerance& tol = {});

// For an extreme instrument, at most (d_in)^2 branches can be nonzero.
// Throws std::logic_error when called on a non-extreme instrument.
bool extreme_support_bound_check(const Instrument& i, const Tolerance& tol = {});

}  // namespace qbary

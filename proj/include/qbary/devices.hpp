#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qbary/matcore.hpp"

namespace qbary {

// ---------------------------------------------------------------------------
// Device types.
//
// All operations act in the Schroedinger picture: a branch with Kraus
// operators K_l (each d_out x d_in) maps rho |-> sum_l K_l rho K_l^dag.
// Choi matrices live on C^{d_in} (x) C^{d_out} (input factor first) and are
// built from the unnormalized maximally entangled pairing,
//   choi = sum_{m,n} |m><n| (x) sum_l K_l |m><n| K_l^dag ,
// which makes  Tr_out(choi) = (associated POVM element)^T  an exact identity.
// ---------------------------------------------------------------------------

struct Effect {
  int dim = 0;
  ComplexMatrix matrix;  // dim x dim, expected 0 <= E <= 1
};

struct Povm {
  int dim = 0;
  std::vector<std::pair<std::string, ComplexMatrix>> outcomes;
};

// Kraus operators of one completely positive branch.  A minimal set has
// linearly independent operators; kraus_from_choi always returns one.  The
// operator list is empty exactly for the zero branch.
struct KrausSet {
  int d_in = 0;
  int d_out = 0;
  std::vector<ComplexMatrix> operators;  // each d_out x d_in
};

struct CpBranch {
  int d_in = 0;
  int d_out = 0;
  ComplexMatrix choi;  // (d_in*d_out) x (d_in*d_out), input factor first
};

struct Instrument {
  int d_in = 0;
  int d_out = 0;
  std::vector<std::pair<std::string, CpBranch>> branches;
};

// An instrument with exactly one branch.
struct Channel {
  Instrument inner;
};

using Device = std::variant<Effect, Povm, Channel, Instrument>;

// ---------------------------------------------------------------------------
// Conversions.
// ---------------------------------------------------------------------------

CpBranch choi_from_kraus(const KrausSet& k);

// Minimal Kraus set from the eigendecomposition of the Choi matrix: one
// operator per eigenvalue above atol + rtol*lambda_max, scaled by sqrt of the
// eigenvalue.  Operators are mutually orthogonal in the Hilbert-Schmidt inner
// product with |K_l|_HS^2 equal to the Choi eigenvalue.
KrausSet kraus_from_choi(const CpBranch& b, const Tolerance& tol = {});

// POVM as the instrument that discards the system: outcome i becomes the
// branch rho |-> Tr[rho M_i] with d_out = 1 and choi = M_i^T (exact).
Instrument povm_as_instrument(const Povm& m);

// M_i = Tr_out(choi_i)^T for every branch.
Povm instrument_associated_povm(const Instrument& i);

// Forgets the outcome: single branch with the summed Choi matrix.
Channel instrument_associated_channel(const Instrument& i);

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // signed slack; >= 0 iff passed
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;
  bool valid() const;
  std::string summary() const;  // names of failing checks
};

ValidationReport validate(const Device& d, const Tolerance& tol = {});
ValidationReport validate(const Instrument& i, const Tolerance& tol = {});

// ---------------------------------------------------------------------------
// Actions.
// ---------------------------------------------------------------------------

// rho |-> Tr_in[ choi (rho^T (x) 1) ] for the branch with the given label.
ComplexMatrix apply_schrodinger(const Instrument& i, const std::string& label,
                                const ComplexMatrix& rho);

// B |-> ( Tr_out[ choi (1 (x) B) ] )^T; on B = 1 this is the associated POVM
// element.
ComplexMatrix apply_heisenberg(const Instrument& i, const std::string& label,
                               const ComplexMatrix& B);

// ---------------------------------------------------------------------------
// Minimal dilation.
//
// Isometry Y : C^{d_in} -> C^{d_out} (x) C^{R}, R = sum_i r_i, where r_i is
// the Kraus rank of branch i.  Row index convention: (j, s) -> j*R + s with s
// the concatenated multiplicity index.  Y^dag (B (x) P_i) Y reproduces the
// Heisenberg action of branch i, P_i the projection onto multiplicity block i.
// ---------------------------------------------------------------------------

struct Dilation {
  ComplexMatrix isometry;          // (d_out * R) x d_in
  std::vector<int> multiplicities; // r_i per branch, zeros kept
};

Dilation build_minimal_dilation(const Instrument& i, const Tolerance& tol = {});

// Projection of Y onto branch i composed with B, i.e. Y^dag (B (x) P_i) Y.
ComplexMatrix dilation_heisenberg(const Dilation& dil, const Instrument& i,
                                  int branch, const ComplexMatrix& B);

// ---------------------------------------------------------------------------
// Generic helpers over Device.
// ---------------------------------------------------------------------------

enum class DeviceKind { Effect, Povm, Channel, Instrument };

DeviceKind device_kind(const Device& d);
int device_d_in(const Device& d);
int device_d_out(const Device& d);  // 1 for effects and POVMs

// Common working form: effects lift to the binary POVM {E, 1-E} with labels
// "1" and "0", POVMs to their discard instrument, channels unwrap.
Instrument to_instrument(const Device& d);

// Inverse of to_instrument for a device of the given kind (shape must match).
Device from_instrument(DeviceKind kind, const Instrument& i);

// max over branches of max_norm(choi_a - choi_b); devices must have the same
// shape (dims, branch count).  Labels are not compared.
double device_distance(const Device& a, const Device& b);

}  // namespace qbary

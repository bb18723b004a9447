#pragma once

#include <optional>

#include "qbary/decompose.hpp"

namespace qbary {

// Pauli matrices; index 0 is the identity.
const ComplexMatrix& pauli(int mu);

// Qubit effect in Bloch form, E = (e0 * 1 + e . sigma) / 2.
// Validity is |e| <= min(e0, 2 - e0).
struct BlochEffect {
  double e0 = 0.0;
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
};

Effect effect_from_bloch(const BlochEffect& b);
BlochEffect bloch_from_effect(const Effect& e);

// Closed-form barycentric decomposition of a qubit effect over the extreme
// effects {1, 0, P}: weights ( (e0 - |e|)/2, 1 - (e0 + |e|)/2, |e| ) with
// P = (1 + e_hat . sigma)/2.  The projection atom is absent when |e| = 0.
struct EffectDecomposition {
  double w_identity = 0.0;
  double w_zero = 0.0;
  double w_projection = 0.0;
  std::optional<ComplexMatrix> projection;
};

EffectDecomposition decompose_effect(const BlochEffect& b);

// Bloch vector p on the unit sphere to the spinor v_p = (cos(theta/2),
// e^{i phi} sin(theta/2)); at the south pole phi is fixed to 0.
Eigen::Vector2cd section_v(const Eigen::Vector3d& p);

// Two-Kraus channel family on C^2:
//   K0 = e^{i theta1} sqrt(a) |v_q><v_p| + e^{i theta2} sqrt(b) |v_-q><v_-p|
//   K1 = e^{i phi1} sqrt(1-a) |v_r><v_p| + e^{i phi2} sqrt(1-b) |v_-r><v_-p|
// Trace-preserving for any parameters; extreme iff a != b and q != r
// (among the genuinely two-Kraus members of the family).
struct ExtremeChannelParams {
  Eigen::Vector3d p = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d q = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d r = Eigen::Vector3d::UnitX();
  double a = 0.5, b = 0.5;
  double theta1 = 0.0, theta2 = 0.0, phi1 = 0.0, phi2 = 0.0;
};

KrausSet extreme_channel_kraus(const ExtremeChannelParams& params);
Channel extreme_channel(const ExtremeChannelParams& params);

// Convex mixture of unitary channels (weight, U) and family channels
// (weight, params), scaled by t and 1-t respectively.  Returns the mixed
// channel together with the decomposition that produced it.
std::pair<Channel, DiscreteDecomposition> sample_channel_mixture(
    double t, const std::vector<std::pair<double, ComplexMatrix>>& unitaries,
    const std::vector<std::pair<double, ExtremeChannelParams>>& members);

}  // namespace qbary

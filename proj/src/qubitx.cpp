#include "qbary/qubitx.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qbary {

const ComplexMatrix& pauli(int mu) {
  static const std::array<ComplexMatrix, 4> sigma = [] {
    std::array<ComplexMatrix, 4> s;
    for (auto& m : s) m = ComplexMatrix(2, 2);
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  if (mu < 0 || mu > 3) throw std::invalid_argument("pauli: index out of range");
  return sigma[mu];
}

Effect effect_from_bloch(const BlochEffect& b) {
  const double n = b.e.norm();
  if (n > std::min(b.e0, 2.0 - b.e0) + 1e-12)
    throw std::invalid_argument(
        "effect_from_bloch: |e| must be <= min(e0, 2 - e0)");
  ComplexMatrix m = b.e0 * pauli(0);
  for (int i = 0; i < 3; ++i) m += b.e(i) * pauli(i + 1);
  return Effect{2, ComplexMatrix(0.5 * m)};
}

BlochEffect bloch_from_effect(const Effect& e) {
  if (e.dim != 2 || e.matrix.rows() != 2 || e.matrix.cols() != 2)
    throw std::invalid_argument("bloch_from_effect: not a qubit effect");
  const ValidationReport rep = validate(Device{e});
  if (!rep.valid())
    throw std::invalid_argument("bloch_from_effect: invalid effect: " +
                                rep.summary());
  BlochEffect b;
  b.e0 = (e.matrix * pauli(0)).trace().real();
  for (int i = 0; i < 3; ++i)
    b.e(i) = (e.matrix * pauli(i + 1)).trace().real();
  return b;
}

EffectDecomposition decompose_effect(const BlochEffect& b) {
  const double n = b.e.norm();
  if (n > std::min(b.e0, 2.0 - b.e0) + 1e-12)
    throw std::invalid_argument("decompose_effect: invalid Bloch effect");
  EffectDecomposition out;
  out.w_identity = 0.5 * (b.e0 - n);
  out.w_zero = 1.0 - 0.5 * (b.e0 + n);
  out.w_projection = n;
  if (n > 0.0) {
    const Eigen::Vector3d hat = b.e / n;
    ComplexMatrix p = pauli(0);
    for (int i = 0; i < 3; ++i) p += hat(i) * pauli(i + 1);
    out.projection = ComplexMatrix(0.5 * p);
  }
  return out;
}

Eigen::Vector2cd section_v(const Eigen::Vector3d& p) {
  const double norm = p.norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("section_v: p must be a unit vector");
  const double theta = std::acos(std::clamp(p(2) / norm, -1.0, 1.0));
  // phi = 0 at both poles; the explicit test also covers atan2(+0, -0) = pi,
  // which a negated pole vector would otherwise hit.
  const double phi =
      (p(0) == 0.0 && p(1) == 0.0) ? 0.0 : std::atan2(p(1), p(0));
  Eigen::Vector2cd v;
  v << std::cos(theta / 2.0),
      std::exp(Complex(0, phi)) * std::sin(theta / 2.0);
  return v;
}

KrausSet extreme_channel_kraus(const ExtremeChannelParams& prm) {
  for (double x : {prm.a, prm.b})
    if (x < 0.0 || x > 1.0)
      throw std::invalid_argument("extreme_channel: a, b must lie in [0, 1]");
  const Eigen::Vector2cd vp = section_v(prm.p);
  const Eigen::Vector2cd vmp = section_v((-prm.p).eval());
  const Eigen::Vector2cd vq = section_v(prm.q);
  const Eigen::Vector2cd vmq = section_v((-prm.q).eval());
  const Eigen::Vector2cd vr = section_v(prm.r);
  const Eigen::Vector2cd vmr = section_v((-prm.r).eval());

  const ComplexMatrix k0 =
      std::exp(Complex(0, prm.theta1)) * std::sqrt(prm.a) * vq * vp.adjoint() +
      std::exp(Complex(0, prm.theta2)) * std::sqrt(prm.b) * vmq * vmp.adjoint();
  const ComplexMatrix k1 =
      std::exp(Complex(0, prm.phi1)) * std::sqrt(1.0 - prm.a) * vr *
          vp.adjoint() +
      std::exp(Complex(0, prm.phi2)) * std::sqrt(1.0 - prm.b) * vmr *
          vmp.adjoint();
  return KrausSet{2, 2, {k0, k1}};
}

Channel extreme_channel(const ExtremeChannelParams& prm) {
  Instrument inner;
  inner.d_in = 2;
  inner.d_out = 2;
  inner.branches.push_back({"0", choi_from_kraus(extreme_channel_kraus(prm))});
  return Channel{std::move(inner)};
}

std::pair<Channel, DiscreteDecomposition> sample_channel_mixture(
    double t, const std::vector<std::pair<double, ComplexMatrix>>& unitaries,
    const std::vector<std::pair<double, ExtremeChannelParams>>& members) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("sample_channel_mixture: t must lie in [0, 1]");
  DiscreteDecomposition dec;
  for (const auto& [w, u] : unitaries) {
    if (w < 0.0) throw std::invalid_argument("sample_channel_mixture: weight < 0");
    const double wt = t * w;
    if (wt == 0.0) continue;
    Instrument inner;
    inner.d_in = static_cast<int>(u.cols());
    inner.d_out = static_cast<int>(u.rows());
    inner.branches.push_back(
        {"0", choi_from_kraus(KrausSet{inner.d_in, inner.d_out, {u}})});
    dec.components.push_back({wt, Channel{std::move(inner)}});
  }
  for (const auto& [w, prm] : members) {
    if (w < 0.0) throw std::invalid_argument("sample_channel_mixture: weight < 0");
    const double wt = (1.0 - t) * w;
    if (wt == 0.0) continue;
    dec.components.push_back({wt, extreme_channel(prm)});
  }
  if (dec.components.empty())
    throw std::invalid_argument("sample_channel_mixture: empty mixture");
  double total = 0.0;
  for (const auto& c : dec.components) total += c.weight;
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(
        "sample_channel_mixture: weights must sum to 1 within each part");
  return {std::get<Channel>(reconstruct(dec)), std::move(dec)};
}

}  // namespace qbary

#include "qbary/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qbary {

namespace {

constexpr double kPi = std::numbers::pi;

double phi_of(const Eigen::Vector3d& n) {
  double phi = std::atan2(n(1), n(0));
  if (phi < 0) phi += 2.0 * kPi;
  return phi;
}

SphereGrid build_grid(int n_theta, int n_phi, bool half) {
  if (n_theta < 2 || n_phi < 4)
    throw std::invalid_argument("SphereGrid: need n_theta >= 2, n_phi >= 4");
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  SphereGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  g.weights.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  const double wphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    // Half grid: map [-1, 1] onto [0, 1] in cos(theta).
    const double c = half ? 0.5 * (x[i] + 1.0) : x[i];
    const double wt = half ? 0.5 * w[i] : w[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double theta = std::acos(c);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * wphi;
      SphereGrid::Node node;
      node.theta = theta;
      node.phi = phi;
      node.n << s * std::cos(phi), s * std::sin(phi), c;
      g.nodes.push_back(node);
      g.weights.push_back(wt * wphi);
    }
  }
  return g;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(0, n - 1));
  for (int k = 1; k < n; ++k)
    sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_legendre: eigensolver failed");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double q0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * q0 * q0;
  }
}

SphereGrid SphereGrid::full(int n_theta, int n_phi) {
  return build_grid(n_theta, n_phi, false);
}

SphereGrid SphereGrid::half(int n_theta, int n_phi) {
  return build_grid(n_theta, n_phi, true);
}

double SphereGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

Eigen::Matrix2cd bloch_projection(const Eigen::Vector3d& n) {
  Eigen::Matrix2cd p;
  p << 1.0 + n(2), Complex(n(0), -n(1)), Complex(n(0), n(1)), 1.0 - n(2);
  return 0.5 * p;
}

Eigen::Matrix2cd integrate_serial(const SphereGrid& g, const NodeIntegrand& f) {
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    acc += g.weights[i] * f(g.nodes[i]);
  return acc;
}

Eigen::Matrix2cd integrate(const SphereGrid& g, const NodeIntegrand& f) {
  // Fixed chunking keeps the floating-point association independent of the
  // thread count, so results are bit-stable across OMP_NUM_THREADS settings.
  constexpr std::size_t kChunk = 2048;
  const std::size_t n = g.nodes.size();
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::Matrix2cd> partial(n_chunks, Eigen::Matrix2cd::Zero());
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(n_chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    for (std::size_t i = lo; i < hi; ++i) acc += g.weights[i] * f(g.nodes[i]);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
  for (const auto& p : partial) acc += p;
  return acc;
}

std::vector<BorelRegion> standard_regions() {
  std::vector<BorelRegion> rs;
  rs.push_back({"full_sphere", [](const Eigen::Vector3d&) { return true; }});
  rs.push_back({"empty", [](const Eigen::Vector3d&) { return false; }});
  rs.push_back({"upper_hemisphere",
                [](const Eigen::Vector3d& n) { return n(2) > 0.0; }});
  rs.push_back({"lower_hemisphere",
                [](const Eigen::Vector3d& n) { return n(2) < 0.0; }});
  for (int q = 0; q < 4; ++q) {
    const double lo = q * kPi / 2.0;
    const double hi = lo + kPi / 2.0;
    rs.push_back({"wedge_q" + std::to_string(q + 1),
                  [lo, hi](const Eigen::Vector3d& n) {
                    const double phi = phi_of(n);
                    return phi >= lo && phi < hi;
                  }});
  }
  rs.push_back({"cos2phi_band", [](const Eigen::Vector3d& n) {
                  const double phi = phi_of(n);
                  return phi < kPi / 4.0 || phi > 7.0 * kPi / 4.0;
                }});
  rs.push_back({"hemisphere_x",
                [](const Eigen::Vector3d& n) { return n(0) > 0.0; }});
  rs.push_back({"hemisphere_y",
                [](const Eigen::Vector3d& n) { return n(1) > 0.0; }});
  rs.push_back({"checker", [](const Eigen::Vector3d& n) {
                  return (n(2) > 0.0) != (phi_of(n) < kPi);
                }});
  return rs;
}

BorelRegion complement(const BorelRegion& r) {
  auto inner = r.contains;
  return BorelRegion{"not_" + r.name,
                     [inner](const Eigen::Vector3d& n) { return !inner(n); }};
}

Eigen::Matrix2cd spin_direction_effect(const BorelRegion& x,
                                       const SphereGrid& full_grid) {
  const auto& member = x.contains;
  return integrate(full_grid, [&member](const SphereGrid::Node& node) {
           return member(node.n) ? bloch_projection(node.n)
                                 : Eigen::Matrix2cd::Zero().eval();
         }) /
         (2.0 * kPi);
}

Eigen::Matrix2cd sharp_spin_effect(const Eigen::Vector3d& n,
                                   const BorelRegion& x) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  if (x.contains(n)) out += bloch_projection(n);
  if (x.contains(-n)) out += bloch_projection(-n);
  return out;
}

Eigen::Matrix2cd barycenter_over_halfsphere(const BorelRegion& x,
                                            const SphereGrid& half_grid) {
  return integrate(half_grid, [&x](const SphereGrid::Node& node) {
           return sharp_spin_effect(node.n, x);
         }) /
         (2.0 * kPi);
}

std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> dplus_dminus_split(
    const BorelRegion& x, const SphereGrid& full_grid) {
  const auto& member = x.contains;
  const Eigen::Matrix2cd plus =
      integrate(full_grid, [&member](const SphereGrid::Node& node) {
        if (!member(node.n)) return Eigen::Matrix2cd::Zero().eval();
        return ((1.0 + std::cos(2.0 * node.phi)) * bloch_projection(node.n))
            .eval();
      }) /
      (2.0 * kPi);
  const Eigen::Matrix2cd minus =
      integrate(full_grid, [&member](const SphereGrid::Node& node) {
        if (!member(node.n)) return Eigen::Matrix2cd::Zero().eval();
        return ((1.0 - std::cos(2.0 * node.phi)) * bloch_projection(node.n))
            .eval();
      }) /
      (2.0 * kPi);
  return {plus, minus};
}

Eigen::Matrix2cd cos2phi_moment(const SphereGrid& full_grid) {
  return integrate(full_grid, [](const SphereGrid::Node& node) {
           return (std::cos(2.0 * node.phi) * bloch_projection(node.n)).eval();
         }) /
         (2.0 * kPi);
}

namespace {

double real_spherical_harmonic(int l, int m, const Eigen::Vector3d& n) {
  const double c = std::clamp(n(2), -1.0, 1.0);
  const double phi = std::atan2(n(1), n(0));
  const int am = std::abs(m);
  double norm = (2.0 * l + 1.0) / (4.0 * kPi);
  for (int k = l - am + 1; k <= l + am; ++k) norm /= k;
  norm = std::sqrt(norm);
  const double p = std::assoc_legendre(l, am, c);
  if (m == 0) return norm * p;
  const double ang = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
  return std::numbers::sqrt2 * norm * p * ang;
}

}  // namespace

TestFunctionSeq default_test_functions() {
  TestFunctionSeq seq;
  seq.fs.push_back([](const Eigen::Vector3d&) { return 1.0; });
  for (int l = 1; l <= 4; ++l)
    for (int m = -l; m <= l; ++m)
      seq.fs.push_back([l, m](const Eigen::Vector3d& n) {
        return real_spherical_harmonic(l, m, n);
      });
  return seq;
}

double weak_star_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const TestFunctionSeq& fs) {
  double dist = 0.0;
  double scale = 0.5;
  for (const TestFunction& f : fs.fs) {
    double diff = 0.0;
    for (const auto& [pt, mass] : mu.atoms) diff += mass * f(pt);
    for (const auto& [pt, mass] : nu.atoms) diff -= mass * f(pt);
    const double a = std::abs(diff);
    dist += scale * a / (1.0 + a);
    scale *= 0.5;
  }
  return dist;
}

}  // namespace qbary

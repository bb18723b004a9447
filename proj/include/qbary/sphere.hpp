#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qbary/matcore.hpp"

namespace qbary {

// ---------------------------------------------------------------------------
// Quadrature grid on the unit sphere: Gauss-Legendre nodes in cos(theta)
// crossed with a uniform midpoint grid in phi (phi_j = 2 pi (j + 1/2) / M, so
// no node falls on the coordinate axes or the equator).  Weights are solid
// angles; they sum to 4 pi for the full sphere and 2 pi for the upper half.
// The full and half grids share the phi nodes, so phi-aligned regions see the
// same azimuthal membership pattern in both.
// ---------------------------------------------------------------------------
struct SphereGrid {
  struct Node {
    double theta = 0.0;
    double phi = 0.0;
    Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  };
  int n_theta = 0;
  int n_phi = 0;
  std::vector<Node> nodes;
  std::vector<double> weights;

  static SphereGrid full(int n_theta, int n_phi);
  static SphereGrid half(int n_theta, int n_phi);  // upper hemisphere only
  double total_weight() const;
};

// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Borel subset of the sphere, described by a membership predicate on unit
// vectors.  Predicates must be sign-stable away from the grid nodes; the
// bundled family only uses the equator and phi cell edges as boundaries.
struct BorelRegion {
  std::string name;
  std::function<bool(const Eigen::Vector3d&)> contains;
};

// The fixed 12-region family used by the demos and the barycenter checks.
std::vector<BorelRegion> standard_regions();
BorelRegion complement(const BorelRegion& r);

// P_n = (1 + n . sigma)/2, the sharp effect along n.
Eigen::Matrix2cd bloch_projection(const Eigen::Vector3d& n);

// ---------------------------------------------------------------------------
// Quadrature kernels.  integrate() splits the node range into fixed-size
// chunks, accumulates chunks in parallel and combines them in chunk order, so
// the result is independent of the thread count.  integrate_serial() is the
// plain reference loop kept for testing and benchmarking.
// ---------------------------------------------------------------------------
using NodeIntegrand = std::function<Eigen::Matrix2cd(const SphereGrid::Node&)>;

Eigen::Matrix2cd integrate(const SphereGrid& g, const NodeIntegrand& f);
Eigen::Matrix2cd integrate_serial(const SphereGrid& g, const NodeIntegrand& f);

// ---------------------------------------------------------------------------
// The covariant spin-direction observable and its barycentric structure.
// ---------------------------------------------------------------------------

// D(X) = (1/4pi) Int_X (1 + n . sigma) dn, by quadrature on the full grid.
Eigen::Matrix2cd spin_direction_effect(const BorelRegion& x,
                                       const SphereGrid& full_grid);

// S_n(X) = P_n 1_X(n) + P_{-n} 1_X(-n) (sharp observable along +-n).
Eigen::Matrix2cd sharp_spin_effect(const Eigen::Vector3d& n,
                                   const BorelRegion& x);

// (1/2pi) Int_{upper half} S_n(X) dn, by quadrature on the half grid.  Equals
// D(X) exactly in the continuum; the difference of the two quadratures is the
// discretization error reported by the demo.
Eigen::Matrix2cd barycenter_over_halfsphere(const BorelRegion& x,
                                            const SphereGrid& half_grid);

// D_+-(X) = Int_X (1 +- cos(2 phi)) dD(n); their equal-weight mixture is D.
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> dplus_dminus_split(
    const BorelRegion& x, const SphereGrid& full_grid);

// Int cos(2 phi) dD over the full sphere (zero in the continuum).
Eigen::Matrix2cd cos2phi_moment(const SphereGrid& full_grid);

// ---------------------------------------------------------------------------
// Weak-* metric on discrete measures.
// ---------------------------------------------------------------------------
struct DiscreteMeasure {
  std::vector<std::pair<Eigen::Vector3d, double>> atoms;  // (point, mass)
};

using TestFunction = std::function<double(const Eigen::Vector3d&)>;

struct TestFunctionSeq {
  std::vector<TestFunction> fs;
};

// Constant 1 followed by the real spherical harmonics up to l = 4.
TestFunctionSeq default_test_functions();

// d(mu, nu) = sum_k |I_k| / (2^{k+1} (1 + |I_k|)), I_k the k-th test-function
// integral difference.
double weak_star_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const TestFunctionSeq& fs);

}  // namespace qbary

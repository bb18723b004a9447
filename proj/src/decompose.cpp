#include "qbary/decompose.hpp"

#include <cmath>
#include <limits>

namespace qbary {

namespace {

constexpr double kMergeTol = 1e-8;
constexpr double kReconTol = 1e-8;

int total_choi_rank(const Instrument& i, const Tolerance& tol) {
  int r = 0;
  for (const auto& [label, br] : i.branches) r += rank(br.choi, tol);
  return r;
}

// Project the instrument back onto the normalization manifold.  Walk nodes
// drift off it by roughly t times the direction residual, which for large
// boundary steps can exceed the validation threshold; conjugating every
// branch by the inverse square root of the summed output marginal restores
// the identity exactly while preserving positivity and all Choi ranks.
Instrument renormalized(const Instrument& i) {
  ComplexMatrix total = ComplexMatrix::Zero(i.d_in, i.d_in);
  for (const auto& [label, br] : i.branches)
    total += partial_trace(br.choi, i.d_in, i.d_out, TraceSide::Second);
  total = (total + total.adjoint()) / 2.0;
  if (max_norm(total - ComplexMatrix::Identity(i.d_in, i.d_in)) <= 1e-15)
    return i;
  const Eigh es = eigh(total);
  if (es.values(0) <= 0.5) return i;  // badly broken; let validation report it
  const ComplexMatrix root_inv =
      es.vectors * es.values.cwiseSqrt().cwiseInverse().asDiagonal() *
      es.vectors.adjoint();
  const ComplexMatrix g =
      kron(root_inv, ComplexMatrix::Identity(i.d_out, i.d_out));
  Instrument out = i;
  for (auto& [label, br] : out.branches)
    br.choi = g * br.choi * g.adjoint();
  return out;
}

double direction_residual(const PerturbationBasis& space,
                          const Perturbation& direction, int d_in) {
  ComplexMatrix sum = ComplexMatrix::Zero(d_in, d_in);
  for (std::size_t b = 0; b < space.kraus.size(); ++b) {
    const KrausSet& ks = space.kraus[b];
    const int r = static_cast<int>(ks.operators.size());
    if (direction[b].rows() != r || direction[b].cols() != r)
      throw std::invalid_argument("boundary_step: direction block shape mismatch");
    for (int k = 0; k < r; ++k)
      for (int l = 0; l < r; ++l)
        sum += direction[b](k, l) *
               (ks.operators[l].adjoint() * ks.operators[k]);
  }
  return max_norm(sum);
}

}  // namespace

Instrument perturb_instrument(const Instrument& i,
                              const PerturbationBasis& space,
                              const Perturbation& direction, double t) {
  Instrument out = i;
  for (std::size_t b = 0; b < out.branches.size(); ++b) {
    const KrausSet& ks = space.kraus[b];
    const int r = static_cast<int>(ks.operators.size());
    if (r == 0) continue;
    ComplexMatrix basis(static_cast<Eigen::Index>(i.d_in) * i.d_out, r);
    for (int k = 0; k < r; ++k) basis.col(k) = vectorize(ks.operators[k]);
    out.branches[b].second.choi +=
        t * ComplexMatrix(basis * direction[b] * basis.adjoint());
  }
  return out;
}

FaceStep boundary_step(const Instrument& i, const PerturbationBasis& space,
                       const Perturbation& direction, const Tolerance& tol) {
  if (direction.size() != space.kraus.size())
    throw std::invalid_argument("boundary_step: direction branch count mismatch");
  double norm = 0.0;
  for (const ComplexMatrix& blk : direction) norm += blk.squaredNorm();
  norm = std::sqrt(norm);
  if (!(norm > 0.0))
    throw std::invalid_argument("boundary_step: zero direction");
  const double residual = direction_residual(space, direction, i.d_in);
  if (residual > 10.0 * tol.threshold(norm))
    throw std::invalid_argument(
        "boundary_step: direction is not an admissible perturbation");

  double t_plus = std::numeric_limits<double>::infinity();
  double t_minus = std::numeric_limits<double>::infinity();
  for (const ComplexMatrix& blk : direction) {
    if (blk.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(blk, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (lo < 0.0) t_plus = std::min(t_plus, -1.0 / lo);
    if (hi > 0.0) t_minus = std::min(t_minus, 1.0 / hi);
  }
  if (!std::isfinite(t_plus) || !std::isfinite(t_minus))
    throw std::runtime_error(
        "boundary_step: direction is unbounded; device not at an interior point");

  // Both endpoints must lose Choi rank (checked with 10x slack).
  const Tolerance relaxed(10.0 * tol.atol, 10.0 * tol.rtol);
  const int base_rank = total_choi_rank(i, relaxed);
  for (const double t : {t_plus, -t_minus}) {
    const Instrument moved = perturb_instrument(i, space, direction, t);
    if (total_choi_rank(moved, relaxed) >= base_rank)
      throw std::runtime_error("boundary_step: endpoint did not lose rank");
  }
  return FaceStep{direction, t_plus, t_minus};
}

namespace {

struct Walker {
  Tolerance tol;
  int max_components = 0;
  int iterations = 0;
  int max_depth = 0;
  std::vector<std::pair<double, Instrument>> leaves;  // merged on the fly

  // Accumulate a leaf, folding it into an equal earlier one so the component
  // budget counts distinct devices rather than walk endpoints.
  void emit(const Instrument& leaf, double weight) {
    for (auto& [w, held] : leaves) {
      double dist = 0.0;
      for (std::size_t b = 0; b < leaf.branches.size(); ++b)
        dist = std::max(dist, max_norm(leaf.branches[b].second.choi -
                                       held.branches[b].second.choi));
      if (dist <= kMergeTol) {
        w += weight;
        return;
      }
    }
    if (static_cast<int>(leaves.size()) >= max_components)
      throw DecomposeLimitError(
          "decompose_extremal: component budget exceeded (" +
          std::to_string(max_components) + ")");
    leaves.push_back({weight, leaf});
  }

  void walk(const Instrument& raw, double weight, int depth) {
    ++iterations;
    max_depth = std::max(max_depth, depth);
    const Instrument node = renormalized(raw);
    const PerturbationBasis space = perturbation_space(node, tol);
    if (space.basis.empty()) {
      emit(node, weight);
      return;
    }
    const Perturbation& dir =
        space.preferred_witness ? *space.preferred_witness : space.basis[0];
    const FaceStep fs = boundary_step(node, space, dir, tol);
    const double span = fs.t_plus + fs.t_minus;
    walk(perturb_instrument(node, space, dir, fs.t_plus),
         weight * (fs.t_minus / span), depth + 1);
    walk(perturb_instrument(node, space, dir, -fs.t_minus),
         weight * (fs.t_plus / span), depth + 1);
  }
};

}  // namespace

DiscreteDecomposition decompose_extremal(const Device& d, const Tolerance& tol,
                                         int max_components) {
  if (max_components < 1)
    throw std::invalid_argument("decompose_extremal: max_components must be >= 1");
  const ValidationReport rep = validate(d, tol);
  if (!rep.valid())
    throw std::invalid_argument("decompose_extremal: invalid device: " +
                                rep.summary());
  const DeviceKind kind = device_kind(d);
  const Instrument root = to_instrument(d);

  Walker walker;
  walker.tol = tol;
  walker.max_components = max_components;
  walker.walk(root, 1.0, 0);

  DiscreteDecomposition out;
  out.iterations = walker.iterations;
  out.max_face_depth = walker.max_depth;
  for (const auto& [w, leaf] : walker.leaves)
    out.components.push_back({w, from_instrument(kind, leaf)});

  const double err = reconstruction_error(out, d);
  if (err > kReconTol)
    throw std::runtime_error(
        "decompose_extremal: reconstruction drifted beyond tolerance");
  return out;
}

Device reconstruct(const DiscreteDecomposition& dec) {
  if (dec.components.empty())
    throw std::invalid_argument("reconstruct: no components");
  const DeviceKind kind = device_kind(dec.components[0].device);
  Instrument acc = to_instrument(dec.components[0].device);
  for (auto& [label, br] : acc.branches)
    br.choi *= dec.components[0].weight;
  for (std::size_t c = 1; c < dec.components.size(); ++c) {
    const Instrument next = to_instrument(dec.components[c].device);
    if (next.d_in != acc.d_in || next.d_out != acc.d_out ||
        next.branches.size() != acc.branches.size())
      throw std::invalid_argument("reconstruct: component shape mismatch");
    for (std::size_t b = 0; b < acc.branches.size(); ++b)
      acc.branches[b].second.choi +=
          dec.components[c].weight * next.branches[b].second.choi;
  }
  return from_instrument(kind, acc);
}

double reconstruction_error(const DiscreteDecomposition& dec,
                            const Device& original) {
  return device_distance(reconstruct(dec), original);
}

}  // namespace qbary

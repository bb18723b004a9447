#include "qbary/extremality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qbary {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Isometric realification of a Hermitian matrix: diagonal, then sqrt(2) * re
// and sqrt(2) * im of the upper triangle.  Preserves the Frobenius metric.
Eigen::VectorXd realify_hermitian(const ComplexMatrix& g) {
  const int d = static_cast<int>(g.rows());
  Eigen::VectorXd v(static_cast<Eigen::Index>(d) * d);
  Eigen::Index at = 0;
  for (int m = 0; m < d; ++m) v(at++) = g(m, m).real();
  for (int m = 0; m < d; ++m)
    for (int n = m + 1; n < d; ++n) {
      v(at++) = kSqrt2 * g(m, n).real();
      v(at++) = kSqrt2 * g(m, n).imag();
    }
  return v;
}

struct BranchWork {
  KrausSet kraus;
  std::vector<double> lambda;               // Choi eigenvalue per operator
  std::vector<std::vector<ComplexMatrix>> prod;  // prod[k][l] = K_k^dag K_l
};

struct Workspace {
  std::vector<std::pair<std::string, int>> blocks_shape;
  std::vector<BranchWork> branches;
  int param_count = 0;
  std::vector<bool> diag_param;  // per column of the criterion matrix
  // Some branch Choi eigenvalue fell within a decade of the rank cutoff, so
  // the Kraus ranks themselves are fragile.
  bool borderline_rank = false;
};

Workspace prepare(const Instrument& instr, const Tolerance& tol) {
  const ValidationReport rep = validate(instr, tol);
  if (!rep.valid())
    throw std::invalid_argument("perturbation_space: invalid instrument: " +
                                rep.summary());
  Workspace w;
  for (const auto& [label, br] : instr.branches) {
    BranchWork bw;
    bw.kraus = kraus_from_choi(br, tol);
    {
      const Eigh es = eigh((br.choi + br.choi.adjoint()) / 2.0);
      const double scale =
          std::max(std::abs(es.values(0)),
                   std::abs(es.values(es.values.size() - 1)));
      const double thr = tol.threshold(scale);
      for (Eigen::Index k = 0; k < es.values.size(); ++k) {
        const double mag = std::abs(es.values(k));
        if (mag >= 0.1 * thr && mag <= 10.0 * thr) w.borderline_rank = true;
      }
    }
    const int r = static_cast<int>(bw.kraus.operators.size());
    w.blocks_shape.push_back({label, r});
    bw.lambda.resize(r);
    bw.prod.assign(r, std::vector<ComplexMatrix>(r));
    for (int k = 0; k < r; ++k) {
      bw.lambda[k] = bw.kraus.operators[k].squaredNorm();
      for (int l = 0; l < r; ++l)
        bw.prod[k][l] = bw.kraus.operators[k].adjoint() * bw.kraus.operators[l];
    }
    w.param_count += r * r;
    w.branches.push_back(std::move(bw));
  }
  for (const BranchWork& bw : w.branches) {
    const int r = static_cast<int>(bw.kraus.operators.size());
    for (int k = 0; k < r; ++k) w.diag_param.push_back(true);
    for (int k = 0; k < r; ++k)
      for (int l = k + 1; l < r; ++l) {
        w.diag_param.push_back(false);
        w.diag_param.push_back(false);
      }
  }
  return w;
}

Eigen::MatrixXd build_criterion(const Workspace& w, int d_in) {
  const Eigen::Index rows = static_cast<Eigen::Index>(d_in) * d_in;
  Eigen::MatrixXd a(rows, w.param_count);
  Eigen::Index col = 0;
  for (const BranchWork& bw : w.branches) {
    const int r = static_cast<int>(bw.kraus.operators.size());
    for (int k = 0; k < r; ++k)
      a.col(col++) = realify_hermitian(bw.prod[k][k]);
    for (int k = 0; k < r; ++k)
      for (int l = k + 1; l < r; ++l) {
        // Coefficient D_kl pairs with K_l^dag K_k (the product order the Choi
        // marginal produces), so the off-diagonal pair (k, l) contributes
        // D_kl prod[l][k] + conj(D_kl) prod[k][l].
        const ComplexMatrix re = (bw.prod[l][k] + bw.prod[k][l]) / kSqrt2;
        const ComplexMatrix im =
            Complex(0, 1) * (bw.prod[l][k] - bw.prod[k][l]) / kSqrt2;
        a.col(col++) = realify_hermitian(re);
        a.col(col++) = realify_hermitian(im);
      }
  }
  return a;
}

// Expand a real coefficient vector over the parameter enumeration back into
// Hermitian blocks.
Perturbation expand(const Workspace& w, const Eigen::VectorXd& c) {
  Perturbation out;
  Eigen::Index at = 0;
  for (const BranchWork& bw : w.branches) {
    const int r = static_cast<int>(bw.kraus.operators.size());
    ComplexMatrix d = ComplexMatrix::Zero(r, r);
    for (int k = 0; k < r; ++k) d(k, k) = c(at++);
    for (int k = 0; k < r; ++k)
      for (int l = k + 1; l < r; ++l) {
        const double re = c(at++) / kSqrt2;
        const double im = c(at++) / kSqrt2;
        d(k, l) = Complex(re, im);
        d(l, k) = Complex(re, -im);
      }
    out.push_back(std::move(d));
  }
  return out;
}

// Residual of the admissibility constraint for a block tuple.
double criterion_residual(const Workspace& w, const Perturbation& d, int d_in) {
  ComplexMatrix sum = ComplexMatrix::Zero(d_in, d_in);
  for (std::size_t b = 0; b < w.branches.size(); ++b) {
    const BranchWork& bw = w.branches[b];
    const int r = static_cast<int>(bw.kraus.operators.size());
    for (int k = 0; k < r; ++k)
      for (int l = 0; l < r; ++l)
        sum += d[b](k, l) * bw.prod[l][k];
  }
  return max_norm(sum);
}

double perturbation_norm(const Perturbation& d) {
  double s = 0.0;
  for (const ComplexMatrix& blk : d) s += blk.squaredNorm();
  return std::sqrt(s);
}

// Witness preference ladder.  The face-walk direction should stay inside the
// commuting coordinate structure of the node whenever possible, so that walks
// on commuting families (effects, POVM eigenvalue boxes, mixed-unitary
// channels) land on the closed-form vertices:
//   1. "support" direction: D_i = s_i * Lambda_i^{-1} (rescales each branch's
//      support projection) when some s != 0 satisfies the constraint;
//   2. any direction diagonal in the Kraus coordinates;
//   3. the leading general basis element.
std::optional<Perturbation> pick_witness(const Workspace& w,
                                         const Eigen::MatrixXd& a, int d_in,
                                         const Tolerance& tol,
                                         const std::vector<Perturbation>& basis) {
  if (basis.empty()) return std::nullopt;
  const Eigen::Index rows = a.rows();

  // Rung 1: support directions.
  std::vector<int> nonzero;
  for (std::size_t b = 0; b < w.branches.size(); ++b)
    if (!w.branches[b].kraus.operators.empty()) nonzero.push_back(static_cast<int>(b));
  if (nonzero.size() >= 2) {
    Eigen::MatrixXd s(rows, static_cast<Eigen::Index>(nonzero.size()));
    for (std::size_t j = 0; j < nonzero.size(); ++j) {
      const BranchWork& bw = w.branches[nonzero[j]];
      ComplexMatrix f = ComplexMatrix::Zero(d_in, d_in);
      for (std::size_t k = 0; k < bw.lambda.size(); ++k)
        f += bw.prod[k][k] / bw.lambda[k];
      s.col(j) = realify_hermitian(f);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thr = sv.size() ? tol.threshold(sv(0)) : tol.atol;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > thr) ++rank;
    if (rank < static_cast<int>(nonzero.size())) {
      const Eigen::VectorXd coeff = svd.matrixV().col(rank);
      Perturbation d;
      for (const BranchWork& bw : w.branches)
        d.push_back(ComplexMatrix::Zero(bw.kraus.operators.size(),
                                        bw.kraus.operators.size()));
      for (std::size_t j = 0; j < nonzero.size(); ++j) {
        const BranchWork& bw = w.branches[nonzero[j]];
        for (std::size_t k = 0; k < bw.lambda.size(); ++k)
          d[nonzero[j]](k, k) = coeff(j) / bw.lambda[k];
      }
      const double norm = perturbation_norm(d);
      if (norm > 0) {
        for (ComplexMatrix& blk : d) blk /= norm;
        if (criterion_residual(w, d, d_in) <= 10.0 * tol.threshold(1.0))
          return d;
      }
    }
  }

  // Rung 2: diagonal subkernel.
  std::vector<Eigen::Index> diag_cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (w.diag_param[j]) diag_cols.push_back(j);
  if (!diag_cols.empty()) {
    Eigen::MatrixXd ad(rows, static_cast<Eigen::Index>(diag_cols.size()));
    for (std::size_t j = 0; j < diag_cols.size(); ++j)
      ad.col(j) = a.col(diag_cols[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thr = sv.size() ? tol.threshold(sv(0)) : tol.atol;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > thr) ++rank;
    if (rank < static_cast<int>(diag_cols.size())) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(a.cols());
      const Eigen::VectorXd sub = svd.matrixV().col(rank);
      for (std::size_t j = 0; j < diag_cols.size(); ++j)
        full(diag_cols[j]) = sub(j);
      return expand(w, full);
    }
  }

  // Rung 3.
  return basis[0];
}

}  // namespace

Eigen::MatrixXd criterion_matrix(const Instrument& i, const Tolerance& tol) {
  const Workspace w = prepare(i, tol);
  return build_criterion(w, i.d_in);
}

PerturbationBasis perturbation_space(const Instrument& instr,
                                     const Tolerance& tol) {
  const Workspace w = prepare(instr, tol);
  PerturbationBasis out;
  out.blocks_shape = w.blocks_shape;
  for (const BranchWork& bw : w.branches) out.kraus.push_back(bw.kraus);
  out.borderline = w.borderline_rank;
  if (w.param_count == 0) return out;

  const Eigen::MatrixXd a = build_criterion(w, instr.d_in);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = sv.size() ? tol.threshold(sv(0)) : tol.atol;

  int rank = 0;
  double sigma_min_kept = std::numeric_limits<double>::infinity();
  double sigma_max_dropped = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr) {
      ++rank;
      sigma_min_kept = std::min(sigma_min_kept, sv(i));
    } else {
      sigma_max_dropped = std::max(sigma_max_dropped, sv(i));
    }
    if (sv(i) >= 0.1 * thr && sv(i) <= 10.0 * thr) out.borderline = true;
  }
  for (Eigen::Index j = rank; j < a.cols(); ++j)
    out.basis.push_back(expand(w, svd.matrixV().col(j)));
  out.margin = out.basis.empty() ? sigma_min_kept - thr
                                 : thr - sigma_max_dropped;
  out.preferred_witness = pick_witness(w, a, instr.d_in, tol, out.basis);
  return out;
}

ExtremalityReport is_extreme(const Device& d, const Tolerance& tol) {
  const Instrument instr = to_instrument(d);
  PerturbationBasis space = perturbation_space(instr, tol);
  ExtremalityReport rep;
  rep.extreme = space.basis.empty();
  rep.borderline = space.borderline;
  rep.margin = space.margin;
  rep.basis_dim = static_cast<int>(space.basis.size());
  if (!rep.extreme)
    rep.witness = space.preferred_witness ? *space.preferred_witness
                                          : space.basis[0];
  return rep;
}

QubitChannelReport qubit_channel_condition(const KrausSet& k,
                                           const Tolerance& tol) {
  if (k.d_in != 2)
    throw std::invalid_argument("qubit_channel_condition: d_in must be 2");
  if (k.operators.size() != 2)
    throw std::invalid_argument(
        "qubit_channel_condition: exactly two Kraus operators required");
  for (const ComplexMatrix& op : k.operators)
    if (op.rows() != k.d_out || op.cols() != 2 || !all_finite(op))
      throw std::invalid_argument("qubit_channel_condition: bad operator shape");

  QubitChannelReport rep;
  const ComplexMatrix e = k.operators[0].adjoint() * k.operators[0];
  const Eigh es = eigh(e, tol);
  rep.eigengap = es.values(1) - es.values(0);
  const double ethr = tol.threshold(spectral_norm(e));
  if (rep.eigengap <= 10.0 * ethr) {
    rep.verdict = QubitChannelVerdict::NotApplicable;
    rep.margin = 0.0;
    rep.borderline = rep.eigengap > 0.1 * ethr;
    return rep;
  }
  const ComplexVector v0 = es.vectors.col(1);  // descending order
  const ComplexVector v1 = es.vectors.col(0);
  const ComplexMatrix x = k.operators[0].adjoint() * k.operators[1];
  const double x01 = std::abs(Complex(v0.adjoint() * x * v1));
  const double x10 = std::abs(Complex(v1.adjoint() * x * v0));
  rep.margin = std::abs(x01 - x10);
  const double xthr = tol.threshold(std::max(spectral_norm(x), 1.0));
  rep.verdict = rep.margin > xthr ? QubitChannelVerdict::Extreme
                                  : QubitChannelVerdict::NotExtreme;
  rep.borderline = rep.margin >= 0.1 * xthr && rep.margin <= 10.0 * xthr;
  return rep;
}

bool extreme_support_bound_check(const Instrument& i, const Tolerance& tol) {
  const ExtremalityReport rep = is_extreme(Device{i}, tol);
  if (!rep.extreme)
    throw std::logic_error(
        "extreme_support_bound_check: instrument is not extreme");
  double scale = 0.0;
  for (const auto& [label, br] : i.branches)
    scale = std::max(scale, spectral_norm(br.choi));
  const double thr = tol.threshold(scale);
  int nonzero = 0;
  for (const auto& [label, br] : i.branches)
    if (spectral_norm(br.choi) > thr) ++nonzero;
  return nonzero <= i.d_in * i.d_in;
}

}  // namespace qbary

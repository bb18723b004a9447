#include "qbary/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qbary {

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection-free modulo is fine here: span is tiny relative to 2^64, the
  // bias is far below anything observable, and determinism is what matters.
  return lo + static_cast<int>(gen() % span);
}

double Rng::normal() {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::Vector3d Rng::unit_vector3() {
  Eigen::Vector3d v;
  do {
    v << normal(), normal(), normal();
  } while (v.norm() < 1e-12);
  return v.normalized();
}

ComplexMatrix Rng::ginibre(int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = cnormal();
  return g;
}

ComplexMatrix Rng::random_isometry(int rows, int cols) {
  if (rows < cols)
    throw std::invalid_argument("random_isometry: rows must be >= cols");
  const ComplexMatrix g = ginibre(rows, cols);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;  // make the implicit R diagonal positive
  }
  return q;
}

ComplexMatrix Rng::haar_unitary(int d) { return random_isometry(d, d); }

ComplexMatrix Rng::random_density(int d) {
  const ComplexMatrix g = ginibre(d, d);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

Effect Rng::random_effect(int d) {
  const ComplexMatrix u = haar_unitary(d);
  Eigen::VectorXd lam(d);
  for (int i = 0; i < d; ++i) lam(i) = uniform();
  return Effect{d, ComplexMatrix(u * lam.asDiagonal() * u.adjoint())};
}

Povm Rng::random_povm(int d, int n_outcomes) {
  if (n_outcomes < 1) throw std::invalid_argument("random_povm: need outcomes");
  std::vector<ComplexMatrix> g;
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < n_outcomes; ++k) {
    const ComplexMatrix a = ginibre(d, d);
    g.push_back(a * a.adjoint());
    s += g.back();
  }
  // Normalize by the inverse square root of the frame sum.
  const Eigh es = eigh(s);
  ComplexMatrix sinv = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    sinv += (1.0 / std::sqrt(es.values(i))) * es.vectors.col(i) *
            es.vectors.col(i).adjoint();
  Povm out;
  out.dim = d;
  for (int k = 0; k < n_outcomes; ++k)
    out.outcomes.push_back({std::to_string(k),
                            ComplexMatrix(sinv * g[k] * sinv)});
  return out;
}

Povm Rng::random_pvm(int d, int n_outcomes) {
  if (n_outcomes < 1 || n_outcomes > d)
    throw std::invalid_argument("random_pvm: need 1 <= outcomes <= d");
  const ComplexMatrix u = haar_unitary(d);
  // Random surjective assignment of basis vectors to outcomes.
  std::vector<int> owner(d);
  for (int i = 0; i < n_outcomes; ++i) owner[i] = i;
  for (int i = n_outcomes; i < d; ++i) owner[i] = uniform_int(0, n_outcomes - 1);
  for (int i = d - 1; i > 0; --i) std::swap(owner[i], owner[uniform_int(0, i)]);
  Povm out;
  out.dim = d;
  for (int k = 0; k < n_outcomes; ++k)
    out.outcomes.push_back({std::to_string(k), ComplexMatrix::Zero(d, d)});
  for (int i = 0; i < d; ++i)
    out.outcomes[owner[i]].second += u.col(i) * u.col(i).adjoint();
  return out;
}

Channel Rng::random_channel(int d_in, int d_out, int kraus_rank) {
  if (kraus_rank < 1 || kraus_rank > d_in * d_out)
    throw std::invalid_argument("random_channel: bad kraus rank");
  const ComplexMatrix v = random_isometry(d_out * kraus_rank, d_in);
  KrausSet k{d_in, d_out, {}};
  for (int l = 0; l < kraus_rank; ++l)
    k.operators.push_back(v.middleRows(static_cast<Eigen::Index>(l) * d_out,
                                       d_out));
  Instrument inner;
  inner.d_in = d_in;
  inner.d_out = d_out;
  inner.branches.push_back({"0", choi_from_kraus(k)});
  return Channel{std::move(inner)};
}

Instrument Rng::random_instrument(int d_in, int d_out, int n_outcomes) {
  if (n_outcomes < 1)
    throw std::invalid_argument("random_instrument: need outcomes");
  const int n = d_in * d_out;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<ComplexMatrix> chois;
    ComplexMatrix s = ComplexMatrix::Zero(d_in, d_in);
    for (int k = 0; k < n_outcomes; ++k) {
      const int r = uniform_int(1, n);
      const ComplexMatrix a = ginibre(n, r);
      chois.push_back(a * a.adjoint());
      s += partial_trace(chois.back(), d_in, d_out, TraceSide::Second);
    }
    const Eigh es = eigh(s);
    // Low-rank draws can leave the total input operator singular (say, two
    // rank-1 branches on a qutrit discarded to d_out = 1); no conjugation can
    // normalize those, so redraw.
    if (es.values(0) <= 1e-10 * es.values(d_in - 1)) continue;
    ComplexMatrix sinv = ComplexMatrix::Zero(d_in, d_in);
    for (int i = 0; i < d_in; ++i)
      sinv += (1.0 / std::sqrt(es.values(i))) * es.vectors.col(i) *
              es.vectors.col(i).adjoint();
    const ComplexMatrix conj =
        kron(sinv, ComplexMatrix::Identity(d_out, d_out));
    Instrument out;
    out.d_in = d_in;
    out.d_out = d_out;
    for (int k = 0; k < n_outcomes; ++k)
      out.branches.push_back({std::to_string(k),
                              CpBranch{d_in, d_out,
                                       ComplexMatrix(conj * chois[k] * conj)}});
    return out;
  }
  throw std::runtime_error("random_instrument: draws stayed singular");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qbary

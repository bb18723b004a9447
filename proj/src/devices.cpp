#include "qbary/devices.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qbary {

namespace {

ComplexMatrix identity(int d) { return ComplexMatrix::Identity(d, d); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

CpBranch choi_from_kraus(const KrausSet& k) {
  require(k.d_in > 0 && k.d_out > 0, "choi_from_kraus: dimensions must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(k.d_in) * k.d_out;
  ComplexMatrix choi = ComplexMatrix::Zero(n, n);
  for (const ComplexMatrix& op : k.operators) {
    require(op.rows() == k.d_out && op.cols() == k.d_in,
            "choi_from_kraus: operator shape does not match d_out x d_in");
    require(all_finite(op), "choi_from_kraus: operator has non-finite entries");
    const ComplexVector v = vectorize(op);  // index m*d_out + j = K(j, m)
    choi.noalias() += v * v.adjoint();
  }
  return CpBranch{k.d_in, k.d_out, std::move(choi)};
}

KrausSet kraus_from_choi(const CpBranch& b, const Tolerance& tol) {
  require(b.d_in > 0 && b.d_out > 0, "kraus_from_choi: dimensions must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(b.d_in) * b.d_out;
  require(b.choi.rows() == n && b.choi.cols() == n,
          "kraus_from_choi: choi size does not match d_in*d_out");
  if (!is_hermitian(b.choi, tol))
    throw std::invalid_argument("kraus_from_choi: choi is not Hermitian");
  const Eigh es = eigh(b.choi, tol);
  const double scale = std::max(std::abs(es.values(0)),
                                std::abs(es.values(es.values.size() - 1)));
  const double thr = tol.threshold(scale);
  if (es.values(0) < -thr)
    throw std::invalid_argument("kraus_from_choi: choi is not PSD at tolerance");
  KrausSet out{b.d_in, b.d_out, {}};
  // Descending order so the leading Kraus operator is the dominant one.
  for (Eigen::Index idx = es.values.size() - 1; idx >= 0; --idx) {
    const double lam = es.values(idx);
    if (lam <= thr) break;
    const ComplexVector v = std::sqrt(lam) * es.vectors.col(idx);
    ComplexMatrix op(b.d_out, b.d_in);
    for (int m = 0; m < b.d_in; ++m)
      for (int j = 0; j < b.d_out; ++j)
        op(j, m) = v(static_cast<Eigen::Index>(m) * b.d_out + j);
    out.operators.push_back(std::move(op));
  }
  return out;
}

Instrument povm_as_instrument(const Povm& m) {
  Instrument out;
  out.d_in = m.dim;
  out.d_out = 1;
  for (const auto& [label, eff] : m.outcomes)
    out.branches.push_back({label, CpBranch{m.dim, 1, eff.transpose()}});
  return out;
}

Povm instrument_associated_povm(const Instrument& i) {
  Povm out;
  out.dim = i.d_in;
  for (const auto& [label, br] : i.branches)
    out.outcomes.push_back(
        {label, partial_trace(br.choi, i.d_in, i.d_out, TraceSide::Second)
                    .transpose()});
  return out;
}

Channel instrument_associated_channel(const Instrument& i) {
  const Eigen::Index n = static_cast<Eigen::Index>(i.d_in) * i.d_out;
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& [label, br] : i.branches) sum += br.choi;
  Instrument inner;
  inner.d_in = i.d_in;
  inner.d_out = i.d_out;
  inner.branches.push_back({"0", CpBranch{i.d_in, i.d_out, std::move(sum)}});
  return Channel{std::move(inner)};
}

bool ValidationReport::valid() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!first) os << ", ";
    os << c.name;
    first = false;
  }
  return first ? "ok" : os.str();
}

namespace {

void check_effect_into(std::vector<InvariantCheck>& out, const std::string& prefix,
                       const ComplexMatrix& e, int dim, const Tolerance& tol) {
  const bool finite = all_finite(e) && e.rows() == dim && e.cols() == dim;
  out.push_back({prefix + "finite", finite, finite ? 0.0 : -1.0});
  if (!finite) return;
  const double scale = spectral_norm(e);
  const double herm_dev = max_norm(e - e.adjoint());
  const double thr = tol.threshold(scale);
  out.push_back({prefix + "hermitian", herm_dev <= thr, thr - herm_dev});
  if (herm_dev > thr) return;
  const ComplexMatrix h = (e + e.adjoint()) / 2.0;
  const double lo = min_eigenvalue(h) + thr;
  out.push_back({prefix + "psd", lo >= 0.0, lo});
  const ComplexMatrix upper = identity(dim) - h;
  const double hi = min_eigenvalue(upper) + tol.threshold(spectral_norm(upper));
  out.push_back({prefix + "below_identity", hi >= 0.0, hi});
}

}  // namespace

ValidationReport validate(const Instrument& i, const Tolerance& tol) {
  ValidationReport rep;
  const bool dims_ok = i.d_in > 0 && i.d_out > 0 && !i.branches.empty();
  rep.checks.push_back({"shape", dims_ok, dims_ok ? 0.0 : -1.0});
  if (!dims_ok) return rep;
  const Eigen::Index n = static_cast<Eigen::Index>(i.d_in) * i.d_out;
  ComplexMatrix total = ComplexMatrix::Zero(i.d_in, i.d_in);
  bool structural = true;
  for (std::size_t b = 0; b < i.branches.size(); ++b) {
    const std::string prefix = "branch[" + std::to_string(b) + "].";
    const CpBranch& br = i.branches[b].second;
    const bool fits = br.d_in == i.d_in && br.d_out == i.d_out &&
                      br.choi.rows() == n && br.choi.cols() == n &&
                      all_finite(br.choi);
    rep.checks.push_back({prefix + "finite", fits, fits ? 0.0 : -1.0});
    if (!fits) {
      structural = false;
      continue;
    }
    const double scale = spectral_norm(br.choi);
    const double thr = tol.threshold(scale);
    const double herm_dev = max_norm(br.choi - br.choi.adjoint());
    rep.checks.push_back({prefix + "hermitian", herm_dev <= thr, thr - herm_dev});
    if (herm_dev > thr) {
      structural = false;
      continue;
    }
    const ComplexMatrix h = (br.choi + br.choi.adjoint()) / 2.0;
    const double cp = (br.choi.size() ? min_eigenvalue(h) : 0.0) + thr;
    rep.checks.push_back({prefix + "completely_positive", cp >= 0.0, cp});
    total += partial_trace(h, i.d_in, i.d_out, TraceSide::Second);
  }
  if (structural) {
    const double dev = max_norm(total - identity(i.d_in));
    const double thr = tol.threshold(1.0);
    rep.checks.push_back({"normalization", dev <= thr, thr - dev});
  }
  return rep;
}

ValidationReport validate(const Device& d, const Tolerance& tol) {
  ValidationReport rep;
  if (const auto* e = std::get_if<Effect>(&d)) {
    const bool dims_ok = e->dim > 0;
    rep.checks.push_back({"shape", dims_ok, dims_ok ? 0.0 : -1.0});
    if (dims_ok) check_effect_into(rep.checks, "", e->matrix, e->dim, tol);
    return rep;
  }
  if (const auto* m = std::get_if<Povm>(&d)) {
    const bool dims_ok = m->dim > 0 && !m->outcomes.empty();
    rep.checks.push_back({"shape", dims_ok, dims_ok ? 0.0 : -1.0});
    if (!dims_ok) return rep;
    ComplexMatrix sum = ComplexMatrix::Zero(m->dim, m->dim);
    bool structural = true;
    for (std::size_t k = 0; k < m->outcomes.size(); ++k) {
      const std::string prefix = "outcome[" + std::to_string(k) + "].";
      const ComplexMatrix& eff = m->outcomes[k].second;
      const bool fits = eff.rows() == m->dim && eff.cols() == m->dim &&
                        all_finite(eff);
      rep.checks.push_back({prefix + "finite", fits, fits ? 0.0 : -1.0});
      if (!fits) {
        structural = false;
        continue;
      }
      const double scale = spectral_norm(eff);
      const double thr = tol.threshold(scale);
      const double herm_dev = max_norm(eff - eff.adjoint());
      rep.checks.push_back({prefix + "hermitian", herm_dev <= thr, thr - herm_dev});
      if (herm_dev > thr) {
        structural = false;
        continue;
      }
      const ComplexMatrix h = (eff + eff.adjoint()) / 2.0;
      const double lo = min_eigenvalue(h) + thr;
      rep.checks.push_back({prefix + "psd", lo >= 0.0, lo});
      sum += h;
    }
    if (structural) {
      const double dev = max_norm(sum - identity(m->dim));
      const double thr = tol.threshold(1.0);
      rep.checks.push_back({"normalization", dev <= thr, thr - dev});
    }
    return rep;
  }
  if (const auto* c = std::get_if<Channel>(&d)) {
    rep = validate(c->inner, tol);
    const bool single = c->inner.branches.size() == 1;
    rep.checks.push_back({"single_branch", single, single ? 0.0 : -1.0});
    return rep;
  }
  return validate(std::get<Instrument>(d), tol);
}

namespace {

const CpBranch& find_branch(const Instrument& i, const std::string& label) {
  for (const auto& [l, br] : i.branches)
    if (l == label) return br;
  throw std::invalid_argument("no branch with label '" + label + "'");
}

}  // namespace

ComplexMatrix apply_schrodinger(const Instrument& i, const std::string& label,
                                const ComplexMatrix& rho) {
  require(rho.rows() == i.d_in && rho.cols() == i.d_in,
          "apply_schrodinger: state dimension mismatch");
  const CpBranch& br = find_branch(i, label);
  const ComplexMatrix m = br.choi * kron(rho.transpose(), identity(i.d_out));
  return partial_trace(m, i.d_in, i.d_out, TraceSide::First);
}

ComplexMatrix apply_heisenberg(const Instrument& i, const std::string& label,
                               const ComplexMatrix& B) {
  require(B.rows() == i.d_out && B.cols() == i.d_out,
          "apply_heisenberg: observable dimension mismatch");
  const CpBranch& br = find_branch(i, label);
  const ComplexMatrix m = br.choi * kron(identity(i.d_in), B);
  return partial_trace(m, i.d_in, i.d_out, TraceSide::Second).transpose();
}

Dilation build_minimal_dilation(const Instrument& i, const Tolerance& tol) {
  const ValidationReport rep = validate(i, tol);
  if (!rep.valid())
    throw std::invalid_argument("build_minimal_dilation: invalid instrument: " +
                                rep.summary());
  std::vector<KrausSet> kraus;
  std::vector<int> mult;
  int R = 0;
  for (const auto& [label, br] : i.branches) {
    kraus.push_back(kraus_from_choi(br, tol));
    mult.push_back(static_cast<int>(kraus.back().operators.size()));
    R += mult.back();
  }
  ComplexMatrix Y = ComplexMatrix::Zero(static_cast<Eigen::Index>(i.d_out) * R,
                                        i.d_in);
  int offset = 0;
  for (std::size_t b = 0; b < kraus.size(); ++b) {
    for (int k = 0; k < mult[b]; ++k) {
      const ComplexMatrix& op = kraus[b].operators[k];
      const int s = offset + k;
      for (int j = 0; j < i.d_out; ++j)
        for (int m = 0; m < i.d_in; ++m)
          Y(static_cast<Eigen::Index>(j) * R + s, m) = op(j, m);
    }
    offset += mult[b];
  }
  return Dilation{std::move(Y), std::move(mult)};
}

ComplexMatrix dilation_heisenberg(const Dilation& dil, const Instrument& i,
                                  int branch, const ComplexMatrix& B) {
  const int R = static_cast<int>(dil.isometry.rows()) / i.d_out;
  require(branch >= 0 && branch < static_cast<int>(dil.multiplicities.size()),
          "dilation_heisenberg: branch out of range");
  int offset = 0;
  for (int b = 0; b < branch; ++b) offset += dil.multiplicities[b];
  ComplexMatrix proj = ComplexMatrix::Zero(R, R);
  for (int k = 0; k < dil.multiplicities[branch]; ++k)
    proj(offset + k, offset + k) = 1.0;
  return dil.isometry.adjoint() * kron(B, proj) * dil.isometry;
}

DeviceKind device_kind(const Device& d) {
  return static_cast<DeviceKind>(d.index());
}

int device_d_in(const Device& d) {
  switch (device_kind(d)) {
    case DeviceKind::Effect: return std::get<Effect>(d).dim;
    case DeviceKind::Povm: return std::get<Povm>(d).dim;
    case DeviceKind::Channel: return std::get<Channel>(d).inner.d_in;
    case DeviceKind::Instrument: return std::get<Instrument>(d).d_in;
  }
  return 0;
}

int device_d_out(const Device& d) {
  switch (device_kind(d)) {
    case DeviceKind::Effect:
    case DeviceKind::Povm: return 1;
    case DeviceKind::Channel: return std::get<Channel>(d).inner.d_out;
    case DeviceKind::Instrument: return std::get<Instrument>(d).d_out;
  }
  return 0;
}

Instrument to_instrument(const Device& d) {
  switch (device_kind(d)) {
    case DeviceKind::Effect: {
      const Effect& e = std::get<Effect>(d);
      Povm binary;
      binary.dim = e.dim;
      binary.outcomes.push_back({"1", e.matrix});
      binary.outcomes.push_back(
          {"0", ComplexMatrix(identity(e.dim) - e.matrix)});
      return povm_as_instrument(binary);
    }
    case DeviceKind::Povm:
      return povm_as_instrument(std::get<Povm>(d));
    case DeviceKind::Channel:
      return std::get<Channel>(d).inner;
    case DeviceKind::Instrument:
      return std::get<Instrument>(d);
  }
  throw std::logic_error("to_instrument: unreachable");
}

Device from_instrument(DeviceKind kind, const Instrument& i) {
  switch (kind) {
    case DeviceKind::Effect: {
      require(i.d_out == 1 && i.branches.size() == 2,
              "from_instrument: effect expects a binary discard instrument");
      return Effect{i.d_in,
                    ComplexMatrix(i.branches[0].second.choi.transpose())};
    }
    case DeviceKind::Povm: {
      require(i.d_out == 1, "from_instrument: povm expects d_out == 1");
      return instrument_associated_povm(i);
    }
    case DeviceKind::Channel: {
      require(i.branches.size() == 1,
              "from_instrument: channel expects a single branch");
      return Channel{i};
    }
    case DeviceKind::Instrument:
      return i;
  }
  throw std::logic_error("from_instrument: unreachable");
}

double device_distance(const Device& a, const Device& b) {
  const Instrument ia = to_instrument(a);
  const Instrument ib = to_instrument(b);
  require(ia.d_in == ib.d_in && ia.d_out == ib.d_out &&
              ia.branches.size() == ib.branches.size(),
          "device_distance: shape mismatch");
  double dist = 0.0;
  for (std::size_t k = 0; k < ia.branches.size(); ++k)
    dist = std::max(dist, max_norm(ia.branches[k].second.choi -
                                   ib.branches[k].second.choi));
  return dist;
}

}  // namespace qbary

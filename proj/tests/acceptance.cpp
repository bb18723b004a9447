// End-to-end acceptance gate.  Each criterion prints one PASS/FAIL line with
// its measured numbers; the process exits nonzero if any line fails.  All
// thresholds are pinned here, next to the check they gate.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "qbary/decompose.hpp"
#include "qbary/devices.hpp"
#include "qbary/extremality.hpp"
#include "qbary/qubitx.hpp"
#include "qbary/random.hpp"
#include "qbary/sphere.hpp"

using namespace qbary;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[ACCEPTANCE] C%d %s: %s  (%s)\n", idx, name,
              pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// C1/C2: spin-direction observable on the sphere.
// ---------------------------------------------------------------------------

void criterion_barycenter() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto regions = standard_regions();

  double worst64 = 0.0, worst128 = 0.0;
  {
    const SphereGrid full = SphereGrid::full(64, 128);
    const SphereGrid half = SphereGrid::half(64, 128);
    for (const auto& x : regions)
      worst64 = std::max(worst64,
                         max_norm(barycenter_over_halfsphere(x, half) -
                                  spin_direction_effect(x, full)));
  }
  {
    const SphereGrid full = SphereGrid::full(128, 256);
    const SphereGrid half = SphereGrid::half(128, 256);
    for (const auto& x : regions)
      worst128 = std::max(worst128,
                          max_norm(barycenter_over_halfsphere(x, half) -
                                   spin_direction_effect(x, full)));
  }
  const double secs = seconds_since(t0);
  const bool pass = worst64 <= 1e-3 && worst128 < worst64 && secs < 5.0;
  report(1, "barycenter matches smeared observable on 12 regions", pass,
         fmt("max err %.3g -> %.3g under refinement, %.2f s", worst64,
             worst128, secs));
}

void criterion_moment_split() {
  const SphereGrid full = SphereGrid::full(64, 128);
  const double moment = max_norm(cos2phi_moment(full));
  double worst_mix = 0.0;
  for (const auto& x : standard_regions()) {
    const auto [plus, minus] = dplus_dminus_split(x, full);
    worst_mix = std::max(worst_mix,
                         max_norm(0.5 * plus + 0.5 * minus -
                                  spin_direction_effect(x, full)));
  }
  const bool pass = moment <= 1e-10 && worst_mix <= 1e-6;
  report(2, "cos(2 phi) moment vanishes and the split mixes back", pass,
         fmt("moment %.3g, worst mix error %.3g", moment, worst_mix));
}

// ---------------------------------------------------------------------------
// C3: closed-form qubit effect decomposition.
// ---------------------------------------------------------------------------

void criterion_effect_formula() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(211);
  const int n = 10000;
  double worst_recon = 0.0, worst_sum = 0.0, min_weight = 1.0;
  for (int i = 0; i < n; ++i) {
    BlochEffect b;
    b.e0 = rng.uniform(0.0, 2.0);
    b.e = rng.uniform(0.0, 0.999) * std::min(b.e0, 2.0 - b.e0) *
          rng.unit_vector3();
    const EffectDecomposition dec = decompose_effect(b);
    min_weight = std::min({min_weight, dec.w_identity, dec.w_zero,
                           dec.w_projection});
    worst_sum = std::max(worst_sum, std::abs(dec.w_identity + dec.w_zero +
                                             dec.w_projection - 1.0));
    ComplexMatrix rebuilt = dec.w_identity * ComplexMatrix::Identity(2, 2);
    if (dec.projection) rebuilt += dec.w_projection * *dec.projection;
    worst_recon = std::max(
        worst_recon, max_norm(rebuilt - effect_from_bloch(b).matrix));
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_recon <= 1e-12 && worst_sum <= 1e-12 &&
                    min_weight >= 0.0 && secs < 2.0;
  report(3, "closed-form effect decomposition on 10^4 samples", pass,
         fmt("recon %.3g, weight sum dev %.3g, min weight %.3g, %.2f s",
             worst_recon, worst_sum, min_weight, secs));
}

// ---------------------------------------------------------------------------
// C4: closed-form two-Kraus criterion against a rank oracle.
// ---------------------------------------------------------------------------

void criterion_two_kraus_oracle() {
  Rng rng(223);
  const int n = 1000;
  int checked = 0, agreed = 0, borderline = 0, inapplicable = 0;
  for (int i = 0; i < n; ++i) {
    const Channel c = rng.random_channel(2, 2, 2);
    const KrausSet ks = kraus_from_choi(c.inner.branches[0].second);
    if (ks.operators.size() != 2) continue;  // rank-degenerate draw

    const QubitChannelReport quick = qubit_channel_condition(ks);
    if (quick.verdict == QubitChannelVerdict::NotApplicable) {
      ++inapplicable;
      continue;
    }
    // Independent oracle: the four products K_i^dag K_j stacked as columns;
    // the channel is extreme iff they are linearly independent.
    Eigen::MatrixXcd m(4, 4);
    int col = 0;
    for (const auto& ki : ks.operators)
      for (const auto& kj : ks.operators)
        m.col(col++) = vectorize(ki.adjoint() * kj);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double ratio = svd.singularValues()(3) / svd.singularValues()(0);
    const bool oracle_extreme = ratio > 1e-8;
    const bool oracle_borderline = ratio > 1e-10 && ratio < 1e-6;

    if (quick.borderline || oracle_borderline ||
        quick.margin <= 10.0 * Tolerance().threshold(1.0)) {
      ++borderline;
      continue;
    }
    ++checked;
    if ((quick.verdict == QubitChannelVerdict::Extreme) == oracle_extreme)
      ++agreed;
  }
  const bool pass = checked >= 800 && agreed == checked;
  report(4, "two-Kraus criterion agrees with the rank oracle", pass,
         fmt("%d/%d agree, %d borderline, %d inapplicable", agreed, checked,
             borderline, inapplicable));
}

// ---------------------------------------------------------------------------
// C5: the parametrized channel family is extreme iff a != b and q != r.
// ---------------------------------------------------------------------------

void criterion_channel_family() {
  Rng rng(227);
  const int n = 1000;
  int checked = 0, agreed = 0, borderline = 0;
  for (int i = 0; i < n; ++i) {
    ExtremeChannelParams params;
    params.p = rng.unit_vector3();
    params.q = rng.unit_vector3();
    params.r = rng.unit_vector3();
    params.a = rng.uniform(0.05, 0.95);
    params.b = rng.uniform(0.05, 0.95);
    params.theta1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    params.theta2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    params.phi1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    params.phi2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double plant = rng.uniform();
    if (plant < 0.15)
      params.b = params.a;
    else if (plant < 0.30)
      params.r = params.q;

    const bool expected =
        params.a != params.b && (params.q - params.r).norm() != 0.0;
    const ExtremalityReport rep = is_extreme(Device{extreme_channel(params)});
    if (rep.borderline) {
      ++borderline;
      continue;
    }
    ++checked;
    if (rep.extreme == expected) ++agreed;
  }
  const bool pass = checked >= 900 && agreed == checked;
  report(5, "channel family classification incl. planted degeneracies", pass,
         fmt("%d/%d agree, %d borderline", agreed, checked, borderline));
}

// ---------------------------------------------------------------------------
// C6/C7: decomposition round trip and the support bound on its output.
// ---------------------------------------------------------------------------

void criterion_decomposition_roundtrip() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(229);
  std::vector<Device> samples;
  for (int i = 0; i < 200; ++i) {
    samples.push_back(Device{rng.random_povm(2, rng.uniform_int(2, 6))});
    samples.push_back(Device{rng.random_channel(2, 2, rng.uniform_int(1, 4))});
    samples.push_back(
        Device{rng.random_instrument(2, 2, rng.uniform_int(2, 4))});
  }

  int bad_weight = 0, bad_recon = 0, bad_extreme = 0, aborted = 0;
  int support_violations = 0;
  std::size_t component_total = 0;
  double worst_recon = 0.0;
  for (const Device& d : samples) {
    DiscreteDecomposition dec;
    try {
      dec = decompose_extremal(d);
    } catch (const std::exception&) {
      ++aborted;
      continue;
    }
    component_total += dec.components.size();
    double total = 0.0;
    for (const auto& c : dec.components) total += c.weight;
    if (std::abs(total - 1.0) > 1e-10) ++bad_weight;
    const double err = reconstruction_error(dec, d);
    worst_recon = std::max(worst_recon, err);
    if (err > 1e-8) ++bad_recon;
    for (const auto& c : dec.components) {
      if (!is_extreme(c.device).extreme) {
        ++bad_extreme;
        continue;
      }
      try {
        if (!extreme_support_bound_check(to_instrument(c.device)))
          ++support_violations;
      } catch (const std::logic_error&) {
        ++support_violations;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool pass6 = aborted == 0 && bad_weight == 0 && bad_recon == 0 &&
                     bad_extreme == 0 && secs < 60.0;
  report(6, "decomposition round trip on 600 random devices", pass6,
         fmt("%zu components, worst recon %.3g, %d aborted, %d weight, "
             "%d recon, %d non-extreme, %.1f s",
             component_total, worst_recon, aborted, bad_weight, bad_recon,
             bad_extreme, secs));
  report(7, "support bound on every extreme component", support_violations == 0,
         fmt("%d violations over %zu components", support_violations,
             component_total));
}

// ---------------------------------------------------------------------------
// C8: minimal dilation reproduces the Heisenberg action.
// ---------------------------------------------------------------------------

void criterion_dilation() {
  Rng rng(233);
  double worst_isometry = 0.0, worst_action = 0.0;
  bool sizes_ok = true;
  for (int i = 0; i < 100; ++i) {
    const int d_in = rng.uniform_int(2, 3);
    const int d_out = rng.uniform_int(1, 3);
    const Instrument instr =
        rng.random_instrument(d_in, d_out, rng.uniform_int(2, 4));
    const Dilation dil = build_minimal_dilation(instr);

    const ComplexMatrix y = dil.isometry;
    worst_isometry = std::max(
        worst_isometry,
        max_norm(y.adjoint() * y - ComplexMatrix::Identity(d_in, d_in)));
    for (int r : dil.multiplicities)
      sizes_ok = sizes_ok && r <= d_in * d_out;

    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix g = rng.ginibre(d_out, d_out);
      const ComplexMatrix b = (g + g.adjoint()) / 2.0;
      const int branch = rng.uniform_int(0, int(instr.branches.size()) - 1);
      worst_action = std::max(
          worst_action,
          max_norm(dilation_heisenberg(dil, instr, branch, b) -
                   apply_heisenberg(instr, instr.branches[branch].first, b)));
    }
  }
  const bool pass =
      worst_isometry <= 1e-10 && worst_action <= 1e-9 && sizes_ok;
  report(8, "minimal dilation reproduces the Heisenberg action", pass,
         fmt("isometry dev %.3g, action dev %.3g, blocks %s", worst_isometry,
             worst_action, sizes_ok ? "within bound" : "too large"));
}

// ---------------------------------------------------------------------------
// C9: sharp observables are extreme, proper mixtures are not.
// ---------------------------------------------------------------------------

void criterion_pvm() {
  Rng rng(239);
  int sharp_wrong = 0, mixture_wrong = 0;
  for (int i = 0; i < 50; ++i) {
    const int dim = 2 + i % 2;
    const Povm pvm = rng.random_pvm(dim, dim);
    if (!is_extreme(Device{pvm}).extreme) ++sharp_wrong;

    Povm first = rng.random_pvm(dim, dim);
    Povm second = rng.random_pvm(dim, dim);
    while (device_distance(Device{first}, Device{second}) < 1e-6)
      second = rng.random_pvm(dim, dim);
    Povm mix = first;
    for (std::size_t k = 0; k < mix.outcomes.size(); ++k)
      mix.outcomes[k].second =
          0.5 * first.outcomes[k].second + 0.5 * second.outcomes[k].second;
    if (is_extreme(Device{mix}).extreme) ++mixture_wrong;
  }
  const bool pass = sharp_wrong == 0 && mixture_wrong == 0;
  report(9, "sharp observables extreme, proper mixtures not", pass,
         fmt("%d sharp misclassified, %d mixtures misclassified", sharp_wrong,
             mixture_wrong));
}

}  // namespace

int main() {
  criterion_barycenter();
  criterion_moment_split();
  criterion_effect_formula();
  criterion_two_kraus_oracle();
  criterion_channel_family();
  criterion_decomposition_roundtrip();
  criterion_dilation();
  criterion_pvm();
  if (g_failures == 0) {
    std::printf("[ACCEPTANCE] all criteria passed\n");
    return 0;
  }
  std::printf("[ACCEPTANCE] %d criteria failed\n", g_failures);
  return 1;
}

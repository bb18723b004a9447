// Command-line front door for the toolkit: validation, extremality checks,
// barycentric decomposition and the three demo suites, all reporting JSON.
//
// Exit codes: 0 success, 2 device invalid / component budget exceeded,
// 1 I/O, schema or usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qbary/decompose.hpp"
#include "qbary/io.hpp"
#include "qbary/qubitx.hpp"
#include "qbary/random.hpp"
#include "qbary/sphere.hpp"

using namespace qbary;
using nlohmann::json;

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string csv;
  std::string grid = "64x128";
  double atol = 1e-10;
  double rtol = 1e-10;
  std::uint64_t seed = 1;
  int max_components = 1024;
  int samples = 0;
  double e0 = -1.0;
  std::vector<double> e;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw SchemaError(path + ": " + err.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

json device_summary(const Device& d) {
  return json{{"type", device_to_json(d).at("type")},
              {"d_in", device_d_in(d)},
              {"d_out", device_d_out(d)},
              {"outcomes", to_instrument(d).branches.size()}};
}

json header(const char* command, const Options& opt) {
  return json{{"command", command}, {"atol", opt.atol}, {"rtol", opt.rtol}};
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto sep = s.find('x');
  if (sep != std::string::npos) {
    try {
      const int nt = std::stoi(s.substr(0, sep));
      const int np = std::stoi(s.substr(sep + 1));
      return {nt, np};
    } catch (const std::exception&) {
    }
  }
  throw std::runtime_error("--grid expects NxM, e.g. 64x128");
}

json vector3_to_json(const Eigen::Vector3d& v) {
  return json::array({v(0), v(1), v(2)});
}

const char* verdict_name(QubitChannelVerdict v) {
  switch (v) {
    case QubitChannelVerdict::Extreme: return "extreme";
    case QubitChannelVerdict::NotExtreme: return "not_extreme";
    default: return "not_applicable";
  }
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

int cmd_validate(const Options& opt) {
  const Tolerance tol(opt.atol, opt.rtol);
  const Device d = device_from_json(load_json(opt.input));
  const ValidationReport report = validate(d, tol);
  json out = header("validate", opt);
  out["input"] = opt.input;
  out["device"] = device_summary(d);
  out["validation"] = validation_to_json(report);
  write_text(opt.output, out.dump(2) + "\n");
  return report.valid() ? 0 : 2;
}

int cmd_extremal(const Options& opt) {
  const Tolerance tol(opt.atol, opt.rtol);
  const Device d = device_from_json(load_json(opt.input));
  const ValidationReport vr = validate(d, tol);
  json out = header("extremal", opt);
  out["input"] = opt.input;
  out["device"] = device_summary(d);
  out["validation"] = validation_to_json(vr);
  if (!vr.valid()) {
    write_text(opt.output, out.dump(2) + "\n");
    return 2;
  }
  const ExtremalityReport report = is_extreme(d, tol);
  out["extremality"] = extremality_to_json(report);
  write_text(opt.output, out.dump(2) + "\n");
  return 0;
}

int cmd_decompose(const Options& opt) {
  const Tolerance tol(opt.atol, opt.rtol);
  const Device d = device_from_json(load_json(opt.input));
  const ValidationReport vr = validate(d, tol);
  json out = header("decompose", opt);
  out["input"] = opt.input;
  out["device"] = device_summary(d);
  out["validation"] = validation_to_json(vr);
  if (!vr.valid()) {
    write_text(opt.output, out.dump(2) + "\n");
    return 2;
  }
  DiscreteDecomposition dec;
  try {
    dec = decompose_extremal(d, tol, opt.max_components);
  } catch (const DecomposeLimitError& err) {
    out["error"] = err.what();
    out["max_components"] = opt.max_components;
    write_text(opt.output, out.dump(2) + "\n");
    return 2;
  }
  bool all_extreme = true;
  for (const auto& c : dec.components)
    all_extreme = all_extreme && is_extreme(c.device, tol).extreme;
  const double err = reconstruction_error(dec, d);
  out["decomposition"] = decomposition_to_json(dec, err, all_extreme);
  write_text(opt.output, out.dump(2) + "\n");
  return 0;
}

int cmd_demo_sphere(const Options& opt) {
  const auto [n_theta, n_phi] = parse_grid(opt.grid);
  const SphereGrid full = SphereGrid::full(n_theta, n_phi);
  const SphereGrid half = SphereGrid::half(n_theta, n_phi);

  json out = header("demo-sphere", opt);
  out["grid"] = json{{"n_theta", n_theta}, {"n_phi", n_phi}};
  out["cos2phi_moment_max_norm"] = max_norm(cos2phi_moment(full));

  json regions = json::array();
  double max_bary = 0.0;
  double max_mix = 0.0;
  std::ostringstream csv;
  csv << "region,barycenter_error,split_mix_error\n";
  for (const BorelRegion& x : standard_regions()) {
    const Eigen::Matrix2cd smeared = spin_direction_effect(x, full);
    const double bary_err =
        max_norm(barycenter_over_halfsphere(x, half) - smeared);
    const auto [plus, minus] = dplus_dminus_split(x, full);
    const double mix_err = max_norm(0.5 * plus + 0.5 * minus - smeared);
    max_bary = std::max(max_bary, bary_err);
    max_mix = std::max(max_mix, mix_err);
    regions.push_back(json{{"name", x.name},
                           {"barycenter_error", bary_err},
                           {"split_mix_error", mix_err}});
    csv << x.name << ',' << bary_err << ',' << mix_err << '\n';
    if (x.name == "cos2phi_band")
      out["split_difference_on_band"] = max_norm(plus - minus);
  }
  out["max_barycenter_error"] = max_bary;
  out["max_split_mix_error"] = max_mix;
  out["regions"] = std::move(regions);

  if (!opt.csv.empty()) write_text(opt.csv, csv.str());
  write_text(opt.output, out.dump(2) + "\n");
  return 0;
}

json effect_line(const BlochEffect& b) {
  const EffectDecomposition dec = decompose_effect(b);
  ComplexMatrix rebuilt = dec.w_identity * ComplexMatrix::Identity(2, 2);
  json line;
  line["e0"] = b.e0;
  line["e"] = vector3_to_json(b.e);
  line["weights"] = json{{"identity", dec.w_identity},
                         {"zero", dec.w_zero},
                         {"projection", dec.w_projection}};
  if (dec.projection) {
    rebuilt += dec.w_projection * *dec.projection;
    Eigen::Vector3d axis;
    for (int k = 0; k < 3; ++k)
      axis(k) = (*dec.projection * pauli(k + 1)).trace().real();
    line["projection_axis"] = vector3_to_json(axis);
  }
  line["reconstruction_error"] =
      max_norm(rebuilt - effect_from_bloch(b).matrix);
  return line;
}

int cmd_demo_qubit_effect(const Options& opt) {
  if (opt.samples <= 0) {
    if (opt.e0 < 0.0 || opt.e.size() != 3)
      throw std::runtime_error(
          "demo-qubit-effect needs either --samples or --e0 plus --e x,y,z");
    BlochEffect b;
    b.e0 = opt.e0;
    b.e = Eigen::Vector3d(opt.e[0], opt.e[1], opt.e[2]);
    json out = header("demo-qubit-effect", opt);
    out.update(effect_line(b));
    write_text(opt.output, out.dump(2) + "\n");
    return 0;
  }

  json head = header("demo-qubit-effect", opt);
  head["rng"] = "mt19937_64";
  head["seed"] = opt.seed;
  head["samples"] = opt.samples;
  std::vector<std::string> lines(opt.samples);
  std::vector<double> errors(opt.samples, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < opt.samples; ++i) {
    Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(i)));
    BlochEffect b;
    b.e0 = rng.uniform(0.0, 2.0);
    b.e = rng.uniform() * std::min(b.e0, 2.0 - b.e0) * rng.unit_vector3();
    json line = effect_line(b);
    line["index"] = i;
    errors[i] = line.at("reconstruction_error").get<double>();
    lines[i] = line.dump();
  }
  std::ostringstream text;
  text << head.dump() << '\n';
  for (const auto& line : lines) text << line << '\n';
  json foot;
  foot["max_reconstruction_error"] =
      *std::max_element(errors.begin(), errors.end());
  text << foot.dump() << '\n';
  write_text(opt.output, text.str());
  return 0;
}

int cmd_demo_qubit_channel(const Options& opt) {
  const Tolerance tol(opt.atol, opt.rtol);
  const int n = opt.samples > 0 ? opt.samples : 200;
  json head = header("demo-qubit-channel", opt);
  head["rng"] = "mt19937_64";
  head["seed"] = opt.seed;
  head["samples"] = n;

  std::vector<std::string> lines(n);
  std::vector<int> tally(4, 0);  // checked, consistent, borderline, n/a
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(i)));
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
      params.b = params.a;  // rank-degenerate pair: condition not applicable
    else if (plant < 0.30)
      params.r = params.q;  // aligned axes: never extreme

    const QubitChannelReport quick =
        qubit_channel_condition(extreme_channel_kraus(params), tol);
    const ExtremalityReport full =
        is_extreme(Device{extreme_channel(params)}, tol);

    json line;
    line["index"] = i;
    line["a"] = params.a;
    line["b"] = params.b;
    line["q"] = vector3_to_json(params.q);
    line["r"] = vector3_to_json(params.r);
    line["verdict"] = verdict_name(quick.verdict);
    line["margin"] = quick.margin;
    line["eigengap"] = quick.eigengap;
    line["borderline"] = quick.borderline || full.borderline;
    line["extreme_full_rank_check"] = full.extreme;
    const bool applicable =
        quick.verdict != QubitChannelVerdict::NotApplicable;
    if (applicable && !quick.borderline && !full.borderline) {
      const bool consistent =
          (quick.verdict == QubitChannelVerdict::Extreme) == full.extreme;
      line["consistent"] = consistent;
#pragma omp critical
      {
        ++tally[0];
        tally[1] += consistent ? 1 : 0;
      }
    } else {
      line["consistent"] = nullptr;
#pragma omp critical
      {
        tally[2] += (quick.borderline || full.borderline) ? 1 : 0;
        tally[3] += applicable ? 0 : 1;
      }
    }
    lines[i] = line.dump();
  }

  std::ostringstream text;
  text << head.dump() << '\n';
  for (const auto& line : lines) text << line << '\n';
  json foot;
  foot["checked"] = tally[0];
  foot["consistent"] = tally[1];
  foot["borderline"] = tally[2];
  foot["not_applicable"] = tally[3];
  text << foot.dump() << '\n';
  write_text(opt.output, text.str());
  return tally[0] == tally[1] ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional quantum device toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", opt.output, "report file (default: stdout)");
    cmd->add_option("--atol", opt.atol, "absolute tolerance");
    cmd->add_option("--rtol", opt.rtol, "relative tolerance");
  };
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", opt.input, "device JSON file")->required();
  };

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check device invariants");
  add_common(validate_cmd);
  add_input(validate_cmd);

  CLI::App* extremal_cmd =
      app.add_subcommand("extremal", "test whether a device is extreme");
  add_common(extremal_cmd);
  add_input(extremal_cmd);

  CLI::App* decompose_cmd = app.add_subcommand(
      "decompose", "decompose a device into extreme components");
  add_common(decompose_cmd);
  add_input(decompose_cmd);
  decompose_cmd->add_option("--max-components", opt.max_components,
                            "component budget");

  CLI::App* sphere_cmd = app.add_subcommand(
      "demo-sphere", "spin-direction observable barycenter demo");
  add_common(sphere_cmd);
  sphere_cmd->add_option("--grid", opt.grid, "quadrature grid, NxM");
  sphere_cmd->add_option("--csv", opt.csv, "per-region CSV table");

  CLI::App* effect_cmd = app.add_subcommand(
      "demo-qubit-effect", "closed-form qubit effect decomposition");
  add_common(effect_cmd);
  effect_cmd->add_option("--e0", opt.e0, "identity coefficient");
  effect_cmd->add_option("--e", opt.e, "Bloch vector x,y,z")->delimiter(',');
  effect_cmd->add_option("--samples", opt.samples, "random effect count");
  effect_cmd->add_option("--seed", opt.seed, "RNG seed");

  CLI::App* channel_cmd = app.add_subcommand(
      "demo-qubit-channel", "two-Kraus channel family classification");
  add_common(channel_cmd);
  channel_cmd->add_option("--samples", opt.samples, "random channel count");
  channel_cmd->add_option("--seed", opt.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(opt);
    if (extremal_cmd->parsed()) return cmd_extremal(opt);
    if (decompose_cmd->parsed()) return cmd_decompose(opt);
    if (sphere_cmd->parsed()) return cmd_demo_sphere(opt);
    if (effect_cmd->parsed()) return cmd_demo_qubit_effect(opt);
    if (channel_cmd->parsed()) return cmd_demo_qubit_channel(opt);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

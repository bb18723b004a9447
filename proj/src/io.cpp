#include "qbary/io.hpp"

namespace qbary {

using nlohmann::json;

nlohmann::json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Complex complex_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    fail(path, "expected a complex scalar [re, im]");
  return Complex(number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]"));
}

int int_field(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path, std::string("missing \"") + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    fail(path + "." + key, "expected a positive integer");
  return v.get<int>();
}

}  // namespace

ComplexMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  ComplexMatrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.empty()) fail(rpath, "expected a nonempty row");
    if (i == 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(rpath, "ragged matrix rows");
    }
    for (std::size_t k = 0; k < cols; ++k)
      m(i, k) = complex_from_json(row[k], rpath + "[" + std::to_string(k) + "]");
  }
  if (!all_finite(m)) fail(path, "matrix entries must be finite");
  return m;
}

nlohmann::json device_to_json(const Device& d) {
  const char* type = nullptr;
  switch (device_kind(d)) {
    case DeviceKind::Effect: type = "effect"; break;
    case DeviceKind::Povm: type = "povm"; break;
    case DeviceKind::Channel: type = "channel"; break;
    case DeviceKind::Instrument: type = "instrument"; break;
  }
  const Instrument i = to_instrument(d);
  json outcomes = json::array();
  if (device_kind(d) == DeviceKind::Effect) {
    // Effects are a single declared outcome; the complement branch that
    // to_instrument adds is not serialized.
    outcomes.push_back({{"label", i.branches[0].first},
                        {"choi", matrix_to_json(i.branches[0].second.choi)}});
  } else {
    for (const auto& [label, br] : i.branches)
      outcomes.push_back({{"label", label}, {"choi", matrix_to_json(br.choi)}});
  }
  return json{{"type", type},
              {"d_in", i.d_in},
              {"d_out", i.d_out},
              {"outcomes", std::move(outcomes)}};
}

Device device_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a device object");
  if (!j.contains("type") || !j.at("type").is_string())
    fail(path, "missing string field \"type\"");
  const std::string type = j.at("type").get<std::string>();
  const int d_in = int_field(j, "d_in", path);
  const int d_out = int_field(j, "d_out", path);
  if (!j.contains("outcomes") || !j.at("outcomes").is_array() ||
      j.at("outcomes").empty())
    fail(path, "missing nonempty array \"outcomes\"");
  const json& outcomes = j.at("outcomes");

  Instrument instr;
  instr.d_in = d_in;
  instr.d_out = d_out;
  const Eigen::Index choi_dim = static_cast<Eigen::Index>(d_in) * d_out;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const json& o = outcomes[k];
    const std::string opath = path + ".outcomes[" + std::to_string(k) + "]";
    if (!o.is_object()) fail(opath, "expected an outcome object");
    if (!o.contains("label") || !o.at("label").is_string())
      fail(opath, "missing string field \"label\"");
    const bool has_kraus = o.contains("kraus");
    const bool has_choi = o.contains("choi");
    if (has_kraus == has_choi)
      fail(opath, "exactly one of \"kraus\"/\"choi\" is required");
    CpBranch br;
    if (has_choi) {
      const ComplexMatrix m = matrix_from_json(o.at("choi"), opath + ".choi");
      if (m.rows() != choi_dim || m.cols() != choi_dim)
        fail(opath + ".choi", "expected a " + std::to_string(choi_dim) + "x" +
                                  std::to_string(choi_dim) + " matrix");
      br = CpBranch{d_in, d_out, m};
    } else {
      const json& ops = o.at("kraus");
      if (!ops.is_array() || ops.empty())
        fail(opath + ".kraus", "expected a nonempty array of matrices");
      KrausSet ks{d_in, d_out, {}};
      for (std::size_t l = 0; l < ops.size(); ++l) {
        const std::string kpath =
            opath + ".kraus[" + std::to_string(l) + "]";
        const ComplexMatrix op = matrix_from_json(ops[l], kpath);
        if (op.rows() != d_out || op.cols() != d_in)
          fail(kpath, "expected a d_out x d_in matrix");
        ks.operators.push_back(op);
      }
      br = choi_from_kraus(ks);
    }
    instr.branches.push_back({o.at("label").get<std::string>(), std::move(br)});
  }

  if (type == "instrument") return instr;
  if (type == "channel") {
    if (instr.branches.size() != 1)
      fail(path, "a channel must have exactly one outcome");
    return Channel{std::move(instr)};
  }
  if (type == "povm") {
    if (d_out != 1) fail(path, "a povm must have d_out = 1");
    return instrument_associated_povm(instr);
  }
  if (type == "effect") {
    if (d_out != 1) fail(path, "an effect must have d_out = 1");
    if (instr.branches.size() != 1)
      fail(path, "an effect must have exactly one outcome");
    return Effect{d_in,
                  ComplexMatrix(instr.branches[0].second.choi.transpose())};
  }
  fail(path + ".type", "unknown device type \"" + type + "\"");
}

nlohmann::json validation_to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"margin", c.margin}});
  return json{{"valid", r.valid()}, {"invariants", std::move(checks)}};
}

nlohmann::json extremality_to_json(const ExtremalityReport& r) {
  return json{{"extreme", r.extreme},
              {"borderline", r.borderline},
              {"margin", r.margin},
              {"basis_dim", r.basis_dim}};
}

nlohmann::json decomposition_to_json(const DiscreteDecomposition& dec,
                                     double recon_error,
                                     bool all_components_extreme) {
  json comps = json::array();
  for (const auto& c : dec.components)
    comps.push_back(
        {{"weight", c.weight}, {"device", device_to_json(c.device)}});
  return json{{"components", std::move(comps)},
              {"reconstruction_error", recon_error},
              {"all_components_extreme", all_components_extreme},
              {"meta", json{{"iterations", dec.iterations},
                            {"max_face_depth", dec.max_face_depth}}}};
}

}  // namespace qbary

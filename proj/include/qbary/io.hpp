#pragma once

#include <json.hpp>

#include "qbary/decompose.hpp"
#include "qbary/extremality.hpp"

namespace qbary {

// JSON conventions:
//   complex scalar  -> [re, im]
//   matrix          -> array of rows
//   device          -> {"type": "povm"|"channel"|"instrument"|"effect",
//                       "d_in": int, "d_out": int,
//                       "outcomes": [{"label": str, "kraus": [...]}
//                                    or {"label": str, "choi": [[...]]}]}
// Every outcome carries exactly one of "kraus"/"choi".  For effects and POVMs
// the branch has d_out = 1, so its Choi matrix is the transposed effect.
// Parse errors throw SchemaError with a JSON-pointer-style path.

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json complex_to_json(const Complex& z);
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json device_to_json(const Device& d);
Device device_from_json(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json validation_to_json(const ValidationReport& r);
nlohmann::json extremality_to_json(const ExtremalityReport& r);
nlohmann::json decomposition_to_json(const DiscreteDecomposition& dec,
                                     double reconstruction_error,
                                     bool all_components_extreme);

}  // namespace qbary

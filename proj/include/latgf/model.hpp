#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "latgf/lattice.hpp"

namespace latgf {

struct Model {
  std::string id;
  StepDistribution D;
};

class SchemaError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Parses {"dim": d, "orbits": [{"point": [..], "weight": w}, ...]}; each
/// orbit representative is expanded to its full symmetry orbit.
inline StepDistribution parse_model_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("model spec: not valid JSON: ") + e.what());
  }
  auto fail = [](const std::string& field, const std::string& what) {
    throw SchemaError("model spec: field '" + field + "' " + what);
  };
  if (!j.is_object()) fail("<root>", "must be an object");
  if (!j.contains("dim")) fail("dim", "is missing");
  if (!j["dim"].is_number_integer()) fail("dim", "must be an integer");
  const int dim = j["dim"].get<int>();
  if (dim < 3 || dim > kMaxDim) fail("dim", "must lie in [3, " + std::to_string(kMaxDim) + "]");
  if (!j.contains("orbits")) fail("orbits", "is missing");
  if (!j["orbits"].is_array() || j["orbits"].empty()) fail("orbits", "must be a nonempty array");
  std::vector<StepDistribution::Orbit> orbits;
  for (std::size_t i = 0; i < j["orbits"].size(); ++i) {
    const auto& o = j["orbits"][i];
    const std::string at = "orbits[" + std::to_string(i) + "]";
    if (!o.is_object()) fail(at, "must be an object");
    if (!o.contains("point")) fail(at + ".point", "is missing");
    if (!o["point"].is_array()) fail(at + ".point", "must be an array of integers");
    if (static_cast<int>(o["point"].size()) != dim) fail(at + ".point", "must have length dim = " + std::to_string(dim));
    LatticePoint p(dim);
    for (int c = 0; c < dim; ++c) {
      if (!o["point"][c].is_number_integer()) fail(at + ".point", "must be an array of integers");
      p[c] = o["point"][c].get<int>();
    }
    if (!o.contains("weight")) fail(at + ".weight", "is missing");
    if (!o["weight"].is_number()) fail(at + ".weight", "must be a number");
    orbits.push_back({p, o["weight"].get<double>()});
  }
  try {
    return StepDistribution::from_orbits(dim, orbits);
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("model spec: field 'orbits' ") + e.what());
  }
}

/// "srw", "spread-out-R" (R >= 1) or a path to a model-spec JSON file.
/// Built-ins take their dimension from `dim`; a file must agree with it.
inline Model load_model(const std::string& spec, int dim) {
  if (spec == "srw") return {"srw", simple_random_walk(dim)};
  const std::string prefix = "spread-out-";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string rs = spec.substr(prefix.size());
    int R = 0;
    try {
      std::size_t used = 0;
      R = std::stoi(rs, &used);
      require(used == rs.size(), "");
    } catch (...) {
      throw InvalidArgument("model: '" + spec + "' is not of the form spread-out-R with integer R");
    }
    return {spec, spread_out_walk(dim, R)};
  }
  std::ifstream in(spec);
  if (!in) throw InvalidArgument("model: '" + spec + "' is neither a built-in (srw, spread-out-R) nor a readable file");
  std::stringstream buf;
  buf << in.rdbuf();
  auto D = parse_model_json(buf.str());
  if (D.dim() != dim)
    throw SchemaError("model spec: field 'dim' is " + std::to_string(D.dim()) + " but --dim is " + std::to_string(dim));
  return {spec, D};
}

}  // namespace latgf

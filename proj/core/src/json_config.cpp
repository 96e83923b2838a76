// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sureid/estimator.hpp"
#include "sureid/noise_model.hpp"

namespace sureid {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument(what + ": unknown field '" + it.key() + "'");
  }
}

double get_num(const json& j, const std::string& key) {
  if (!j.contains(key))
    throw std::invalid_argument("missing required field '" + key + "'");
  return j.at(key).get<double>();
}

double get_num_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

JumpSpec jump_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian") {
    require_keys(j, {"type", "mean", "sd"}, "jump spec");
    return gaussian_jumps(get_num_or(j, "mean", 0.0), get_num(j, "sd"));
  }
  if (type == "uniform") {
    require_keys(j, {"type", "lo", "hi"}, "jump spec");
    return uniform_jumps(get_num(j, "lo"), get_num(j, "hi"));
  }
  if (type == "exponential") {
    require_keys(j, {"type", "rate"}, "jump spec");
    return exponential_jumps(get_num(j, "rate"));
  }
  throw std::invalid_argument("jump spec: unknown type '" + type + "'");
}

JumpComponent density_component_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") {
    require_keys(j, {"type", "lo", "hi", "mass"}, "jump density");
    const double lo = get_num(j, "lo");
    const double hi = get_num(j, "hi");
    const double mass = get_num(j, "mass");
    if (!(lo < hi)) throw std::invalid_argument("jump density: lo >= hi");
    const double level = mass / (hi - lo);
    return JumpComponent(
        [lo, hi, level](double u) { return (u >= lo && u <= hi) ? level : 0.0; },
        lo, hi, mass);
  }
  if (type == "gaussian") {
    require_keys(j, {"type", "center", "sd", "mass"}, "jump density");
    const double center = get_num(j, "center");
    const double sd = get_num(j, "sd");
    const double mass = get_num(j, "mass");
    if (!(sd > 0.0)) throw std::invalid_argument("jump density: sd <= 0");
    auto f = [center, sd, mass](double u) {
      const double z = (u - center) / sd;
      return mass * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
    };
    return JumpComponent(f, center - 12.0 * sd, center + 12.0 * sd);
  }
  throw std::invalid_argument("jump density: unknown type '" + type + "'");
}

NoiseModel model_from_json_obj(const json& j) {
  if (!j.is_object())
    throw std::invalid_argument("model config must be a JSON object");
  const std::string family = j.at("family").get<std::string>();

  NoiseModel m = NoiseModel::normal(1.0);
  if (family == "normal") {
    require_keys(j, {"family", "variance", "scale", "shift"}, "normal model");
    m = NoiseModel::normal(get_num_or(j, "variance", 1.0));
  } else if (family == "laplace") {
    require_keys(j, {"family", "s", "scale", "shift"}, "laplace model");
    m = NoiseModel::laplace(get_num_or(j, "s", 1.0));
  } else if (family == "gamma") {
    require_keys(j, {"family", "t", "scale", "shift"}, "gamma model");
    m = NoiseModel::centered_gamma(get_num(j, "t"));
  } else if (family == "sech") {
    require_keys(j, {"family", "scale", "shift"}, "sech model");
    m = NoiseModel::sech();
  } else if (family == "uniform") {
    require_keys(j, {"family", "halfwidth", "scale", "shift"}, "uniform model");
    m = NoiseModel::uniform(get_num_or(j, "halfwidth", 1.0));
  } else if (family == "compound_poisson") {
    require_keys(j, {"family", "rate", "jump", "scale", "shift"},
                 "compound_poisson model");
    if (!j.contains("jump"))
      throw std::invalid_argument("compound_poisson model: missing 'jump'");
    m = NoiseModel::compound_poisson(get_num(j, "rate"),
                                     jump_from_json(j.at("jump")));
  } else if (family == "generic_id") {
    require_keys(j, {"family", "drift", "gaussian_var", "atoms", "densities",
                     "scale", "shift"},
                 "generic_id model");
    LevyTriple t;
    t.drift = get_num_or(j, "drift", 0.0);
    t.gaussian_var = get_num_or(j, "gaussian_var", 0.0);
    std::vector<JumpComponent> comps;
    std::vector<JumpAtom> atoms;
    if (j.contains("densities"))
      for (const auto& d : j.at("densities"))
        comps.push_back(density_component_from_json(d));
    if (j.contains("atoms"))
      for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 2)
          throw std::invalid_argument("generic_id model: atom must be [loc, mass]");
        atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
      }
    t.jumps = MeasureSpec(std::move(comps), std::move(atoms));
    m = NoiseModel::generic(std::move(t));
  } else {
    throw std::invalid_argument("unknown model family '" + family + "'");
  }

  if (j.contains("scale")) m = scale(m, j.at("scale").get<double>());
  if (j.contains("shift")) m = shift(m, j.at("shift").get<double>());
  return m;
}

}  // namespace

NoiseModel model_from_json(const std::string& text) {
  return model_from_json_obj(json::parse(text));
}

EstimatorExpr estimator_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object())
    throw std::invalid_argument("estimator config must be a JSON object");

  if (j.contains("type")) {
    require_keys(j, {"type", "lambda"}, "estimator");
    const std::string type = j.at("type").get<std::string>();
    const double lambda = get_num(j, "lambda");
    if (type == "soft") return soft_expr(lambda);
    if (type == "mid") return mid_expr(lambda);
    throw std::invalid_argument("estimator: unknown type '" + type + "'");
  }

  require_keys(j, {"terms"}, "estimator");
  EstimatorExpr e;
  for (const auto& term : j.at("terms")) {
    if (!term.is_array() || term.size() != 2)
      throw std::invalid_argument("estimator: term must be [coeff, block]");
    const double coeff = term.at(0).get<double>();
    const json& b = term.at(1);
    const std::string kind = b.at("kind").get<std::string>();
    if (kind == "identity") {
      require_keys(b, {"kind"}, "block");
      e.terms.push_back({coeff, BuildingBlock::identity()});
    } else if (kind == "constant") {
      require_keys(b, {"kind", "value"}, "block");
      e.terms.push_back({coeff, BuildingBlock::constant(get_num(b, "value"))});
    } else if (kind == "hinge_plus") {
      require_keys(b, {"kind", "knot"}, "block");
      e.terms.push_back({coeff, BuildingBlock::hinge_plus(get_num(b, "knot"))});
    } else if (kind == "hinge_minus") {
      require_keys(b, {"kind", "knot"}, "block");
      e.terms.push_back({coeff, BuildingBlock::hinge_minus(get_num(b, "knot"))});
    } else {
      throw std::invalid_argument("estimator: unknown block kind '" + kind + "'");
    }
  }
  return e;
}

}  // namespace sureid

// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).
//
// Command-line front-end: risk curves, identity verification, SURE
// threshold selection and wavelet denoising.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sureid/errors.hpp"
#include "sureid/estimator.hpp"
#include "sureid/io.hpp"
#include "sureid/mc.hpp"
#include "sureid/noise_model.hpp"
#include "sureid/risk.hpp"
#include "sureid/stein_kernel.hpp"
#include "sureid/wavelet.hpp"

namespace {

using nlohmann::json;
using namespace sureid;

QuadOptions quad_options_from_env() {
  QuadOptions opts{1e-9, 1e-9, 4000};
  if (const char* env = std::getenv("SUREID_QUAD_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || !(tol > 0.0))
      throw std::invalid_argument("SUREID_QUAD_TOL must be a positive number");
    opts.abs_tol = tol;
    opts.rel_tol = tol;
  }
  return opts;
}

KernelOptions kernel_options_from_env() {
  KernelOptions opts;
  opts.quad = quad_options_from_env();
  return opts;
}

// flag precedence: explicit CLI flags override the JSON config file, which
// overrides built-in defaults
class ConfigFile {
 public:
  ConfigFile(const CLI::App* cmd, const std::string& path,
             const std::set<std::string>& allowed) {
    cmd_ = cmd;
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    doc_ = json::parse(in);
    if (!doc_.is_object())
      throw std::invalid_argument("config must be a JSON object");
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (!allowed.count(it.key()))
        throw std::invalid_argument("config: unknown field '" + it.key() + "'");
  }

  template <class T>
  void apply(const std::string& key, const std::string& flag, T& value) const {
    if (!doc_.contains(key)) return;
    if (cmd_->count(flag) > 0) return;  // explicit flag wins
    value = doc_.at(key).get<T>();
  }

  template <class T>
  void apply(const std::string& key, const std::string& flag,
             std::optional<T>& value) const {
    if (!doc_.contains(key)) return;
    if (cmd_->count(flag) > 0) return;
    value = doc_.at(key).get<T>();
  }

 private:
  const CLI::App* cmd_ = nullptr;
  json doc_;
};

NoiseModel resolve_model(const std::string& spec) {
  if (spec == "normal") return NoiseModel::normal(1.0);
  if (spec == "laplace") return NoiseModel::laplace();
  if (spec == "gamma") return NoiseModel::centered_gamma(2.0);
  if (spec == "sech") return NoiseModel::sech();
  if (spec == "uniform") return NoiseModel::uniform(1.0);
  if (!spec.empty() && spec.front() == '{') return model_from_json(spec);
  std::ifstream in(spec);
  if (!in)
    throw std::invalid_argument("model '" + spec +
                                "' is neither a known family name nor a "
                                "readable JSON file");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

NoiseModel normalized_unit(NoiseModel m) {
  if (m.mean() != 0.0) m = shift(m, -m.mean());
  if (m.variance() != 1.0) m = scale(m, 1.0 / m.sd());
  return m;
}

struct Range {
  double lo = -6.0, hi = 6.0, step = 0.01;
};

Range parse_range(const std::string& text) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
      !(r.step > 0.0) || !(r.lo <= r.hi))
    throw std::invalid_argument("bad range '" + text + "' (want a:b:step)");
  return r;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output '" + path + "'");
  return file;
}

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

// ---------------------------------------------------------------- risk-curve

int cmd_risk_curve(const std::string& model_spec, const std::string& estimator,
                   double lambda, const Range& range, const std::string& out,
                   const std::string& format) {
  if (estimator != "soft" && estimator != "mid")
    throw std::invalid_argument("estimator must be 'soft' or 'mid'");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");

  NoiseModel model = normalized_unit(resolve_model(model_spec));

  std::vector<RiskEstimate> rows;
  const std::size_t count =
      static_cast<std::size_t>((range.hi - range.lo) / range.step + 1.5);

  if (model.family() == Family::uniform) {
    if (estimator != "soft")
      throw unsupported_model_error(
          "uniform noise supports only the soft-threshold risk curve: no "
          "derived kernel is available for 'mid'");
    const double a = std::sqrt(3.0 * model.variance());
    for (std::size_t i = 0; i < count; ++i) {
      const double x = range.lo + static_cast<double>(i) * range.step;
      rows.push_back(unbiased_risk_uniform_soft(a, lambda, x));
    }
  } else {
    SteinOperator K(model, kernel_options_from_env());
    const EstimatorExpr d =
        estimator == "soft" ? soft_expr(lambda) : mid_expr(lambda);
    const std::string label = estimator + "(" + std::to_string(lambda) + ")";
    for (std::size_t i = 0; i < count; ++i) {
      const double x = range.lo + static_cast<double>(i) * range.step;
      rows.push_back(unbiased_risk(K, d, x));
      rows.back().estimator = label;
    }
  }

  std::ofstream file;
  std::ostream& os = open_output(file, out);
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"x", r.x},
                     {"risk", r.value},
                     {"variance_term", r.variance_term},
                     {"g_squared", r.g_squared},
                     {"cross_term", r.cross_term}});
    write_json(os, arr);
  } else {
    os << kRiskCurveCsvHeader << '\n';
    for (const auto& r : rows) write_risk_curve_row(os, r);
  }
  return 0;
}

// -------------------------------------------------------------------- verify

struct VerifyCell {
  std::string model;
  std::string g;
  double theta;
  IdentityCheck quad;
  SteinCheck mc;
  bool pass;
};

int cmd_verify(std::optional<double> theta_override, std::size_t samples,
               std::uint64_t seed, int threads, bool corrupt_kernel,
               const std::string& out) {
  const QuadOptions qopts = quad_options_from_env();
  const double quad_tol = 1e-6;

  struct NamedModel {
    std::string name;
    NoiseModel model;
  };
  const std::vector<NamedModel> models = {
      {"normal", NoiseModel::normal(1.0)},
      {"laplace", NoiseModel::laplace()},
      {"gamma(2)", NoiseModel::centered_gamma(2.0)},
      {"sech", NoiseModel::sech()},
  };
  struct NamedG {
    std::string name;
    EstimatorExpr g;
  };
  const std::vector<NamedG> gs = {
      {"soft1_residual", residual(soft_expr(1.0))},
      {"soft2_residual", residual(soft_expr(2.0))},
      {"mid2_residual", residual(mid_expr(2.0))},
      {"hinge_plus(0.5)", {{{1.0, BuildingBlock::hinge_plus(0.5)}}}},
  };
  std::vector<double> thetas = {-3.0, -1.0, 0.0, 0.7, 2.0};
  if (theta_override) thetas = {*theta_override};

  std::vector<VerifyCell> cells;
  bool all_pass = true;
  for (const auto& nm : models) {
    SteinOperator K(nm.model);
    for (const auto& ng : gs) {
      for (double theta : thetas) {
        VerifyCell cell;
        cell.model = nm.name;
        cell.g = ng.name;
        cell.theta = theta;
        cell.quad = stein_identity_quadrature(K, ng.g, theta, qopts);
        if (corrupt_kernel) cell.quad.lhs = -cell.quad.lhs;

        cell.mc = mc_stein_check(K, ng.g, theta, samples, seed, threads);
        if (corrupt_kernel) cell.mc.lhs = -cell.mc.lhs;

        const bool quad_ok = cell.quad.gap() <= quad_tol;
        const bool mc_ok =
            std::abs(cell.mc.lhs - cell.mc.rhs) <= 4.0 * cell.mc.se;
        cell.pass = quad_ok && mc_ok;
        all_pass = all_pass && cell.pass;
        cells.push_back(std::move(cell));
      }
    }
  }

  json report;
  report["samples"] = samples;
  report["seed"] = seed;
  report["corrupt_kernel"] = corrupt_kernel;
  report["quad_tol"] = quad_tol;
  report["passed"] = all_pass;
  json arr = json::array();
  for (const auto& c : cells) {
    arr.push_back({{"model", c.model},
                   {"g", c.g},
                   {"theta", c.theta},
                   {"quad_lhs", c.quad.lhs},
                   {"quad_rhs", c.quad.rhs},
                   {"quad_gap", c.quad.gap()},
                   {"mc_lhs", c.mc.lhs},
                   {"mc_rhs", c.mc.rhs},
                   {"mc_se", c.mc.se},
                   {"pass", c.pass}});
  }
  report["cells"] = std::move(arr);

  std::ofstream file;
  std::ostream& os = open_output(file, out);
  write_json(os, report);
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------- select-threshold

int cmd_select_threshold(const std::string& input, const std::string& model_spec,
                         std::size_t n_total, std::size_t max_candidates,
                         const std::string& out) {
  const std::vector<double> coeffs = read_value_csv_file(input);
  if (coeffs.empty()) throw std::invalid_argument("empty coefficient file");
  const NoiseModel model = resolve_model(model_spec);
  SteinOperator K(model, kernel_options_from_env());
  if (n_total == 0) n_total = coeffs.size();

  const ThresholdChoice choice = sure_select(coeffs, K, n_total, max_candidates);

  json j;
  j["lambda"] = choice.lambda;
  j["risk"] = choice.risk;
  j["n_candidates"] = choice.candidate_count;
  j["noise_variance"] = K.variance();
  j["cap"] = universal_threshold(n_total, std::sqrt(K.variance()));
  j["n_total"] = n_total;

  std::ofstream file;
  std::ostream& os = open_output(file, out);
  write_json(os, j);
  return 0;
}

// ------------------------------------------------------------------- denoise

int cmd_denoise(const std::string& input, const std::string& model_spec,
                const std::string& wavelet_name, int levels, int keep_low,
                std::optional<double> force_lambda, const std::string& out,
                const std::string& report_path) {
  const std::vector<double> signal = read_value_csv_file(input);
  const NoiseModel model = resolve_model(model_spec);
  const Wavelet wavelet = wavelet_from_string(wavelet_name);

  const DenoisePlan plan = make_denoise_plan(model, wavelet, levels,
                                             signal.size(), keep_low,
                                             kernel_options_from_env());
  const DenoiseResult result = denoise(signal, plan, force_lambda);

  std::ofstream file;
  std::ostream& os = open_output(file, out);
  write_value_csv(os, result.denoised);

  if (!report_path.empty()) {
    json j;
    j["wavelet"] = wavelet_name;
    j["levels"] = levels;
    j["keep_low"] = keep_low;
    j["n"] = signal.size();
    json arr = json::array();
    for (std::size_t i = 0; i < result.report.size(); ++i) {
      const auto& c = result.report[i];
      arr.push_back({{"level", c.level},
                     {"lambda", c.lambda},
                     {"risk", c.risk},
                     {"n_candidates", c.candidate_count},
                     {"noise_variance", plan.level_variance[i]},
                     {"thresholded", static_cast<bool>(result.thresholded[i])}});
    }
    j["levels_report"] = std::move(arr);
    std::ofstream rf(report_path);
    if (!rf)
      throw std::invalid_argument("cannot open report '" + report_path + "'");
    write_json(rf, j);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased risk estimation for infinitely divisible noise"};
  app.require_subcommand(1);

  // risk-curve
  std::string rc_model = "normal", rc_estimator = "soft", rc_range = "-6:6:0.01";
  std::string rc_out, rc_format = "csv", rc_config;
  double rc_lambda = 2.0;
  auto* rc = app.add_subcommand("risk-curve",
                                "Emit the unbiased risk curve of a threshold "
                                "estimator (model normalized to unit variance)");
  rc->add_option("--model", rc_model, "family name, JSON file, or inline JSON");
  rc->add_option("--estimator", rc_estimator, "soft|mid");
  rc->add_option("--lambda", rc_lambda, "threshold");
  rc->add_option("--range", rc_range, "x grid a:b:step");
  rc->add_option("--out", rc_out, "output path (default stdout)");
  rc->add_option("--format", rc_format, "csv|json");
  rc->add_option("--config", rc_config, "JSON defaults (flags take precedence)");

  // verify
  std::optional<double> vf_theta;
  std::size_t vf_samples = 200000;
  std::uint64_t vf_seed = 1;
  int vf_threads = 1;
  bool vf_corrupt = false;
  std::string vf_out;
  auto* vf = app.add_subcommand(
      "verify", "Check the defining identity across a model/theta/g matrix "
                "by quadrature and Monte Carlo");
  vf->add_option("--theta", vf_theta, "restrict to a single theta");
  vf->add_option("--samples", vf_samples, "Monte Carlo draws per cell");
  vf->add_option("--seed", vf_seed, "random seed");
  vf->add_option("--threads", vf_threads, "worker threads (result-invariant)");
  vf->add_flag("--corrupt-kernel", vf_corrupt,
               "flip the kernel sign; the run must fail (harness sanity)");
  vf->add_option("--out", vf_out, "report path (default stdout)");
  std::string vf_config;
  vf->add_option("--config", vf_config, "JSON defaults (flags take precedence)");

  // select-threshold
  std::string st_input, st_model = "normal", st_out;
  std::size_t st_ntotal = 0, st_max_candidates = 0;
  auto* st = app.add_subcommand("select-threshold",
                                "SURE-minimizing soft threshold for a "
                                "coefficient file");
  st->add_option("--input", st_input, "coefficient CSV (header 'value')")
      ->required();
  st->add_option("--model", st_model, "noise model");
  st->add_option("--n-total", st_ntotal,
                 "sample count for the universal cap (default: input size)");
  st->add_option("--max-candidates", st_max_candidates,
                 "subsample the candidate set (0 = all)");
  st->add_option("--out", st_out, "output path (default stdout)");
  std::string st_config;
  st->add_option("--config", st_config, "JSON defaults (flags take precedence)");

  // denoise
  std::string dn_input, dn_model = "normal", dn_wavelet = "haar", dn_out,
              dn_report;
  int dn_levels = 4, dn_keep_low = 1;
  std::optional<double> dn_force_lambda;
  auto* dn = app.add_subcommand("denoise",
                                "Per-level SURE soft-threshold denoising");
  dn->add_option("--input", dn_input, "signal CSV (header 'value')")->required();
  dn->add_option("--model", dn_model, "noise model of the samples");
  dn->add_option("--wavelet", dn_wavelet, "haar|d4");
  dn->add_option("--levels", dn_levels, "decomposition depth");
  dn->add_option("--keep-low", dn_keep_low,
                 "coarsest bands passed through (scaling band first)");
  dn->add_option("--force-lambda", dn_force_lambda,
                 "bypass selection and use this threshold on every level");
  dn->add_option("--out", dn_out, "denoised CSV path (default stdout)");
  dn->add_option("--report", dn_report, "per-level JSON report path");
  std::string dn_config;
  dn->add_option("--config", dn_config, "JSON defaults (flags take precedence)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rc->parsed()) {
      const ConfigFile cfg(
          rc, rc_config, {"model", "estimator", "lambda", "range", "out", "format"});
      cfg.apply("model", "--model", rc_model);
      cfg.apply("estimator", "--estimator", rc_estimator);
      cfg.apply("lambda", "--lambda", rc_lambda);
      cfg.apply("range", "--range", rc_range);
      cfg.apply("out", "--out", rc_out);
      cfg.apply("format", "--format", rc_format);
      return cmd_risk_curve(rc_model, rc_estimator, rc_lambda,
                            parse_range(rc_range), rc_out, rc_format);
    }
    if (vf->parsed()) {
      const ConfigFile cfg(vf, vf_config,
                           {"theta", "samples", "seed", "threads", "out"});
      cfg.apply("theta", "--theta", vf_theta);
      cfg.apply("samples", "--samples", vf_samples);
      cfg.apply("seed", "--seed", vf_seed);
      cfg.apply("threads", "--threads", vf_threads);
      cfg.apply("out", "--out", vf_out);
      return cmd_verify(vf_theta, vf_samples, vf_seed, vf_threads, vf_corrupt,
                        vf_out);
    }
    if (st->parsed()) {
      const ConfigFile cfg(st, st_config,
                           {"model", "n_total", "max_candidates", "out"});
      cfg.apply("model", "--model", st_model);
      cfg.apply("n_total", "--n-total", st_ntotal);
      cfg.apply("max_candidates", "--max-candidates", st_max_candidates);
      cfg.apply("out", "--out", st_out);
      return cmd_select_threshold(st_input, st_model, st_ntotal,
                                  st_max_candidates, st_out);
    }
    if (dn->parsed()) {
      const ConfigFile cfg(
          dn, dn_config,
          {"model", "wavelet", "levels", "keep_low", "out", "report"});
      cfg.apply("model", "--model", dn_model);
      cfg.apply("wavelet", "--wavelet", dn_wavelet);
      cfg.apply("levels", "--levels", dn_levels);
      cfg.apply("keep_low", "--keep-low", dn_keep_low);
      cfg.apply("out", "--out", dn_out);
      cfg.apply("report", "--report", dn_report);
      return cmd_denoise(dn_input, dn_model, dn_wavelet, dn_levels, dn_keep_low,
                         dn_force_lambda, dn_out, dn_report);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}

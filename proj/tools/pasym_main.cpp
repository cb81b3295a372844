// pasym: dimensional analysis, covariant normalization, equivariant dynamics
// models, and symmetry auditing with a file-based CLI.
//
// Exit codes: 0 success; 1 usage error; 2 domain error (infeasible target,
// schema mismatch, ...); 3 failed audit check (lint errors or a covtest
// deviation above tolerance).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pasym/audit.hpp"
#include "pasym/blackbody.hpp"
#include "pasym/dimension.hpp"
#include "pasym/exponent_solver.hpp"
#include "pasym/json_io.hpp"
#include "pasym/normalize.hpp"
#include "pasym/pendulum_experiment.hpp"
#include "pasym/svg.hpp"

namespace {

using namespace pasym;

struct NamedDims {
  std::vector<std::string> names;
  std::vector<Dimension> dims;
};

NamedDims parse_named_dims(const std::vector<std::string>& specs) {
  NamedDims nd;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0)
      throw DomainError("expected name:unit, got '" + s + "'");
    nd.names.push_back(s.substr(0, colon));
    nd.dims.push_back(Dimension::parse(s.substr(colon + 1)));
  }
  return nd;
}

std::string exponents_tuple(const std::vector<Rational>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += v[i].to_string();
    if (i + 1 < v.size()) out += ", ";
  }
  return out + ")";
}

int cmd_dim_solve(const std::vector<std::string>& inputs, const std::string& target,
                  const std::string& out_path) {
  const auto nd = parse_named_dims(inputs);
  const auto target_dim = Dimension::parse(target);
  ExponentSolution sol;
  try {
    sol = solve_target(nd.dims, target_dim);
  } catch (const InfeasibleError&) {
    std::cout << "infeasible: target not spanned\n";
    return 2;
  }
  std::cout << "exponents: " << exponents_tuple(sol.particular) << "\n";
  for (std::size_t i = 0; i < nd.names.size(); ++i)
    std::cout << "  " << nd.names[i] << ": " << sol.particular[i].to_string() << "\n";
  if (sol.nullspace.empty()) {
    std::cout << "nullspace: (none; combination is unique)\n";
  } else {
    std::cout << "nullspace:\n";
    for (const auto& v : sol.nullspace)
      std::cout << "  " << exponents_tuple(primitive_integer_form(v)) << "\n";
  }
  if (!out_path.empty()) {
    Json j;
    j["version"] = 1;
    j["inputs"] = nd.names;
    j["target"] = target_dim.to_json();
    j["particular"] = Json::array();
    for (const auto& r : sol.particular) j["particular"].push_back(r.to_string());
    j["nullspace"] = Json::array();
    for (const auto& v : sol.nullspace) {
      Json row = Json::array();
      for (const auto& r : primitive_integer_form(v)) row.push_back(r.to_string());
      j["nullspace"].push_back(row);
    }
    save_json(out_path, j);
  }
  return 0;
}

int cmd_dim_pi(const std::vector<std::string>& inputs, const std::string& out_path) {
  const auto nd = parse_named_dims(inputs);
  const auto basis = pi_basis(nd.dims);
  if (basis.empty()) {
    std::cout << "pi basis: (empty; no dimensionless combination)\n";
  } else {
    std::cout << "pi basis:\n";
    for (const auto& v : basis)
      std::cout << "  " << exponents_tuple(primitive_integer_form(v)) << "\n";
  }
  if (!out_path.empty()) {
    Json j;
    j["version"] = 1;
    j["inputs"] = nd.names;
    j["basis"] = Json::array();
    for (const auto& v : basis) {
      Json row = Json::array();
      for (const auto& r : primitive_integer_form(v)) row.push_back(r.to_string());
      j["basis"].push_back(row);
    }
    save_json(out_path, j);
  }
  return 0;
}

int cmd_normalize_fit(const std::string& schema_path, const std::string& data_path,
                      const std::string& out_path, bool with_unit_scales) {
  const auto schema = FeatureSchema::from_json(load_json(schema_path));
  const auto data = Dataset::read_csv_file(data_path);
  const auto norm = fit_normalizer(data, schema, with_unit_scales);
  for (const auto& w : norm.warnings)
    std::cerr << "warning [" << w.rule << "]: " << w.message << "\n";
  save_json(out_path, norm.to_json());
  std::cout << "normalizer written to " << out_path << "\n";
  return 0;
}

int cmd_normalize_apply(const std::string& schema_path, const std::string& data_path,
                        const std::string& norm_path, const std::string& out_path) {
  const auto schema = FeatureSchema::from_json(load_json(schema_path));
  const auto data = Dataset::read_csv_file(data_path);
  const auto norm = Normalizer::from_json(load_json(norm_path));
  const auto out = apply_normalizer(norm, data, schema);
  out.write_csv_file(out_path);
  std::cout << "normalized data written to " << out_path << "\n";
  return 0;
}

int cmd_audit_lint(const std::string& schema_path, const std::string& pipeline_path,
                   const std::string& out_path) {
  const auto schema = FeatureSchema::from_json(load_json(schema_path));
  const auto pipe = PipelineDesc::from_json(load_json(pipeline_path));
  const auto diags = lint_pipeline(schema, pipe);
  bool any_error = false;
  for (const auto& d : diags) {
    any_error = any_error || d.severity == Severity::kError;
    std::cout << to_string(d.severity) << " [" << d.rule << "] " << d.message << "\n";
  }
  if (diags.empty()) std::cout << "no diagnostics\n";
  if (!out_path.empty()) {
    Json j;
    j["version"] = 1;
    j["diagnostics"] = Json::array();
    for (const auto& d : diags) j["diagnostics"].push_back(d.to_json());
    save_json(out_path, j);
  }
  return any_error ? 3 : 0;
}

int cmd_audit_covtest(const std::string& schema_path, const std::string& model_path,
                      const std::string& group, int trials, double tol, std::uint64_t seed,
                      const std::string& probes_path, int probe_count,
                      const std::string& out_path) {
  const auto schema = FeatureSchema::from_json(load_json(schema_path));
  const auto model = load_json(model_path);
  const auto sf = make_schema_function(model, schema);
  CovarianceTestSpec spec;
  spec.group = group_tag_from_string(group);
  spec.trials = trials;
  spec.tolerance = tol;
  spec.seed = seed;
  std::vector<Record> probes;
  if (!probes_path.empty()) {
    const auto data = Dataset::read_csv_file(probes_path);
    const auto idx = schema_column_indices(schema, data);
    for (std::size_t r = 0; r < data.n_rows(); ++r)
      probes.push_back(row_to_record(schema, data, r, idx));
  } else {
    probes = generate_probes(schema, spec.group, probe_count, seed);
  }
  const auto rep = test_covariance(sf.fn, spec, probes);
  std::cout << "group " << to_string(rep.group) << ", trials " << rep.trials
            << ", max deviation " << rep.max_deviation << " vs tolerance " << rep.tolerance
            << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
  if (!out_path.empty()) {
    Json j = rep.to_json();
    j["version"] = 1;
    save_json(out_path, j);
  }
  return rep.pass ? 0 : 3;
}

void write_blackbody_svg(const BlackbodyReport& rep, const PhysConstants& consts,
                         const std::string& path) {
  const double t_mid =
      0.5 * (rep.config.temperature_range[0] + rep.config.temperature_range[1]);
  std::vector<double> lam, truth, m1, m2, m3;
  const double llo = std::log(rep.config.lambda_range[0]);
  const double lhi = std::log(rep.config.lambda_range[1]);
  for (int i = 0; i <= 200; ++i) {
    const double l = std::exp(llo + (lhi - llo) * i / 200.0);
    lam.push_back(l);
    truth.push_back(planck_intensity({l, units::m()}, {t_mid, units::K()}, consts).value);
    const std::vector<double> x{l, t_mid, consts.c.value, consts.k.value};
    m1.push_back(rep.model_no_constant.predict(x));
    m2.push_back(rep.model_with_constant.predict(x));
    m3.push_back(std::exp(rep.raw_mlp.predict({l, t_mid})[0] * rep.raw_out_scale +
                          rep.raw_out_center));
  }
  SvgPlot plot("Blackbody intensity at T = " + std::to_string(static_cast<int>(t_mid)) + " K",
               "log10 wavelength [m]", "log10 intensity", true, true);
  plot.add_series("truth", lam, truth);
  plot.add_series("covariant+constant", lam, m2);
  plot.add_series("covariant, no constant", lam, m1);
  plot.add_series("raw MLP", lam, m3);
  plot.write(path);
}

int cmd_exp_blackbody(const std::string& config_path, const std::string& out_path,
                      const std::string& svg_path, const std::string& loss_csv,
                      std::optional<std::uint64_t> seed) {
  BlackbodyConfig cfg;
  TrainConfig train_cfg;
  bool explicit_train_seed = false;
  if (!config_path.empty()) {
    const auto j = load_json(config_path);
    cfg = BlackbodyConfig::from_json(j);
    if (j.contains("train")) {
      train_cfg = TrainConfig::from_json(j.at("train"));
      explicit_train_seed = j.at("train").contains("seed");
    }
  }
  if (!explicit_train_seed) train_cfg.seed = cfg.seed;
  if (seed) {
    cfg.seed = *seed;
    train_cfg.seed = *seed;
  }
  PhysConstants consts;
  const auto rep = run_blackbody_experiment(cfg, train_cfg, consts);
  save_json(out_path, blackbody_report_json(rep));
  std::cout << "selected constant: " << rep.search.dim.to_string() << ", magnitude "
            << rep.search.magnitude << "\n"
            << "test log-MSE: no-constant " << rep.mse_covariant_no_constant
            << ", with-constant " << rep.mse_covariant_with_constant << ", raw MLP "
            << rep.mse_raw_mlp << "\n"
            << "report written to " << out_path << "\n";
  if (!svg_path.empty()) write_blackbody_svg(rep, consts, svg_path);
  if (!loss_csv.empty()) {
    Dataset d;
    d.columns = {"epoch", "loss_no_constant", "loss_with_constant", "loss_raw_mlp"};
    const std::size_t n = std::max({rep.loss_no_constant.size(), rep.loss_with_constant.size(),
                                    rep.loss_raw.size()});
    for (std::size_t i = 0; i < n; ++i) {
      auto at = [&](const std::vector<double>& v) {
        return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
      };
      d.rows.push_back({static_cast<double>(i), at(rep.loss_no_constant),
                        at(rep.loss_with_constant), at(rep.loss_raw)});
    }
    d.write_csv_file(loss_csv);
  }
  return 0;
}

int cmd_exp_pendulum(const std::string& config_path, const std::string& out_path,
                     const std::string& svg_path, const std::string& loss_csv,
                     std::optional<std::uint64_t> seed) {
  PendulumExperimentConfig cfg;
  TrainConfig train_cfg = pendulum_train_defaults();
  bool explicit_train_seed = false;
  if (!config_path.empty()) {
    const auto j = load_json(config_path);
    cfg = PendulumExperimentConfig::from_json(j);
    if (j.contains("train")) {
      TrainConfig base = pendulum_train_defaults();
      const auto& t = j.at("train");
      // overlay: start from the experiment defaults, then apply given keys
      Json merged = base.to_json();
      for (const auto& [key, val] : t.items()) merged[key] = val;
      train_cfg = TrainConfig::from_json(merged);
      explicit_train_seed = t.contains("seed");
    }
  }
  if (!explicit_train_seed) train_cfg.seed = cfg.seed;
  if (seed) {
    cfg.seed = *seed;
    train_cfg.seed = *seed;
  }
  const auto rep = run_pendulum_experiment(cfg, train_cfg);
  save_json(out_path, pendulum_report_json(rep));
  std::cout << "learned-g angle to true g: " << rep.learned_g_angle_rad << " rad\n"
            << "mean State.RelErr: known-g " << rep.known_g.mean_relerr << ", no-g "
            << rep.no_g.mean_relerr << ", learned-g " << rep.learned_g.mean_relerr << "\n"
            << "report written to " << out_path << "\n";
  if (!svg_path.empty()) {
    SvgPlot plot("Springy double pendulum: State.RelErr vs time", "t [s]", "State.RelErr");
    plot.add_series("known-g", rep.times, rep.known_g.relerr_curve);
    plot.add_series("no-g", rep.times, rep.no_g.relerr_curve);
    plot.add_series("learned-g", rep.times, rep.learned_g.relerr_curve);
    plot.write(svg_path);
  }
  if (!loss_csv.empty()) {
    Dataset d;
    d.columns = {"epoch", "loss_known_g", "loss_no_g", "loss_learned_g"};
    const std::size_t n =
        std::max({rep.known_g.loss_history.size(), rep.no_g.loss_history.size(),
                  rep.learned_g.loss_history.size()});
    for (std::size_t i = 0; i < n; ++i) {
      auto at = [&](const std::vector<double>& v) {
        return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
      };
      d.rows.push_back({static_cast<double>(i), at(rep.known_g.loss_history),
                        at(rep.no_g.loss_history), at(rep.learned_g.loss_history)});
    }
    d.write_csv_file(loss_csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pasym: units covariance and O(3) equivariance toolkit"};
  app.require_subcommand(1);

  int rc = 0;

  // dim
  auto* dim = app.add_subcommand("dim", "exact dimensional analysis");
  dim->require_subcommand(1);
  {
    static std::vector<std::string> inputs;
    static std::string target, out_path;
    auto* solve = dim->add_subcommand("solve", "solve for exponents reaching a target dimension");
    solve->add_option("--inputs", inputs, "input features as name:unit")->required()->expected(-1);
    solve->add_option("--target", target, "target unit expression")->required();
    solve->add_option("--out", out_path, "write the solution as JSON");
    solve->callback([&rc]() { rc = cmd_dim_solve(inputs, target, out_path); });

    static std::vector<std::string> pi_inputs;
    static std::string pi_out;
    auto* pi = dim->add_subcommand("pi", "dimensionless (Pi) feature basis");
    pi->add_option("--inputs", pi_inputs, "input features as name:unit")->required()->expected(-1);
    pi->add_option("--out", pi_out, "write the basis as JSON");
    pi->callback([&rc]() { rc = cmd_dim_pi(pi_inputs, pi_out); });
  }

  // normalize
  auto* norm = app.add_subcommand("normalize", "covariant data normalization");
  norm->require_subcommand(1);
  {
    static std::string schema, data, out;
    static bool unit_scales = false;
    auto* fit = norm->add_subcommand("fit", "fit a covariant normalizer");
    fit->add_option("--schema", schema, "feature schema JSON")->required();
    fit->add_option("--data", data, "training data CSV")->required();
    fit->add_option("--out", out, "output normalizer JSON")->required();
    fit->add_flag("--unit-scales", unit_scales, "also fit base-unit scales");
    fit->callback([&rc]() { rc = cmd_normalize_fit(schema, data, out, unit_scales); });

    static std::string a_schema, a_data, a_norm, a_out;
    auto* apply = norm->add_subcommand("apply", "apply a fitted normalizer");
    apply->add_option("--schema", a_schema, "feature schema JSON")->required();
    apply->add_option("--data", a_data, "data CSV")->required();
    apply->add_option("--normalizer", a_norm, "fitted normalizer JSON")->required();
    apply->add_option("--out", a_out, "output CSV")->required();
    apply->callback([&rc]() { rc = cmd_normalize_apply(a_schema, a_data, a_norm, a_out); });
  }

  // audit
  auto* audit = app.add_subcommand("audit", "symmetry-violation checks");
  audit->require_subcommand(1);
  {
    static std::string schema, pipeline, out;
    auto* lint = audit->add_subcommand("lint", "lint a pipeline description");
    lint->add_option("--schema", schema, "feature schema JSON")->required();
    lint->add_option("--pipeline", pipeline, "pipeline description JSON")->required();
    lint->add_option("--out", out, "write diagnostics as JSON");
    lint->callback([&rc]() { rc = cmd_audit_lint(schema, pipeline, out); });

    static std::string c_schema, c_model, c_group = "O3", c_probes, c_out;
    static int c_trials = 32, c_probe_count = 8;
    static double c_tol = 1e-8;
    static std::uint64_t c_seed = 1;
    auto* cov = audit->add_subcommand("covtest", "empirical commuting-diagram test");
    cov->add_option("--schema", c_schema, "feature schema JSON")->required();
    cov->add_option("--model", c_model, "model JSON (raw_mlp | scalarized_mlp | units_covariant)")
        ->required();
    cov->add_option("--group", c_group, "O3 | O3-proper | UnitsRescaling");
    cov->add_option("--trials", c_trials, "number of sampled group elements");
    cov->add_option("--tol", c_tol, "pass/fail deviation tolerance");
    cov->add_option("--seed", c_seed, "sampling seed");
    cov->add_option("--probes", c_probes, "probe records CSV (default: generated)");
    cov->add_option("--probe-count", c_probe_count, "generated probe count");
    cov->add_option("--out", c_out, "write the covariance report as JSON");
    cov->callback([&rc]() {
      rc = cmd_audit_covtest(c_schema, c_model, c_group, c_trials, c_tol, c_seed, c_probes,
                             c_probe_count, c_out);
    });
  }

  // exp
  auto* exp = app.add_subcommand("exp", "paper experiments");
  exp->require_subcommand(1);
  {
    static std::string b_config, b_out, b_svg, b_loss;
    static std::optional<std::uint64_t> b_seed;
    auto* bb = exp->add_subcommand("blackbody", "three-way blackbody regression experiment");
    bb->add_option("--config", b_config, "experiment config JSON (defaults when omitted)");
    bb->add_option("--out", b_out, "output report JSON")->required();
    bb->add_option("--svg", b_svg, "optional spectrum plot");
    bb->add_option("--loss-csv", b_loss, "optional training loss history CSV");
    bb->add_option("--seed", b_seed, "override config seed");
    bb->callback([&rc]() { rc = cmd_exp_blackbody(b_config, b_out, b_svg, b_loss, b_seed); });

    static std::string p_config, p_out, p_svg, p_loss;
    static std::optional<std::uint64_t> p_seed;
    auto* pd = exp->add_subcommand("pendulum", "springy double pendulum dynamics experiment");
    pd->add_option("--config", p_config, "experiment config JSON (defaults when omitted)");
    pd->add_option("--out", p_out, "output report JSON")->required();
    pd->add_option("--svg", p_svg, "optional State.RelErr curves plot");
    pd->add_option("--loss-csv", p_loss, "optional training loss history CSV");
    pd->add_option("--seed", p_seed, "override config seed");
    pd->callback([&rc]() { rc = cmd_exp_pendulum(p_config, p_out, p_svg, p_loss, p_seed); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // any usage error exits 1; --help exits 0
  } catch (const pasym::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}

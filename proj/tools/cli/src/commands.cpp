#include "rgflow/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "rgflow/json_io.hpp"
#include "rgflow/quadrature.hpp"
#include "rgflow/renorm.hpp"

namespace rgflow::cli {

namespace {

using nlohmann::json;

constexpr double kSemigroupTolerance = 1e-5;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string monomial_name(const Polynomial::Exponents& e) {
  std::string name;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!name.empty()) name += '*';
    name += "x" + std::to_string(i + 1);
    if (e[i] > 1) name += "^" + std::to_string(e[i]);
  }
  return name.empty() ? "1" : name;
}

json record_json(const FlowRecord& r) {
  json samples = json::array();
  for (const FlowSample& s : r.samples) samples.push_back({{"x", s.x}, {"value", s.value}});
  return {{"c", r.c}, {"interaction_projection", r.projection.polynomial}, {"residual", r.projection.residual},
          {"samples", std::move(samples)}};
}

json semigroup_json(const RunConfig& cfg, const PropagatorFamily& fam) {
  const ConvolutionOptions opts = cfg.convolution_options();
  const FieldFunction i = FieldFunction::polynomial(cfg.interaction);
  double worst = 0.0;
  try {
    const FieldFunction half = renorm_step(fam, std::numbers::sqrt2, i, opts);
    const FieldFunction twice = renorm_step(fam, std::numbers::sqrt2, half, opts);
    const FieldFunction direct = renorm_step(fam, 2.0, i, opts);
    for (const Vec& x : cfg.samples) {
      const double a = twice(x);
      const double b = direct(x);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  } catch (const Error& e) {
    throw FlowError(2.0, std::string("semigroup cross-check: ") + e.what());
  }
  return {{"c", 2.0},
          {"via", json::array({std::numbers::sqrt2, std::numbers::sqrt2})},
          {"max_error", worst},
          {"error_metric", "|a - b| / max(1, |b|)"},
          {"tolerance", kSemigroupTolerance},
          {"passed", worst <= kSemigroupTolerance}};
}

bool write_file(const std::filesystem::path& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    err << "rgflow: cannot write " << path.string() << "\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

RunConfig load(const std::string& path, std::uint64_t seed, int order_override) {
  RunConfig cfg = load_config(path, seed);
  if (order_override != 0) {
    if (order_override < 1 || order_override > 256) throw ConfigError("--quadrature-order must be in [1, 256]");
    cfg.quadrature_order = order_override;
  }
  return cfg;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  std::vector<CheckResult> results;
  try {
    results = run_suite(suite, seed);
  } catch (const Error& e) {
    err << "rgflow verify: " << e.what() << "\n";
    return kCheckFailure;
  }
  out << format_report(results);
  std::size_t passed = 0;
  for (const CheckResult& r : results) passed += r.passed ? 1 : 0;
  out << "verify " << suite << ": " << passed << "/" << results.size() << " checks passed\n";
  if (!out_path.empty()) {
    json report = json::array();
    for (const CheckResult& r : results) {
      report.push_back({{"suite", r.suite},
                        {"name", r.name},
                        {r.margin ? "min_margin" : "max_error", r.max_error},
                        {r.margin ? "threshold" : "tolerance", r.tolerance},
                        {"passed", r.passed}});
    }
    const json doc = {{"suite", suite}, {"seed", seed}, {"checks", std::move(report)}};
    if (!write_file(out_path, doc.dump(2) + "\n", err)) return kConfigError;
  }
  return passed == results.size() ? kSuccess : kCheckFailure;
}

int cmd_flow(const RunConfig& cfg, std::uint64_t seed, std::string out_path, std::ostream& out, std::ostream& err) {
  json flow;
  try {
    flow = flow_json(cfg, seed);
  } catch (const FlowError& e) {
    err << "rgflow flow: " << e.what() << "\n";
    return kCheckFailure;
  }
  if (out_path.empty() && cfg.output) out_path = cfg.output->string();
  const std::string text = flow.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    std::filesystem::path json_path = out_path;
    std::filesystem::path csv_path = out_path;
    if (json_path.extension() == ".csv") {
      json_path.replace_extension(".json");
    } else {
      csv_path.replace_extension(".csv");
    }
    if (!write_file(json_path, text, err) || !write_file(csv_path, flow_csv(flow), err)) return kConfigError;
    for (const json& r : flow["records"])
      out << "c = " << fmt(r["c"].get<double>()) << "  residual = " << fmt(r["residual"].get<double>()) << "\n";
  }
  const json& sg = flow["semigroup_check"];
  if (!sg.is_null()) {
    const bool ok = sg["passed"].get<bool>();
    (out_path.empty() ? err : out) << "semigroup cross-check R_sqrt2 R_sqrt2 = R_2: max error "
                                   << fmt(sg["max_error"].get<double>()) << (ok ? " (pass)" : " (FAIL)") << "\n";
    if (!ok) return kCheckFailure;
  }
  return kSuccess;
}

int cmd_wtilde(const RunConfig& cfg, const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = wtilde_csv(cfg);
  } catch (const Error& e) {
    err << "rgflow wtilde: " << e.what() << "\n";
    return kCheckFailure;
  }
  if (out_path.empty()) {
    out << text;
  } else if (!write_file(out_path, text, err)) {
    return kConfigError;
  }
  return kSuccess;
}

}  // namespace

FlowError::FlowError(double c, const std::string& what) : Error("at c = " + fmt(c) + ": " + what), c_(c) {}

json flow_json(const RunConfig& cfg, std::uint64_t seed) {
  const PropagatorFamily fam = cfg.family();
  const ConvolutionOptions opts = cfg.convolution_options();
  const FieldFunction i = FieldFunction::polynomial(cfg.interaction);
  json records = json::array();
  for (double c : cfg.scale_ladder) {
    try {
      records.push_back(record_json(flow_record(fam, c, i, cfg.projection_degree, cfg.samples, opts)));
    } catch (const Error& e) {
      throw FlowError(c, e.what());
    }
  }
  return {{"schema_version", kSchemaVersion},
          {"dimension", cfg.dimension},
          {"seed", seed},
          {"quadrature_order", opts.order > 0 ? opts.order : default_order(cfg.dimension)},
          {"records", std::move(records)},
          {"semigroup_check", cfg.semigroup_check ? semigroup_json(cfg, fam) : json(nullptr)}};
}

std::string flow_csv(const json& flow) {
  // Total degree first, then x1 before x2.
  const auto order = [](const Polynomial::Exponents& a, const Polynomial::Exponents& b) {
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    return da != db ? da < db : a > b;
  };
  std::map<Polynomial::Exponents, std::size_t, decltype(order)> columns(order);
  for (const json& r : flow.at("records")) {
    for (const json& t : r.at("interaction_projection").at("terms"))
      columns.emplace(t.at("exponents").get<Polynomial::Exponents>(), 0);
  }
  std::size_t k = 0;
  for (auto& [e, index] : columns) index = k++;

  std::ostringstream os;
  os << "c,residual";
  for (const auto& [e, index] : columns) os << "," << monomial_name(e);
  os << "\n";
  for (const json& r : flow.at("records")) {
    std::vector<double> row(columns.size(), 0.0);
    for (const json& t : r.at("interaction_projection").at("terms"))
      row[columns.at(t.at("exponents").get<Polynomial::Exponents>())] = t.at("coeff").get<double>();
    os << fmt(r.at("c").get<double>()) << "," << fmt(r.at("residual").get<double>());
    for (double v : row) os << "," << fmt(v);
    os << "\n";
  }
  return os.str();
}

std::string wtilde_csv(const RunConfig& cfg) {
  const ConvolutionOptions opts = cfg.convolution_options();
  const FieldFunction i = FieldFunction::polynomial(cfg.interaction);
  const FieldFunction w = wtilde(cfg.base, i, opts);
  std::ostringstream os;
  for (std::size_t d = 0; d < cfg.dimension; ++d) os << "x" << d + 1 << ",";
  os << "wtilde,w,w_free\n";
  for (std::size_t s = 0; s < cfg.samples.size(); ++s) {
    const Vec& x = cfg.samples[s];
    const DualVec& j = cfg.sources[s];
    for (std::size_t d = 0; d < cfg.dimension; ++d) os << fmt(x[d]) << ",";
    os << fmt(w(x)) << "," << fmt(w_full(cfg.base, i, j, opts)) << "," << fmt(0.5 * quad_form(j, cfg.base)) << "\n";
  }
  return os.str();
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const CheckResult& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  [" << r.suite << "] " << r.name << "  ("
       << (r.margin ? "min margin " : "max error ") << short_fmt(r.max_error)
       << (r.margin ? ", needs > " : ", tolerance ") << short_fmt(r.tolerance) << ")\n";
  }
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renormalization flows of interactions on finite-dimensional field spaces", "rgflow"};
  app.require_subcommand(1);

  std::string suite = "all";
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 1;
  int order = 0;

  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  CLI::App* verify = app.add_subcommand("verify", "Run a seeded property suite");
  verify->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember(suites))->capture_default_str();
  verify->add_option("--seed", seed, "Random seed")->capture_default_str();
  verify->add_option("--out", out_path, "Write a JSON report");

  CLI::App* flow = app.add_subcommand("flow", "Tabulate R_c I along the configured scale ladder");
  CLI::App* wt = app.add_subcommand("wtilde", "Print W-tilde and W at the configured points as CSV");
  for (CLI::App* sub : {flow, wt}) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "Seed for generated sample points")->capture_default_str();
    sub->add_option("--out", out_path, "Output path");
    sub->add_option("--quadrature-order", order, "Override the Gauss-Hermite order");
  }

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (std::string& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (verify->parsed()) return cmd_verify(suite, seed, out_path, out, err);
  try {
    const RunConfig cfg = load(config_path, seed, order);
    if (flow->parsed()) return cmd_flow(cfg, seed, out_path, out, err);
    return cmd_wtilde(cfg, out_path, out, err);
  } catch (const ConfigError& e) {
    err << "rgflow: config error: " << e.what() << "\n";
    return kConfigError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rgflow::cli

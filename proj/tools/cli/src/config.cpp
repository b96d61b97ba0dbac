#include "rgflow/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "rgflow/function_space.hpp"
#include "rgflow/json_io.hpp"
#include "rgflow/quadrature.hpp"

namespace rgflow::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "schema_version", "dimension", "propagator", "fiducial_scale", "dilation_generator", "interaction",
    "scale_ladder",   "quadrature", "projection", "samples",       "sources",            "semigroup_check",
    "output",
};

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

double number(const json& j, const std::string& key) {
  if (!j.is_number()) fail("'" + key + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail("'" + key + "' must be an integer");
  return j.get<int>();
}

template <class F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(what + ": " + e.what());
  } catch (const json::exception& e) {
    fail(what + ": " + e.what());
  }
}

Sym2Tensor parse_propagator(const json& node, std::size_t n, double fiducial_scale) {
  if (!node.is_object() || node.size() != 1 || !(node.contains("base") || node.contains("heat_kernel")))
    fail("'propagator' must be an object with exactly one of 'base' or 'heat_kernel'");
  if (node.contains("base")) {
    const Sym2Tensor base = guarded("propagator.base", [&] { return node["base"].get<Sym2Tensor>(); });
    if (base.dim() != n) fail("propagator.base must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!is_positive_definite(base)) fail("propagator.base is not positive definite");
    return base;
  }
  const json& hk = node["heat_kernel"];
  if (!hk.is_object()) fail("propagator.heat_kernel must be an object");
  for (const auto& [key, value] : hk.items()) {
    if (key != "spacetime_dim" && key != "sites" && key != "mass") fail("unknown key propagator.heat_kernel." + key);
  }
  if (!hk.contains("spacetime_dim") || !hk.contains("sites"))
    fail("propagator.heat_kernel needs 'spacetime_dim' and 'sites'");
  const int spacetime_dim = integer(hk["spacetime_dim"], "propagator.heat_kernel.spacetime_dim");
  const double mass = hk.contains("mass") ? number(hk["mass"], "propagator.heat_kernel.mass") : 0.0;
  if (!hk["sites"].is_array()) fail("propagator.heat_kernel.sites must be an array of points");
  std::vector<Vector> sites;
  for (const json& s : hk["sites"]) sites.push_back(guarded("propagator.heat_kernel.sites", [&] {
    return vector_from_json(s);
  }));
  if (sites.size() != n)
    fail("propagator.heat_kernel.sites must list one lattice site per field component (" + std::to_string(n) + ")");
  return guarded("propagator.heat_kernel",
                 [&] { return heat_kernel_base(spacetime_dim, sites, fiducial_scale, mass); });
}

std::vector<Vec> parse_points(const json& j, std::size_t n, const std::string& key) {
  if (!j.is_array() || j.empty()) fail("'" + key + "' must be a non-empty array of points");
  std::vector<Vec> out;
  for (const json& p : j) {
    Vec v = guarded(key, [&] { return p.get<Vec>(); });
    if (v.size() != n) fail("every entry of '" + key + "' must have " + std::to_string(n) + " components");
    out.push_back(std::move(v));
  }
  return out;
}

// Draws points from N(0, base) with a fixed generator so output depends on
// the seed alone.
std::vector<Vec> draw_samples(const Sym2Tensor& base, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix l = cholesky(base);
  const auto n = static_cast<Eigen::Index>(base.dim());
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector z(n);
    for (Eigen::Index k = 0; k < n; ++k) z(k) = normal(rng);
    out.emplace_back(Vector(l * z));
  }
  return out;
}

void check_integrability(const RunConfig& cfg, const PropagatorFamily& fam) {
  const FieldFunction i = FieldFunction::polynomial(cfg.interaction);
  const auto check = [&](const Sym2Tensor& p, const std::string& where) {
    try {
      require_exp_integrable(p, i);
    } catch (const NotIntegrable& e) {
      fail("interaction is not exp-integrable " + where + ": " + e.what());
    }
  };
  check(cfg.base, "against the base propagator");
  std::vector<double> scales = cfg.scale_ladder;
  if (cfg.semigroup_check) {
    scales.push_back(std::numbers::sqrt2);
    scales.push_back(2.0);
  }
  for (double c : scales) {
    if (c == 1.0) continue;
    check(propagator_gap(fam, c), "against P_L0 - P_cL0 at c = " + std::to_string(c));
  }
}

}  // namespace

std::size_t monomial_count(std::size_t n, int d) {
  // C(n + d, d)
  std::size_t out = 1;
  for (int k = 1; k <= d; ++k) out = out * (n + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
  return out;
}

PropagatorFamily RunConfig::family() const {
  return PropagatorFamily(base, DilationFamily(dilation_generator), fiducial_scale);
}

ConvolutionOptions RunConfig::convolution_options() const { return ConvolutionOptions{quadrature_order}; }

RunConfig parse_config(const json& doc, std::uint64_t seed) {
  if (!doc.is_object()) fail("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevelKeys.contains(key)) fail("unknown config key '" + key + "'");
  }
  for (const char* key : {"schema_version", "dimension", "propagator", "interaction", "scale_ladder"}) {
    if (!doc.contains(key)) fail(std::string("missing required key '") + key + "'");
  }
  if (integer(doc["schema_version"], "schema_version") != kSchemaVersion)
    fail("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");

  RunConfig cfg;
  const int n = integer(doc["dimension"], "dimension");
  if (n < 1 || n > 4) fail("dimension must be between 1 and 4");
  cfg.dimension = static_cast<std::size_t>(n);

  if (doc.contains("fiducial_scale")) cfg.fiducial_scale = number(doc["fiducial_scale"], "fiducial_scale");
  if (!(cfg.fiducial_scale > 0.0) || !std::isfinite(cfg.fiducial_scale)) fail("fiducial_scale must be positive");

  cfg.base = parse_propagator(doc["propagator"], cfg.dimension, cfg.fiducial_scale);

  if (doc.contains("dilation_generator")) {
    cfg.dilation_generator = guarded("dilation_generator", [&] { return matrix_from_json(doc["dilation_generator"]); });
    if (cfg.dilation_generator.rows() != n || cfg.dilation_generator.cols() != n)
      fail("dilation_generator must be " + std::to_string(n) + "x" + std::to_string(n));
  } else {
    cfg.dilation_generator = DilationFamily::standard(cfg.dimension).generator();
  }

  cfg.interaction = guarded("interaction", [&] { return polynomial_from_json(doc["interaction"], cfg.dimension); });
  if (cfg.interaction.dim() != cfg.dimension)
    fail("interaction exponents must have " + std::to_string(n) + " entries");

  const json& ladder = doc["scale_ladder"];
  if (!ladder.is_array() || ladder.empty()) fail("scale_ladder must be a non-empty array");
  for (const json& c : ladder) cfg.scale_ladder.push_back(number(c, "scale_ladder"));
  for (double c : cfg.scale_ladder) {
    if (!(c >= 1.0) || !std::isfinite(c)) fail("scale_ladder values must be finite and >= 1 (coarsening only)");
  }
  if (!std::is_sorted(cfg.scale_ladder.begin(), cfg.scale_ladder.end()))
    fail("scale_ladder must be sorted in ascending order");

  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    if (!q.is_object()) fail("'quadrature' must be an object");
    for (const auto& [key, value] : q.items()) {
      if (key != "order") fail("unknown key quadrature." + key);
    }
    if (q.contains("order")) cfg.quadrature_order = integer(q["order"], "quadrature.order");
    if (cfg.quadrature_order < 1 || cfg.quadrature_order > 256) fail("quadrature.order must be in [1, 256]");
  }

  if (doc.contains("projection")) {
    const json& p = doc["projection"];
    if (!p.is_object()) fail("'projection' must be an object");
    for (const auto& [key, value] : p.items()) {
      if (key != "degree") fail("unknown key projection." + key);
    }
    if (p.contains("degree")) cfg.projection_degree = integer(p["degree"], "projection.degree");
  }
  if (cfg.projection_degree < 0 || cfg.projection_degree > 8) fail("projection.degree must be in [0, 8]");

  const std::size_t needed = monomial_count(cfg.dimension, cfg.projection_degree);
  if (doc.contains("samples") && doc["samples"].is_object()) {
    const json& s = doc["samples"];
    for (const auto& [key, value] : s.items()) {
      if (key != "count") fail("unknown key samples." + key);
    }
    const int count = s.contains("count") ? integer(s["count"], "samples.count") : 0;
    if (count < 1) fail("samples.count must be positive");
    cfg.samples = draw_samples(cfg.base, static_cast<std::size_t>(count), seed);
  } else if (doc.contains("samples")) {
    cfg.samples = parse_points(doc["samples"], cfg.dimension, "samples");
  } else {
    cfg.samples = draw_samples(cfg.base, std::max<std::size_t>(10, 2 * needed), seed);
  }
  if (cfg.samples.size() < needed)
    fail("projection of degree " + std::to_string(cfg.projection_degree) + " needs at least " +
         std::to_string(needed) + " sample points");

  if (doc.contains("sources")) {
    for (const Vec& v : parse_points(doc["sources"], cfg.dimension, "sources")) cfg.sources.emplace_back(v.values());
    if (cfg.sources.size() != cfg.samples.size()) fail("'sources' must list one source per sample point");
  } else {
    for (const Vec& v : cfg.samples) cfg.sources.emplace_back(v.values());
  }

  if (doc.contains("semigroup_check")) {
    if (!doc["semigroup_check"].is_boolean()) fail("semigroup_check must be a boolean");
    cfg.semigroup_check = doc["semigroup_check"].get<bool>();
  }

  if (doc.contains("output")) {
    if (!doc["output"].is_string()) fail("output must be a path string");
    cfg.output = doc["output"].get<std::string>();
  }

  const PropagatorFamily fam = guarded("monotonicity check", [&] { return cfg.family(); });
  check_integrability(cfg, fam);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, seed);
}

}  // namespace rgflow::cli

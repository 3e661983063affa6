#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dirbreak/breakdown.hpp"
#include "dirbreak/functional.hpp"
#include "dirbreak/group.hpp"
#include "dirbreak/io.hpp"
#include "dirbreak/measure.hpp"
#include "dirbreak/metric.hpp"

namespace dirbreak::cli {

using nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kInputError = 2, kDomainError = 3 };

/// Undefined mean where a defined one is required, or a functional/group mismatch.
class DomainViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<std::string> input;
  std::optional<std::string> dist;
  MetricKind metric = MetricKind::TotalVariation;
  int k = 2;
  bool degrees = false;
  std::uint64_t seed = kDefaultSeed;
  std::string format;  // json | text | csv; empty picks the command default
  std::vector<double> kappas{0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"mean", "breakdown", "bounds", "symmetrize", "fsbp", "sweep"};
  return c;
}

inline std::string describe(const std::string& command) {
  if (command == "mean") return "mean direction and resultant length";
  if (command == "breakdown") return "180-degree bias breakdown by contamination search, with bounds";
  if (command == "bounds") return "upper bounds on the definability breakdown point";
  if (command == "symmetrize") return "orbit average and residual average over the order-k subgroup";
  if (command == "fsbp") return "finite-sample replacement breakdown of a circle sample";
  return "von Mises concentration sweep as CSV";
}

/// Round to `digits` significant digits so printed values are stable.
inline double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}
inline double prob(double x) { return round_sig(x, 6); }

inline std::string hex_seed(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(seed));
  return buf;
}

inline std::uint64_t parse_seed(std::string s) {
  if (s.starts_with("0x") || s.starts_with("0X")) s = s.substr(2);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw io::InputError("seed must be hexadecimal");
  return v;
}

namespace detail {

struct Formatter {
  bool degrees;

  double angle(double rad) const { return round_sig(degrees ? io::radians_to_degrees(rad) : rad, 9); }

  ordered_json direction(const Direction& d) const {
    if (d.space() == Space::Circle) return angle(d.angle());
    const Vec3 v = d.unit_vector();
    return ordered_json::array({round_sig(v[0], 9), round_sig(v[1], 9), round_sig(v[2], 9)});
  }

  ordered_json measure(const Measure& m) const {
    const Decomposition d = m.decompose();
    ordered_json out;
    out["kind"] = m.kind_name();
    ordered_json atoms = ordered_json::array();
    for (const auto& a : d.atoms) atoms.push_back({{"direction", direction(a.at)}, {"weight", prob(a.weight)}});
    out["atoms"] = atoms;
    ordered_json continuous = ordered_json::array();
    for (const auto& [vm, w] : d.von_mises)
      continuous.push_back(
          {{"kind", "von_mises"}, {"mu", angle(vm.mu.angle())}, {"kappa", round_sig(vm.kappa, 9)}, {"weight", prob(w)}});
    if (d.uniform_mass > 0.0) continuous.push_back({{"kind", "uniform"}, {"weight", prob(d.uniform_mass)}});
    out["continuous"] = continuous;
    return out;
  }
};

inline Measure load_measure(const RunConfig& cfg) {
  if (cfg.input) return Measure::empirical(io::read_sample_file(*cfg.input, cfg.degrees));
  return io::parse_dist_spec(*cfg.dist, cfg.degrees);
}

inline FiniteSubgroup group_for(const RunConfig& cfg, Space s) {
  if (cfg.k < 2) throw io::InputError("--k must be at least 2");
  if (cfg.k == 2) return FiniteSubgroup::antipodal(s);
  return FiniteSubgroup::cyclic(s, cfg.k);
}

inline void require_metric_supported(const RunConfig& cfg, Space s) {
  if (cfg.metric == MetricKind::Kuiper && s == Space::Sphere)
    throw io::InputError("metric kuiper is only available for circle data");
}

template <class F>
auto with_mean(Space s, F&& f) {
  if (s == Space::Circle) return f(CircularMean{});
  return f(SphericalMean{});
}

inline ordered_json cmd_mean(const RunConfig& cfg, const Formatter& fmt) {
  const Measure p = load_measure(cfg);
  const Resultant r = resultant(p);
  ordered_json out;
  out["functional"] = p.space() == Space::Circle ? "circular_mean" : "spherical_mean";
  out["space"] = to_string(p.space());
  out["defined"] = r.direction.has_value();
  out["direction"] = r.direction ? fmt.direction(*r.direction) : ordered_json(nullptr);
  out["resultant_length"] = prob(r.length);
  return out;
}

inline ordered_json cmd_bounds(const RunConfig& cfg, const Formatter&) {
  const Measure p = load_measure(cfg);
  require_metric_supported(cfg, p.space());
  const FiniteSubgroup group = group_for(cfg, p.space());
  return with_mean(p.space(), [&](const auto& functional) {
    DefinabilityBounds b{};
    try {
      b = definability_bounds(functional, p, cfg.metric, group);
    } catch (const std::logic_error& e) {
      throw DomainViolation(e.what());
    }
    ordered_json out;
    out["functional"] = std::string(functional.name());
    out["metric"] = to_string(cfg.metric);
    out["bound_uniform"] = prob(b.uniform);
    out["bound_symmetrized"] = prob(b.symmetrized);
    out["bound_group"] = prob(b.group);
    out["group_order"] = group.order();
    return out;
  });
}

inline ordered_json cmd_breakdown(const RunConfig& cfg, const Formatter&) {
  const Measure p = load_measure(cfg);
  if (p.space() != Space::Circle) throw io::InputError("breakdown requires circle data");
  const FiniteSubgroup group = group_for(cfg, p.space());
  const CircularMean functional;
  if (!in_domain(functional, p)) throw DomainViolation("circular mean is undefined at this input");
  BreakdownReport r;
  try {
    r = breakdown_report(functional, p, cfg.metric, group, SearchParams{}, cfg.seed);
  } catch (const std::logic_error& e) {
    throw DomainViolation(e.what());
  }
  ordered_json out;
  out["functional"] = r.functional;
  out["metric"] = to_string(r.metric);
  out["bias_breakdown"] = r.bias_breakdown ? ordered_json(prob(*r.bias_breakdown)) : ordered_json(nullptr);
  out["achieved_distance"] = r.achieved_distance ? ordered_json(prob(*r.achieved_distance)) : ordered_json(nullptr);
  out["bound_uniform"] = prob(r.bound_uniform);
  out["bound_symmetrized"] = prob(r.bound_symmetrized);
  out["bound_group"] = prob(r.bound_group);
  out["group_order"] = r.group_order;
  out["eps_step"] = prob(r.eps_step);
  out["phi_points"] = r.phi_points;
  out["angle_tol"] = prob(r.angle_tol);
  out["seed"] = hex_seed(r.seed);
  out["upper_bounds_only"] = true;
  return out;
}

inline ordered_json cmd_symmetrize(const RunConfig& cfg, const Formatter& fmt) {
  const Measure p = load_measure(cfg);
  const FiniteSubgroup group = group_for(cfg, p.space());
  ordered_json out;
  out["group_order"] = group.order();
  out["symmetrized"] = fmt.measure(symmetrize(p, group));
  out["residual"] = fmt.measure(residual_symmetrize(p, group));
  return out;
}

inline ordered_json cmd_fsbp(const RunConfig& cfg, const Formatter&) {
  if (!cfg.input) throw io::InputError("fsbp needs a sample (--input FILE)");
  const auto sample = io::read_sample_file(*cfg.input, cfg.degrees);
  if (sample.front().space() != Space::Circle) throw io::InputError("fsbp requires circle data");
  const FiniteSampleBreakdown r = finite_sample_breakdown(sample);
  ordered_json out;
  out["n"] = r.n;
  out["m"] = r.m;
  out["fraction"] = prob(r.fraction);
  out["exact"] = r.exact;
  out["attainable"] = r.attainable;
  return out;
}

inline ordered_json cmd_sweep(const RunConfig& cfg, const Formatter&) {
  const FiniteSubgroup group = FiniteSubgroup::antipodal(Space::Circle);
  const Measure u = Measure::uniform(Space::Circle);
  ordered_json rows = ordered_json::array();
  for (double kappa : cfg.kappas) {
    if (!(kappa > 0.0)) throw io::InputError("sweep kappas must be positive");
    const Measure p = Measure::von_mises(0.0, kappa);
    ordered_json row;
    row["kappa"] = round_sig(kappa, 9);
    row["flip_threshold"] = prob(flip_threshold_circular_mean(p));
    row["kuiper_to_uniform"] = prob(kuiper(p, u));
    row["tv_symmetrized_bound"] = prob(tv(p, symmetrize(p, group)));
    rows.push_back(row);
  }
  return rows;
}

inline std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void flatten(const ordered_json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + scalar_text(v[i]);
    out.emplace_back(prefix, s);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline void emit(const RunConfig& cfg, const ordered_json& config, const ordered_json& result, std::ostream& out) {
  const std::string format = cfg.format.empty() ? (cfg.command == "sweep" ? "csv" : "json") : cfg.format;
  if (format == "json") {
    ordered_json doc;
    doc["command"] = cfg.command;
    doc["config"] = config;
    doc["result"] = result;
    out << doc.dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    // Arrays of records become one row each; a single record becomes one row.
    const ordered_json rows = result.is_array() ? result : ordered_json::array({result});
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> body;
    for (const auto& r : rows) {
      std::vector<std::pair<std::string, std::string>> cells;
      flatten(r, "", cells);
      if (header.empty())
        for (const auto& c : cells) header.push_back(c.first);
      std::vector<std::string> line;
      for (const auto& c : cells) line.push_back(c.second);
      body.push_back(std::move(line));
    }
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_field(header[i]);
    out << "\n";
    for (const auto& line : body) {
      for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << csv_field(line[i]);
      out << "\n";
    }
    return;
  }
  std::vector<std::pair<std::string, std::string>> cells;
  flatten(result, "", cells);
  out << "command: " << cfg.command << "\n";
  for (const auto& [k, v] : cells) out << k << ": " << v << "\n";
}

}  // namespace detail

/// Execute one configured command and write the report to `out`.
/// Returns 0 on success, 2 on input errors, 3 on domain violations.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const bool needs_input = cfg.command != "sweep";
    if (needs_input && cfg.input.has_value() == cfg.dist.has_value())
      throw io::InputError("exactly one of --input or --dist is required");
    if (cfg.format != "" && cfg.format != "json" && cfg.format != "text" && cfg.format != "csv")
      throw io::InputError("--format must be json, text or csv");

    const detail::Formatter fmt{cfg.degrees};
    ordered_json config;
    if (cfg.input) config["input"] = *cfg.input;
    if (cfg.dist) config["dist"] = *cfg.dist;
    config["metric"] = to_string(cfg.metric);
    config["k"] = cfg.k;
    config["degrees"] = cfg.degrees;
    config["seed"] = hex_seed(cfg.seed);

    ordered_json result;
    if (cfg.command == "mean")
      result = detail::cmd_mean(cfg, fmt);
    else if (cfg.command == "breakdown")
      result = detail::cmd_breakdown(cfg, fmt);
    else if (cfg.command == "bounds")
      result = detail::cmd_bounds(cfg, fmt);
    else if (cfg.command == "symmetrize")
      result = detail::cmd_symmetrize(cfg, fmt);
    else if (cfg.command == "fsbp")
      result = detail::cmd_fsbp(cfg, fmt);
    else if (cfg.command == "sweep")
      result = detail::cmd_sweep(cfg, fmt);
    else
      throw io::InputError("unknown command '" + cfg.command + "'");
    detail::emit(cfg, config, result, out);
    return kOk;
  } catch (const DomainViolation& e) {
    err << "dirbreak: domain violation: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    err << "dirbreak: " << e.what() << "\n";
    return kInputError;
  }
}

/// Parse `dirbreak <command> [options]` and run it.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Breakdown points and definability bounds for directional functionals", "dirbreak"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string metric = "tv", seed = hex_seed(kDefaultSeed), kappas;
  std::string input, dist;

  std::vector<CLI::App*> subs;
  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--input", input, "CSV sample: one angle per row, or x,y,z per row");
    sub->add_option("--dist", dist, "parametric measure, e.g. vm:mu=0,kappa=2 | uniform | pointmass:theta=0");
    sub->add_option("--metric", metric, "tv or kuiper");
    sub->add_option("--k", cfg.k, "order of the cyclic subgroup");
    sub->add_flag("--degrees", cfg.degrees, "angles in and out are in degrees");
    sub->add_option("--seed", seed, "64-bit seed (hex)");
    sub->add_option("--format", cfg.format, "json, text or csv");
    if (name == "sweep") sub->add_option("--kappas", kappas, "comma-separated concentration grid");
    subs.push_back(sub);
  }

  std::vector<const char*> argv{"dirbreak"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dirbreak: " << e.what() << "\n";
    return kInputError;
  }

  for (auto* sub : subs)
    if (sub->parsed()) {
      cfg.command = sub->get_name();
      if (sub->count("--input")) cfg.input = input;
      if (sub->count("--dist")) cfg.dist = dist;
    }
  try {
    cfg.metric = parse_metric_kind(metric);
    cfg.seed = parse_seed(seed);
    if (!kappas.empty()) {
      cfg.kappas.clear();
      for (auto f : io::split(kappas, ',')) {
        const auto v = io::parse_double(f);
        if (!v) throw io::InputError("malformed --kappas entry '" + std::string(f) + "'");
        cfg.kappas.push_back(*v);
      }
    }
  } catch (const std::exception& e) {
    err << "dirbreak: " << e.what() << "\n";
    return kInputError;
  }
  return run(cfg, out, err);
}

}  // namespace dirbreak::cli

#pragma once

#include <fstream>
#include <functional>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gaugelab/catalog.hpp"
#include "gaugelab/integrator.hpp"
#include "gaugelab/serialize.hpp"
#include "gaugelab/suites.hpp"

namespace gaugelab::cli {

// Exit codes: 0 certified / all passed, 1 property failure, 2 configuration
// or infrastructure error, 3 uncertified integration.
enum ExitCode : int { kOk = 0, kPropertyFailure = 1, kInfrastructure = 2, kUncertified = 3 };

inline constexpr const char* kVersion = "1.0.0";

/// Fully resolved parameters of one CLI run. Serializes to a flat JSON object;
/// parsing rejects unknown keys.
struct RunConfig {
  std::string command = "integrate";
  std::string fn = "poly";
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::pair<double, double>> interval;
  std::string gauge = "auto";
  double tau = 1e-6;
  int max_index = 40;
  int replicates = 3;
  std::string policy = "hint-first:random";
  std::uint64_t seed = 42;
  std::string format = "json";
  std::string out;
  std::string suite = "all";
  std::string pair = "all";
  std::string id;

  nlohmann::json to_json() const {
    return {{"command", command},
            {"fn", fn},
            {"params", params},
            {"interval", interval ? nlohmann::json::array({interval->first, interval->second}) : nlohmann::json(nullptr)},
            {"gauge", gauge},
            {"tau", tau},
            {"maxIndex", max_index},
            {"replicates", replicates},
            {"policy", policy},
            {"seed", seed},
            {"format", format},
            {"out", out},
            {"suite", suite},
            {"pair", pair},
            {"id", id}};
  }

  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
    RunConfig c;
    const RunConfig defaults;
    const auto known = defaults.to_json();
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) throw Error(ErrorCode::Config, "unknown config key '" + key + "'");
    }
    try {
      auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
      };
      get("command", c.command);
      get("fn", c.fn);
      if (j.contains("params")) c.params = j.at("params");
      if (j.contains("interval") && !j.at("interval").is_null()) {
        c.interval = std::pair{j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>()};
      }
      get("gauge", c.gauge);
      get("tau", c.tau);
      get("maxIndex", c.max_index);
      get("replicates", c.replicates);
      get("policy", c.policy);
      get("seed", c.seed);
      get("format", c.format);
      get("out", c.out);
      get("suite", c.suite);
      get("pair", c.pair);
      get("id", c.id);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Config, std::string("bad config value: ") + e.what());
    }
    return c;
  }
};

inline std::pair<double, double> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Config, "interval must look like a:b");
  try {
    std::size_t used = 0;
    const double a = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("a");
    const std::string rest = text.substr(colon + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("b");
    return {a, b};
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, "cannot parse interval '" + text + "'");
  }
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

/// Gauge sequence spec: auto | halving | dirichlet[:depth] | min:<spec>,<spec>
inline GaugeSequence parse_gauge_spec(const std::string& spec, const std::string& fn, const Params& params,
                                      const Interval& I) {
  if (spec == "auto") return catalog().gauges(fn, params, I);
  if (spec == "halving") return GaugeSequence::halving(I);
  if (spec.rfind("dirichlet", 0) == 0) {
    int depth = 30;
    if (spec.size() > 9) {
      if (spec[9] != ':') throw Error(ErrorCode::Config, "bad gauge spec '" + spec + "'");
      depth = std::stoi(spec.substr(10));
    }
    return GaugeSequence([depth](int n) { return Gauge::dirichlet(std::ldexp(1.0, -n), depth); });
  }
  if (spec.rfind("min:", 0) == 0) {
    const std::string rest = spec.substr(4);
    // split at the top-level comma
    int nesting = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest.compare(i, 4, "min:") == 0) ++nesting;
      if (rest[i] == ',') {
        if (nesting == 0) {
          auto lhs = parse_gauge_spec(rest.substr(0, i), fn, params, I);
          auto rhs = parse_gauge_spec(rest.substr(i + 1), fn, params, I);
          return GaugeSequence([lhs, rhs](int n) { return Gauge::pointwise_min(lhs.generated(n), rhs.generated(n)); });
        }
        --nesting;
      }
    }
    throw Error(ErrorCode::Config, "min gauge needs two comma-separated specs");
  }
  throw Error(ErrorCode::Config, "unknown gauge spec '" + spec + "'");
}

inline std::string summary_line(const ConvergenceReport& r) {
  std::ostringstream os;
  os << std::setprecision(12) << "estimate=" << r.estimate << " certified=" << (r.certified ? "true" : "false")
     << std::setprecision(4) << " gap=" << r.final_gap() << " index=" << r.stopped_at << " cells=" << r.total_cells();
  return os.str();
}

inline std::string report_table(const ConvergenceReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "n" << std::setw(24) << "mean sum" << std::setw(14) << "gap" << "cells\n";
  for (std::size_t i = 0; i < r.sums.size(); ++i) {
    double mean = 0.0;
    std::size_t cells = 0;
    for (double s : r.sums[i]) mean += s;
    for (std::size_t c : r.cell_counts[i]) cells += c;
    mean /= static_cast<double>(r.sums[i].size());
    os << std::setw(6) << (i + 1) << std::setw(24) << std::setprecision(15) << mean << std::setw(14)
       << std::setprecision(4) << r.gaps[i] << cells << '\n';
  }
  return os.str();
}

inline void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out.empty()) {
    out << content;
  } else {
    write_file_atomic(cfg.out, content);
  }
}

inline int cmd_integrate(const RunConfig& cfg, std::ostream& out) {
  const CatalogEntry& entry = catalog().entry(cfg.fn);
  const Params params = catalog().resolve(entry, cfg.params);
  const Integrand f = entry.build(params);
  const Interval I = cfg.interval ? Interval(cfg.interval->first, cfg.interval->second) : entry.default_interval;
  const GaugeSequence gs = parse_gauge_spec(cfg.gauge, cfg.fn, params, I);
  const StoppingRule rule{cfg.tau, cfg.max_index, cfg.replicates};
  const TagPolicy policy = TagPolicy::parse(cfg.policy, cfg.seed);
  const ConvergenceReport report = integrate_sequential(f, gs, I, rule, policy, cfg.seed);

  RunConfig resolved = cfg;
  resolved.params = params;
  resolved.interval = std::pair{I.a(), I.b()};
  out << summary_line(report) << '\n';
  if (cfg.format == "csv") {
    emit(cfg, report_to_csv(report), out);
  } else if (cfg.format == "table") {
    emit(cfg, report_table(report), out);
  } else {
    const nlohmann::json doc = {{"config", resolved.to_json()},
                                {"report", report_to_json(report)},
                                {"metadata", {{"tool", "gaugelab"}, {"version", kVersion}}}};
    emit(cfg, doc.dump(2) + "\n", out);
  }
  return report.certified ? kOk : kUncertified;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  SuiteContext ctx;
  ctx.seed = cfg.seed;
  ctx.pair = cfg.pair;
  int code = kOk;
  nlohmann::json reports = nlohmann::json::array();
  std::vector<PropertyReport> results;
  try {
    results = run_suite(cfg.suite, ctx);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MonotonicityViolated) throw;
    PropertyReport rep{"monotone", 1, {{cfg.seed, e.what()}}, {}};
    results.push_back(rep);
  }
  for (const auto& r : results) {
    reports.push_back(r.to_json());
    if (!r.passed()) code = kPropertyFailure;
    out << (r.passed() ? "PASS " : "FAIL ") << r.property_id;
    if (!r.passed()) out << ": " << r.failures.front().detail;
    out << '\n';
  }
  const nlohmann::json doc = {{"config", cfg.to_json()},
                              {"passed", code == kOk},
                              {"reports", reports},
                              {"metadata", {{"tool", "gaugelab"}, {"version", kVersion}}}};
  if (!cfg.out.empty()) write_file_atomic(cfg.out, doc.dump(2) + "\n");
  return code;
}

inline int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
  nlohmann::json manifest;
  if (!cfg.id.empty()) {
    manifest = nlohmann::json::array({catalog().manifest_entry(catalog().entry(cfg.id))});
  } else {
    manifest = catalog().manifest();
  }
  if (cfg.format == "table") {
    for (const auto& e : manifest) {
      out << std::left << std::setw(30) << e["id"].get<std::string>() << std::setw(14)
          << e["referenceRule"]["kind"].get<std::string>() << e["description"].get<std::string>() << '\n';
    }
  } else {
    emit(cfg, manifest.dump(2) + "\n", out);
  }
  return kOk;
}

inline int run(const RunConfig& cfg, std::ostream& out) {
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "table") {
    throw Error(ErrorCode::Config, "unknown format '" + cfg.format + "'");
  }
  if (cfg.command == "integrate") return cmd_integrate(cfg, out);
  if (cfg.command == "verify") return cmd_verify(cfg, out);
  if (cfg.command == "catalog") return cmd_catalog(cfg, out);
  throw Error(ErrorCode::Config, "unknown command '" + cfg.command + "'");
}

/// Entry point shared by the executable and the tests. Flags given on the
/// command line override values loaded from --config.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gaugelab: gauge (Henstock-Kurzweil) integration and theorem checks"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string interval, coeffs, params, config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
  auto bind = [&]<typename T>(CLI::App* sub, const std::string& name, T RunConfig::*member, const std::string& help) {
    CLI::Option* opt = sub->add_option(name, flags.*member, help);
    overrides.emplace_back(opt, [&flags, member](RunConfig& cfg) { cfg.*member = flags.*member; });
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    bind(sub, "--seed", &RunConfig::seed, "seed (GAUGELAB_SEED overrides)");
    bind(sub, "--format", &RunConfig::format, "json, csv or table");
    bind(sub, "--out", &RunConfig::out, "output file");
  };
  auto* integrate = app.add_subcommand("integrate", "integrate a catalog function");
  common(integrate);
  bind(integrate, "--fn", &RunConfig::fn, "catalog id");
  integrate->add_option("--params", params, "parameters as a JSON object");
  integrate->add_option("--coeffs", coeffs, "shorthand for poly coefficients, e.g. 0,4,-1");
  integrate->add_option("--interval", interval, "a:b");
  bind(integrate, "--gauge", &RunConfig::gauge, "auto, halving, dirichlet[:depth], min:<spec>,<spec>");
  bind(integrate, "--tau", &RunConfig::tau, "Cauchy gap threshold");
  bind(integrate, "--max-index", &RunConfig::max_index, "largest gauge index");
  bind(integrate, "--replicates", &RunConfig::replicates, "partitions per gauge index");
  bind(integrate, "--policy", &RunConfig::policy, "midpoint, left, right, random, hint-first:<policy>");

  auto* verify = app.add_subcommand("verify", "run theorem property suites");
  common(verify);
  bind(verify, "--suite", &RunConfig::suite, "suite name or all");
  bind(verify, "--pair", &RunConfig::pair, "ftc pair: poly, sin, constant, pathological, all");

  auto* cat = app.add_subcommand("catalog", "list catalog entries");
  common(cat);
  bind(cat, "--id", &RunConfig::id, "single entry");

  std::vector<std::string> argv_store{"gaugelab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInfrastructure;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::Config, "cannot read " + config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, std::string("bad config file: ") + e.what());
      }
      cfg = RunConfig::from_json(j);
    }
    for (auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(cfg);
    }
    cfg.command = integrate->parsed() ? "integrate" : verify->parsed() ? "verify" : "catalog";
    if (!interval.empty()) cfg.interval = parse_interval(interval);
    if (!params.empty()) {
      try {
        cfg.params = nlohmann::json::parse(params);
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::Config, "--params must be a JSON object");
      }
      if (!cfg.params.is_object()) throw Error(ErrorCode::Config, "--params must be a JSON object");
    }
    if (!coeffs.empty()) cfg.params["coeffs"] = parse_list(coeffs);
    if (const char* env = std::getenv("GAUGELAB_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Config, "GAUGELAB_SEED is not an unsigned integer");
      }
    }
    return run(cfg, out);
  } catch (const std::exception& e) {
    err << "gaugelab: " << e.what() << '\n';
    return kInfrastructure;
  }
}

}  // namespace gaugelab::cli

#pragma once

// Command-line front end. `run_cli` is the whole program minus `main`, so
// tests can drive it with in-memory streams.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcmgap/error.hpp"
#include "fcmgap/fcm.hpp"
#include "fcmgap/frm.hpp"
#include "fcmgap/inference.hpp"
#include "fcmgap/model.hpp"
#include "fcmgap/report.hpp"
#include "fcmgap/scenario.hpp"
#include "fcmgap/service.hpp"

namespace fcmgap::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNonConvergence = 3,
  kNoRuleFired = 4,
  kIo = 5,
};

inline constexpr const char* kModelEnv = "FCMGAP_MODEL";
inline constexpr const char* kDefaultModel = "builtin:itil-service-support";

inline std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

inline std::string signed_fixed(double v, int digits) { return (v >= 0 ? "+" : "") + fixed(v, digits); }

/// Loads "builtin:<name>" or a file path. Throws Error (I/O) or ModelError.
inline ModelDocument load_model_source(const std::string& source, bool strict = true) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_model(source.substr(prefix.size()));
  return load_model(read_file(source), LoadOptions{strict});
}

struct Options {
  std::string model;
  std::string format = "text";

  std::string fcm_name;
  std::vector<std::string> on;
  std::optional<std::size_t> max_iter;
  std::string mode;
  bool trace = false;

  std::optional<double> auth, interrupt, response, po;
  std::optional<std::size_t> resolution;
  std::string rule_base;

  std::vector<std::string> baseline;
  std::vector<std::string> processes;
  std::vector<std::string> metrics;
  std::string effects;
  std::string frm_name;

  std::string listen = "127.0.0.1:8080";
  std::string web_root;

  std::string builtin;
  std::string check_path;
  bool lenient = false;
};

namespace detail {

inline std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

inline std::string state_text(const Fcm& fcm, const StateVector& s, bool binary) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += binary ? fixed(s.values[i], 0) : fixed(s.values[i], 4);
  }
  out += ")  {";
  std::vector<std::string> names;
  for (auto i : s.active()) names.push_back(fcm.concepts()[i]);
  return out + join(names) + "}";
}

inline void print_fuzzified(std::ostream& out, const RuleBase& rb, const Fuzzified& f) {
  for (const auto& v : rb.inputs()) {
    out << "  " << v.name() << ":";
    for (const auto& t : v.terms()) out << " " << t.name << " " << fixed(f.at(v.name()).at(t.name), 2);
    out << "\n";
  }
}

inline std::string cost_line(const CostPrediction& p) {
  std::string fired;
  for (std::size_t i = 0; i < p.fired_rules.size(); ++i) {
    const auto& r = p.fired_rules[i];
    fired += (i ? ", " : "") + std::string("rule ") + std::to_string(r.index + 1) + " (DoS " + fixed(r.dos, 2) + ")";
  }
  return "cost " + fixed(p.crisp, 1) + "% \xE2\x80\x94 fired: " + fired;
}

inline std::map<std::string, double> parse_baseline(const RuleBase& rb, const std::vector<std::string>& pairs) {
  std::map<std::string, double> out;
  for (const auto& kv : pairs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("baseline entry '" + kv + "' is not key=value");
    const std::string key = resolve_metric_key(rb, kv.substr(0, eq));
    try {
      std::size_t used = 0;
      double v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
      out[key] = v;
    } catch (const std::logic_error&) {
      throw ValidationError("baseline value in '" + kv + "' is not a number");
    }
  }
  return out;
}

}  // namespace detail

inline int cmd_fcm_simulate(const Options& o, const ModelDocument& doc, std::ostream& out, std::ostream& err) {
  const Fcm& fcm = doc.fcm(o.fcm_name);
  std::set<std::size_t> on;
  for (const auto& name : o.on) {
    auto id = fcm.find(name);
    if (!id) {
      err << "error: unknown concept '" << name << "' (valid: " << detail::join(fcm.concepts()) << ")\n";
      return kUsage;
    }
    on.insert(id->index);
  }
  const std::string mode = o.mode.empty() ? to_string(fcm.mode()) : o.mode;
  const bool binary = mode == "binary";
  if (!binary && mode != "continuous") {
    err << "error: --mode must be binary or continuous\n";
    return kUsage;
  }
  auto initial = StateVector::activate(fcm.size(), on);
  Attractor a;
  try {
    a = binary ? hidden_pattern(fcm, initial, o.max_iter) : continuous_pattern(fcm, initial, o.max_iter.value_or(1000));
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  }

  if (o.format == "structured") {
    out << attractor_json(fcm, a).dump(2) << "\n";
    return kOk;
  }
  if (o.trace)
    for (std::size_t i = 0; i < a.trajectory.size(); ++i)
      out << "C" << (i + 1) << " = " << detail::state_text(fcm, a.trajectory[i], binary) << "\n";
  if (a.kind == Attractor::Kind::fixed_point) {
    out << "fixed point after " << a.iterations << " iterations: "
        << detail::state_text(fcm, a.final_state(), binary) << "\n";
  } else {
    out << "limit cycle of period " << a.period << " after " << a.iterations << " iterations:\n";
    for (const auto& s : a.cycle()) out << "  " << detail::state_text(fcm, s, binary) << "\n";
  }
  return kOk;
}

inline int cmd_fuzzy_eval(const Options& o, const ModelDocument& doc, std::ostream& out, std::ostream& err) {
  RuleBase rb = doc.rule_base(o.rule_base);
  std::map<std::string, double> metrics;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) metrics[resolve_metric_key(rb, key)] = *v;
  };
  put("auth", o.auth);
  put("interrupt", o.interrupt);
  put("response", o.response);
  put("po", o.po);
  InferenceSettings settings = doc.settings;
  if (o.resolution) settings.defuzz_resolution = *o.resolution;

  CostPrediction p;
  try {
    p = predict_cost(rb, metrics, settings);
  } catch (const NoRuleFired& e) {
    if (o.format == "structured") {
      out << no_rule_fired_json(rb, e.degrees()).dump(2) << "\n";
    } else {
      err << "error: NoRuleFired: no rule covers these inputs; fuzzified degrees:\n";
      detail::print_fuzzified(err, rb, e.degrees());
    }
    return kNoRuleFired;
  }

  for (const auto& name : p.clamped_inputs) {
    const auto& v = *rb.find_input(name);
    err << "warning: " << name << " " << metrics.at(name) << " outside [" << v.lo() << ", " << v.hi()
        << "], clamped to " << p.inputs.at(name) << "\n";
  }
  if (o.format == "structured") {
    out << prediction_json(rb, p).dump(2) << "\n";
    return kOk;
  }
  out << detail::cost_line(p) << "\n";
  out << "output term heights:";
  for (const auto& t : rb.output().terms()) out << " " << t.name << " " << fixed(p.output_memberships.at(t.name), 2);
  out << "\n";
  return kOk;
}

inline int cmd_frm_project(const Options& o, const ModelDocument& doc, std::ostream& out, std::ostream&) {
  const Frm& frm = doc.frm(o.frm_name);
  if (!o.metrics.empty()) {
    std::vector<double> act(frm.range().size(), 0.0);
    for (const auto& m : o.metrics) act[frm.range_index(m)] = 1.0;
    auto back = back_project(frm, act);
    if (o.format == "structured") {
      ordered_json rows = ordered_json::array();
      for (std::size_t i = 0; i < back.size(); ++i) rows.push_back({{"node", frm.domain()[i]}, {"effect", back[i]}});
      out << ordered_json{{"processes", rows}}.dump(2) << "\n";
    } else {
      for (std::size_t i = 0; i < back.size(); ++i)
        out << std::left << std::setw(26) << frm.domain()[i] << signed_fixed(back[i], 2) << "\n";
    }
    return kOk;
  }
  auto summary = project(frm, domain_activation(frm, o.processes));
  if (o.format == "structured") {
    out << effect_summary_json(summary).dump(2) << "\n";
    return kOk;
  }
  for (const auto& e : summary.effects)
    out << std::left << std::setw(22) << e.node << std::setw(10) << to_string(e.direction)
        << signed_fixed(e.aggregate, 2) << "\n";
  return kOk;
}

inline int cmd_scenario_compare(const Options& o, const ModelDocument& doc, std::ostream& out, std::ostream&) {
  RuleBase rb = doc.rule_base(o.rule_base);
  const EffectTable& table = doc.effect_table(o.effects);
  const Frm& frm = doc.frm(table.frm);
  Scenario s{detail::parse_baseline(rb, o.baseline), o.processes, table};
  auto report = compare(s, frm, rb, doc.settings);

  if (o.format == "structured") {
    out << gap_report_json(rb, report).dump(2) << "\n";
    return kOk;
  }
  auto side = [&](const char* label, const SideResult& r) {
    out << label;
    if (r.fired()) out << fixed(r.prediction->crisp, 2) << "% (" << detail::cost_line(*r.prediction) << ")\n";
    else out << "no rule fired\n";
  };
  side("as-is cost  ", report.as_is);
  side("to-be cost  ", report.to_be);
  out << "cost delta  " << (report.cost_delta ? signed_fixed(*report.cost_delta, 2) : std::string("n/a")) << "\n";
  out << "adjusted metrics:";
  for (const auto& v : rb.inputs()) out << " " << v.name() << "=" << report.adjusted_metrics.at(v.name());
  out << "\n";
  if (report.applied_effects.empty()) {
    out << "applied effects: none\n";
  } else {
    out << "applied effects:\n";
    for (const auto& e : report.applied_effects)
      out << "  " << std::left << std::setw(24) << e.process << std::setw(20) << e.metric << signed_fixed(e.delta, 1)
          << "\n";
  }
  return kOk;
}

inline int cmd_scenario_sweep(const Options& o, const ModelDocument& doc, std::ostream& out, std::ostream&) {
  RuleBase rb = doc.rule_base(o.rule_base);
  const EffectTable& table = doc.effect_table(o.effects);
  const Frm& frm = doc.frm(table.frm);
  auto rows = sweep(detail::parse_baseline(rb, o.baseline), table, frm, rb, doc.settings);
  if (o.format == "structured") {
    out << sweep_json(rb, rows).dump(2) << "\n";
    return kOk;
  }
  for (const auto& r : rows) {
    const auto& rep = r.report;
    out << std::right << std::setw(8) << (rep.cost_delta ? signed_fixed(*rep.cost_delta, 2) : std::string("n/a"))
        << "  " << (rep.processes.empty() ? std::string("(none)") : detail::join(rep.processes)) << "\n";
  }
  return kOk;
}

inline int cmd_serve(const Options& o, ModelDocument doc, std::ostream& out, std::ostream& err) {
  auto colon = o.listen.rfind(':');
  if (colon == std::string::npos) {
    err << "error: --listen expects host:port\n";
    return kUsage;
  }
  const std::string host = o.listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.listen.substr(colon + 1));
  } catch (const std::logic_error&) {
    err << "error: bad port in --listen\n";
    return kUsage;
  }
  Service service(std::move(doc));
  httplib::Server server;
  service.mount(server, o.web_root);
  if (!server.bind_to_port(host, port)) {
    err << "error: cannot bind " << o.listen << "\n";
    return kIo;
  }
  out << "listening on " << o.listen << "\n" << std::flush;
  server.listen_after_bind();
  return kOk;
}

/// Whole CLI. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"FCM/FRM gap analysis and fuzzy cost prediction"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--model", o.model, "model file, or builtin:<name> (default $FCMGAP_MODEL, else the bundled model)");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "structured"}));

  auto* fcm = app.add_subcommand("fcm", "cognitive map commands")->fallthrough()->require_subcommand(1);
  auto* sim = fcm->add_subcommand("simulate", "run the hidden-pattern iteration");
  sim->add_option("--fcm", o.fcm_name, "map name (default: first)");
  sim->add_option("--on", o.on, "concept to switch on and clamp (repeatable)")->required();
  sim->add_option("--max-iter", o.max_iter, "iteration bound (default 2^n + 1)")->check(CLI::PositiveNumber);
  sim->add_option("--mode", o.mode, "binary or continuous (default: the map's mode)");
  sim->add_flag("--trace", o.trace, "print every state");

  auto* fuzzy = app.add_subcommand("fuzzy", "fuzzy cost prediction")->fallthrough()->require_subcommand(1);
  auto* eval = fuzzy->add_subcommand("eval", "predict cost of support");
  eval->add_option("--auth", o.auth, "authorized changes, % (0-100)");
  eval->add_option("--interrupt", o.interrupt, "interrupt time, min/day (0-1440)");
  eval->add_option("--response", o.response, "response time, min/day (0-1440)");
  eval->add_option("--po", o.po, "process orientation, % (0-100)");
  eval->add_option("--resolution", o.resolution, "defuzzification samples")->check(CLI::Range(2, 1000000));
  eval->add_option("--rule-base", o.rule_base, "rule base name (default: first)");

  auto* frm = app.add_subcommand("frm", "relational map commands")->fallthrough()->require_subcommand(1);
  auto* proj = frm->add_subcommand("project", "effects of processes on metrics (or --metric for the reverse)");
  proj->add_option("--frm", o.frm_name, "relational map name (default: first)");
  proj->add_option("--process", o.processes, "process to activate (repeatable)");
  proj->add_option("--metric", o.metrics, "metric to back-project (repeatable)");

  auto* scen = app.add_subcommand("scenario", "as-is / to-be analysis")->fallthrough()->require_subcommand(1);
  auto* cmp = scen->add_subcommand("compare", "cost before and after implementing processes");
  auto* swp = scen->add_subcommand("sweep", "compare every subset of processes");
  for (auto* sc : {cmp, swp}) {
    sc->add_option("--baseline", o.baseline, "metric=value (repeatable; keys auth, interrupt, response, po)")->required();
    sc->add_option("--effects", o.effects, "effect table name (default: first)");
    sc->add_option("--rule-base", o.rule_base, "rule base name (default: first)");
  }
  cmp->add_option("--process", o.processes, "process to implement (repeatable)");

  auto* model = app.add_subcommand("model", "model documents")->fallthrough()->require_subcommand(1);
  auto* show = model->add_subcommand("show", "print the canonical model document");
  show->add_option("--builtin", o.builtin, "bundled model name");
  auto* check = model->add_subcommand("check", "validate a model file");
  check->add_option("path", o.check_path, "model file")->required();
  check->add_flag("--lenient", o.lenient, "warn on unknown fields instead of failing");
  model->add_subcommand("list", "list bundled models");

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--listen", o.listen, "host:port");
  serve->add_option("--web-root", o.web_root, "directory of static workbench assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (check->parsed()) {
    std::string text;
    try {
      text = read_file(o.check_path);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kIo;
    }
    auto r = parse_model(text, LoadOptions{!o.lenient});
    for (const auto& w : r.warnings) err << "warning: " << w.str() << "\n";
    for (const auto& e : r.errors) err << "error: " << e.str() << "\n";
    if (!r.ok()) return kUsage;
    out << "ok\n";
    return kOk;
  }
  if (model->got_subcommand("list")) {
    for (const auto& m : builtin_models()) out << m.name << "\n";
    return kOk;
  }

  std::string source = o.model;
  if (source.empty())
    if (const char* env = std::getenv(kModelEnv)) source = env;
  if (source.empty()) source = kDefaultModel;
  if (show->parsed() && !o.builtin.empty()) source = "builtin:" + o.builtin;

  ModelDocument doc;
  try {
    doc = load_model_source(source);
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownName& e) {
    err << "error: " << e.what() << " (valid: " << detail::join(e.valid_names()) << ")\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }

  try {
    if (show->parsed()) {
      out << save_model(doc);
      return kOk;
    }
    if (sim->parsed()) return cmd_fcm_simulate(o, doc, out, err);
    if (eval->parsed()) return cmd_fuzzy_eval(o, doc, out, err);
    if (proj->parsed()) return cmd_frm_project(o, doc, out, err);
    if (cmp->parsed()) return cmd_scenario_compare(o, doc, out, err);
    if (swp->parsed()) return cmd_scenario_sweep(o, doc, out, err);
    if (serve->parsed()) return cmd_serve(o, std::move(doc), out, err);
  } catch (const UnknownName& e) {
    err << "error: " << e.what() << " (valid: " << detail::join(e.valid_names()) << ")\n";
    return kUsage;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

}  // namespace fcmgap::cli

#pragma once

// HTTP API over a model snapshot. Requests are evaluated against one
// immutable snapshot; PUT /api/v1/model swaps the snapshot atomically.

#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "fcmgap/error.hpp"
#include "fcmgap/fcm.hpp"
#include "fcmgap/frm.hpp"
#include "fcmgap/inference.hpp"
#include "fcmgap/model.hpp"
#include "fcmgap/report.hpp"
#include "fcmgap/scenario.hpp"

namespace fcmgap {

/// Short metric keys accepted alongside full variable names.
inline std::string resolve_metric_key(const RuleBase& rb, const std::string& key) {
  if (rb.find_input(key)) return key;
  static const std::map<std::string, std::string> short_names{{"auth", itil::kAuthorizedChanges},
                                                              {"interrupt", itil::kInterruptTime},
                                                              {"response", itil::kResponseTime},
                                                              {"po", itil::kProcessOrientation}};
  if (auto it = short_names.find(key); it != short_names.end() && rb.find_input(it->second)) return it->second;
  throw UnknownName("metric", key, rb.input_names());
}

struct Snapshot {
  ModelDocument model;
  std::string canonical;
  std::string etag;

  explicit Snapshot(ModelDocument doc) : model(std::move(doc)), canonical(save_model(model)) {
    std::ostringstream ss;
    ss << '"' << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(canonical) << '-'
       << std::dec << canonical.size() << '"';
    etag = ss.str();
  }
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::string etag;
};

class Service {
 public:
  explicit Service(ModelDocument doc) : snapshot_(std::make_shared<const Snapshot>(std::move(doc))) {}

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_;
  }

  void replace(ModelDocument doc) {
    auto next = std::make_shared<const Snapshot>(std::move(doc));
    std::lock_guard lock(mutex_);
    snapshot_ = std::move(next);
  }

  /// Routes one request. Never throws.
  ApiResponse dispatch(const std::string& method, const std::string& path, const std::string& body) {
    auto snap = snapshot();
    ApiResponse resp;
    try {
      if (path == "/api/v1/model" && method == "GET") {
        resp.body = snap->canonical;
      } else if (path == "/api/v1/model" && method == "PUT") {
        auto result = parse_model(body);
        if (!result.ok()) return model_errors(result.errors, snap->etag);
        replace(std::move(*result.document));
        snap = snapshot();
        resp.body = ordered_json{{"status", "ok"}, {"etag", snap->etag}}.dump() + "\n";
      } else if (method != "POST") {
        return error(404, "not_found", "no route for " + method + " " + path, snap->etag);
      } else {
        auto req = parse_body(body);
        ordered_json out;
        if (path == "/api/v1/fcm/simulate") out = simulate(*snap, req);
        else if (path == "/api/v1/fuzzy/evaluate") out = evaluate(*snap, req);
        else if (path == "/api/v1/frm/project") out = project_frm(*snap, req);
        else if (path == "/api/v1/scenario/compare") out = compare_scenario(*snap, req);
        else if (path == "/api/v1/scenario/sweep") out = sweep_scenarios(*snap, req);
        else return error(404, "not_found", "no route for " + method + " " + path, snap->etag);
        resp.body = out.dump() + "\n";
      }
    } catch (const UnknownName& e) {
      auto r = error(400, "unknown_name", e.what(), snap->etag);
      auto j = ordered_json::parse(r.body);
      j["error"]["valid"] = e.valid_names();
      r.body = j.dump() + "\n";
      return r;
    } catch (const NonConvergence& e) {
      return error(422, "non_convergence", e.what(), snap->etag);
    } catch (const nlohmann::json::exception& e) {
      return error(400, "bad_request", e.what(), snap->etag);
    } catch (const Error& e) {
      return error(400, "validation", e.what(), snap->etag);
    } catch (const std::exception& e) {
      return error(500, "internal", e.what(), snap->etag);
    }
    resp.etag = snap->etag;
    return resp;
  }

  /// Registers the API routes (and optionally static assets) on a server.
  void mount(httplib::Server& server, const std::string& web_root = {}) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      auto r = dispatch(req.method, req.path, req.body);
      res.status = r.status;
      if (!r.etag.empty()) res.set_header("ETag", r.etag);
      res.set_content(r.body, r.content_type);
    };
    for (const char* p : {"/api/v1/model"}) {
      server.Get(p, handler);
      server.Put(p, handler);
    }
    server.Post(R"(/api/v1/.*)", handler);
    if (!web_root.empty()) server.set_mount_point("/", web_root);
  }

 private:
  static ordered_json parse_body(const std::string& body) {
    if (body.empty()) return ordered_json::object();
    auto j = ordered_json::parse(body);
    if (!j.is_object()) throw ValidationError("request body must be an object");
    return j;
  }

  static std::string opt_string(const ordered_json& req, const char* key) {
    if (!req.contains(key)) return {};
    return req.at(key).get<std::string>();
  }

  static ApiResponse error(int status, const std::string& kind, const std::string& message,
                           const std::string& etag) {
    ApiResponse r;
    r.status = status;
    r.etag = etag;
    r.body = ordered_json{{"error", {{"kind", kind}, {"message", message}}}}.dump() + "\n";
    return r;
  }

  static ApiResponse model_errors(const std::vector<ModelIssue>& issues, const std::string& etag) {
    ordered_json details = ordered_json::array();
    for (const auto& i : issues) details.push_back({{"path", i.path}, {"message", i.message}});
    ApiResponse r;
    r.status = 400;
    r.etag = etag;
    r.body = ordered_json{{"error", {{"kind", "invalid_model"}, {"message", "model rejected"}, {"details", details}}}}
                 .dump() +
             "\n";
    return r;
  }

  static std::map<std::string, double> metrics_from(const RuleBase& rb, const ordered_json& obj) {
    if (!obj.is_object()) throw ValidationError("metrics must be an object");
    std::map<std::string, double> out;
    for (const auto& [k, v] : obj.items()) {
      if (!v.is_number()) throw ValidationError("metric '" + k + "' must be a number");
      out[resolve_metric_key(rb, k)] = v.get<double>();
    }
    return out;
  }

  static ordered_json simulate(const Snapshot& snap, const ordered_json& req) {
    const Fcm& fcm = snap.model.fcm(opt_string(req, "fcm"));
    std::set<std::size_t> on;
    for (const auto& n : req.value("on", ordered_json::array())) {
      auto id = fcm.find(n.get<std::string>());
      if (!id) throw UnknownName("concept", n.get<std::string>(), fcm.concepts());
      on.insert(id->index);
    }
    const std::string mode = req.value("mode", std::string(to_string(fcm.mode())));
    std::optional<std::size_t> max_iter;
    if (req.contains("max_iter")) max_iter = req.at("max_iter").get<std::size_t>();
    auto initial = StateVector::activate(fcm.size(), on);
    if (mode == "binary") return attractor_json(fcm, hidden_pattern(fcm, initial, max_iter));
    if (mode == "continuous" || mode == "weighted")
      return attractor_json(fcm, continuous_pattern(fcm, initial, max_iter.value_or(1000)));
    throw ValidationError("mode must be binary or continuous");
  }

  static ordered_json evaluate(const Snapshot& snap, const ordered_json& req) {
    RuleBase rb = snap.model.rule_base(opt_string(req, "rule_base"));
    auto metrics = metrics_from(rb, req.value("metrics", ordered_json::object()));
    InferenceSettings settings = snap.model.settings;
    if (req.contains("resolution")) settings.defuzz_resolution = req.at("resolution").get<std::size_t>();
    try {
      return prediction_json(rb, predict_cost(rb, metrics, settings));
    } catch (const NoRuleFired& e) {
      return no_rule_fired_json(rb, e.degrees());
    }
  }

  static ordered_json project_frm(const Snapshot& snap, const ordered_json& req) {
    const Frm& frm = snap.model.frm(opt_string(req, "frm"));
    if (req.contains("metrics")) {
      std::vector<double> act(frm.range().size(), 0.0);
      for (const auto& [k, v] : req.at("metrics").items()) act[frm.range_index(k)] = v.get<double>();
      auto back = back_project(frm, act);
      ordered_json out = ordered_json::array();
      for (std::size_t i = 0; i < back.size(); ++i) out.push_back({{"node", frm.domain()[i]}, {"effect", back[i]}});
      return ordered_json{{"processes", std::move(out)}};
    }
    std::vector<double> act(frm.domain().size(), 0.0);
    if (req.contains("activation")) {
      for (const auto& [k, v] : req.at("activation").items()) act[frm.domain_index(k)] = v.get<double>();
    }
    for (const auto& p : req.value("processes", ordered_json::array())) act[frm.domain_index(p.get<std::string>())] = 1.0;
    return effect_summary_json(project(frm, act));
  }

  struct ScenarioInputs {
    RuleBase rb;
    const Frm* frm = nullptr;
    Scenario scenario;
  };

  static ScenarioInputs scenario_from(const Snapshot& snap, const ordered_json& req) {
    ScenarioInputs in;
    in.rb = snap.model.rule_base(opt_string(req, "rule_base"));
    const EffectTable& table = snap.model.effect_table(opt_string(req, "effect_table"));
    in.frm = &snap.model.frm(table.frm);
    in.scenario.effects = table;
    in.scenario.baseline = metrics_from(in.rb, req.value("baseline", ordered_json::object()));
    for (const auto& p : req.value("processes", ordered_json::array())) in.scenario.processes.push_back(p.get<std::string>());
    return in;
  }

  static ordered_json compare_scenario(const Snapshot& snap, const ordered_json& req) {
    auto in = scenario_from(snap, req);
    return gap_report_json(in.rb, compare(in.scenario, *in.frm, in.rb, snap.model.settings));
  }

  static ordered_json sweep_scenarios(const Snapshot& snap, const ordered_json& req) {
    auto in = scenario_from(snap, req);
    return sweep_json(in.rb, sweep(in.scenario.baseline, in.scenario.effects, *in.frm, in.rb, snap.model.settings));
  }

  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace fcmgap

#pragma once

// Model documents: one JSON text holding maps, variables, rule bases,
// relational maps, effect tables and engine settings. The writer is canonical
// (fixed key order, two-space indent, shortest round-trip numbers, LF, final
// newline) so equal documents serialize to identical bytes.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fcmgap/error.hpp"
#include "fcmgap/fcm.hpp"
#include "fcmgap/frm.hpp"
#include "fcmgap/inference.hpp"
#include "fcmgap/itil.hpp"
#include "fcmgap/linguistic.hpp"
#include "fcmgap/scenario.hpp"

namespace fcmgap {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

struct NamedFcm {
  std::string name;
  Fcm fcm;
  friend bool operator==(const NamedFcm&, const NamedFcm&) = default;
};

struct RuleBaseDef {
  std::string name;
  std::vector<std::string> inputs;  // variable names
  std::string output;
  std::vector<FuzzyRule> rules;
  friend bool operator==(const RuleBaseDef&, const RuleBaseDef&) = default;
};

struct NamedFrm {
  std::string name;
  Frm frm;
  friend bool operator==(const NamedFrm&, const NamedFrm&) = default;
};

struct ModelDocument {
  int format_version = kFormatVersion;
  std::vector<NamedFcm> fcms;
  std::vector<LinguisticVariable> variables;
  std::vector<RuleBaseDef> rule_bases;
  std::vector<NamedFrm> frms;
  std::vector<EffectTable> effect_tables;
  InferenceSettings settings;
  ordered_json extras = ordered_json::object();  // unknown top-level keys kept by lenient loads

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;

  // Lookups by name; an empty name selects the first entry.

  const Fcm& fcm(const std::string& name = {}) const { return find(fcms, name, "FCM").fcm; }
  const Frm& frm(const std::string& name = {}) const { return find(frms, name, "FRM").frm; }
  const EffectTable& effect_table(const std::string& name = {}) const {
    return find(effect_tables, name, "effect table");
  }
  const RuleBaseDef& rule_base_def(const std::string& name = {}) const {
    return find(rule_bases, name, "rule base");
  }

  const LinguisticVariable& variable(const std::string& name) const {
    for (const auto& v : variables)
      if (v.name() == name) return v;
    std::vector<std::string> names;
    for (const auto& v : variables) names.push_back(v.name());
    throw UnknownName("variable", name, names);
  }

  RuleBase rule_base(const std::string& name = {}) const {
    const auto& def = rule_base_def(name);
    std::vector<LinguisticVariable> inputs;
    for (const auto& n : def.inputs) inputs.push_back(variable(n));
    return RuleBase(std::move(inputs), variable(def.output), def.rules);
  }

 private:
  template <typename T>
  static const T& find(const std::vector<T>& items, const std::string& name, const char* kind) {
    if (items.empty()) throw ValidationError(std::string("model has no ") + kind);
    if (name.empty()) return items.front();
    for (const auto& it : items)
      if (it.name == name) return it;
    std::vector<std::string> names;
    for (const auto& it : items) names.push_back(it.name);
    throw UnknownName(kind, name, names);
  }
};

struct ModelIssue {
  std::string path;  // JSON pointer, or "line L, column C" for syntax errors
  std::string message;

  std::string str() const { return path.empty() ? message : path + ": " + message; }
};

class ModelError : public ValidationError {
 public:
  explicit ModelError(std::vector<ModelIssue> issues)
      : ValidationError(summary(issues)), issues_(std::move(issues)) {}

  const std::vector<ModelIssue>& issues() const noexcept { return issues_; }

 private:
  static std::string summary(const std::vector<ModelIssue>& issues) {
    std::string s = "invalid model";
    for (const auto& i : issues) s += "\n  " + i.str();
    return s;
  }
  std::vector<ModelIssue> issues_;
};

struct LoadOptions {
  bool strict = true;  // strict: unknown keys are errors; lenient: warnings (top-level ones kept)
};

struct LoadResult {
  std::optional<ModelDocument> document;
  std::vector<ModelIssue> errors;
  std::vector<ModelIssue> warnings;

  bool ok() const noexcept { return document.has_value(); }
};

namespace detail {

class Reader {
 public:
  Reader(const LoadOptions& opts, LoadResult& result) : opts_(opts), result_(result) {}

  void error(const std::string& path, std::string msg) { result_.errors.push_back({path, std::move(msg)}); }

  void check_keys(const ordered_json& obj, const std::string& path, std::initializer_list<const char*> known,
                  ordered_json* keep = nullptr) {
    for (const auto& [key, value] : obj.items()) {
      bool found = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
      if (found) continue;
      const std::string where = path + "/" + key;
      if (opts_.strict) {
        error(where, "unknown field");
      } else if (keep) {
        (*keep)[key] = value;
        result_.warnings.push_back({where, "unknown field preserved"});
      } else {
        result_.warnings.push_back({where, "unknown field ignored"});
      }
    }
  }

  const ordered_json* member(const ordered_json& obj, const std::string& path, const char* key,
                             bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(path + "/" + key, "missing field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string_at(const ordered_json& obj, const std::string& path, const char* key) {
    const auto* v = member(obj, path, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<double> number(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) {
      error(path, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::vector<std::string>> strings(const ordered_json& obj, const std::string& path, const char* key) {
    const auto* v = member(obj, path, key);
    if (!v) return std::nullopt;
    const std::string where = path + "/" + key;
    if (!v->is_array()) {
      error(where, "expected an array of strings");
      return std::nullopt;
    }
    std::vector<std::string> out;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        error(where + "/" + std::to_string(i), "expected a string");
        ok = false;
      } else {
        out.push_back((*v)[i].get<std::string>());
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<double>> numbers(const ordered_json& v, const std::string& path) {
    if (!v.is_array()) {
      error(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto n = number(v[i], path + "/" + std::to_string(i));
      if (n) out.push_back(*n);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<Matrix<double>> matrix(const ordered_json& obj, const std::string& path, const char* key,
                                       std::size_t rows, std::size_t cols) {
    const auto* v = member(obj, path, key);
    if (!v) return std::nullopt;
    const std::string where = path + "/" + key;
    if (!v->is_array()) {
      error(where, "expected an array of rows");
      return std::nullopt;
    }
    if (v->size() != rows) {
      error(where, "expected " + std::to_string(rows) + " rows, found " + std::to_string(v->size()));
      return std::nullopt;
    }
    std::vector<std::vector<double>> out;
    bool ok = true;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string rp = where + "/" + std::to_string(r);
      auto row = numbers((*v)[r], rp);
      if (!row) {
        ok = false;
        continue;
      }
      if (row->size() != cols) {
        error(rp, "expected " + std::to_string(cols) + " columns, found " + std::to_string(row->size()));
        ok = false;
        continue;
      }
      out.push_back(std::move(*row));
    }
    if (!ok) return std::nullopt;
    if (rows == 0) return Matrix<double>(0, cols);
    return Matrix<double>::from_rows(out);
  }

  template <typename F>
  void each(const ordered_json& root, const char* key, F&& f) {
    auto it = root.find(key);
    if (it == root.end()) return;
    const std::string path = std::string("/") + key;
    if (!it->is_array()) {
      error(path, "expected an array");
      return;
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = path + "/" + std::to_string(i);
      if (!(*it)[i].is_object()) {
        error(p, "expected an object");
        continue;
      }
      f((*it)[i], p);
    }
  }

 private:
  const LoadOptions& opts_;
  LoadResult& result_;
};

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
void check_unique_names(Reader& rd, const std::vector<T>& items, const char* key,
                        const std::vector<std::size_t>& positions) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!seen.insert(items[i].name).second)
      rd.error(std::string("/") + key + "/" + std::to_string(positions[i]) + "/name",
               "duplicate name '" + items[i].name + "'");
}

}  // namespace detail

/// Parses and fully validates a model document. Never throws on bad input;
/// problems are returned as issues with a location.
inline LoadResult parse_model(std::string_view text, const LoadOptions& opts = {}) {
  LoadResult result;
  detail::Reader rd(opts, result);

  ordered_json root;
  try {
    root = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    result.errors.push_back({detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1), e.what()});
    return result;
  }
  if (!root.is_object()) {
    rd.error("", "top level must be an object");
    return result;
  }

  ModelDocument doc;
  rd.check_keys(root, "",
                {"format_version", "fcms", "variables", "rule_bases", "frms", "effect_tables", "settings"},
                &doc.extras);

  if (const auto* v = rd.member(root, "", "format_version")) {
    if (!v->is_number_integer()) {
      rd.error("/format_version", "expected an integer");
    } else {
      doc.format_version = v->get<int>();
      if (doc.format_version > kFormatVersion)
        rd.error("/format_version", "version " + std::to_string(doc.format_version) +
                                        " is newer than supported version " + std::to_string(kFormatVersion));
      else if (doc.format_version < 1)
        rd.error("/format_version", "version must be >= 1");
    }
  }
  if (!result.errors.empty()) return result;

  std::vector<std::size_t> fcm_pos;
  rd.each(root, "fcms", [&](const ordered_json& o, const std::string& p) {
    rd.check_keys(o, p, {"name", "mode", "concepts", "weights"});
    auto name = rd.string_at(o, p, "name");
    auto mode_s = rd.string_at(o, p, "mode");
    auto concepts = rd.strings(o, p, "concepts");
    std::optional<FcmMode> mode;
    if (mode_s) {
      mode = parse_fcm_mode(*mode_s);
      if (!mode) rd.error(p + "/mode", "expected \"binary\" or \"weighted\"");
    }
    if (!concepts) return;
    auto weights = rd.matrix(o, p, "weights", concepts->size(), concepts->size());
    if (!name || !mode || !weights) return;
    Fcm fcm(std::move(*concepts), std::move(*weights), *mode);
    for (const auto& v : validate_fcm(fcm).violations) rd.error(p, v.message);
    doc.fcms.push_back({*name, std::move(fcm)});
    fcm_pos.push_back(std::stoul(p.substr(p.rfind('/') + 1)));
  });
  detail::check_unique_names(rd, doc.fcms, "fcms", fcm_pos);

  std::set<std::string> var_names;
  rd.each(root, "variables", [&](const ordered_json& o, const std::string& p) {
    rd.check_keys(o, p, {"name", "unit", "range", "terms"});
    auto name = rd.string_at(o, p, "name");
    std::string unit;
    if (const auto* u = rd.member(o, p, "unit", false)) {
      if (u->is_string()) unit = u->get<std::string>();
      else rd.error(p + "/unit", "expected a string");
    }
    std::optional<std::vector<double>> range;
    if (const auto* r = rd.member(o, p, "range")) {
      range = rd.numbers(*r, p + "/range");
      if (range && range->size() != 2) {
        rd.error(p + "/range", "expected [lo, hi]");
        range.reset();
      }
    }
    std::vector<Term> terms;
    bool terms_ok = true;
    if (const auto* ts = rd.member(o, p, "terms")) {
      if (!ts->is_array()) {
        rd.error(p + "/terms", "expected an array");
        terms_ok = false;
      } else {
        for (std::size_t i = 0; i < ts->size(); ++i) {
          const std::string tp = p + "/terms/" + std::to_string(i);
          const auto& t = (*ts)[i];
          if (!t.is_object()) {
            rd.error(tp, "expected an object");
            terms_ok = false;
            continue;
          }
          rd.check_keys(t, tp, {"name", "shape", "points"});
          auto tname = rd.string_at(t, tp, "name");
          auto shape = rd.string_at(t, tp, "shape");
          std::optional<std::vector<double>> pts;
          if (const auto* pv = rd.member(t, tp, "points")) pts = rd.numbers(*pv, tp + "/points");
          if (!tname || !shape || !pts) {
            terms_ok = false;
            continue;
          }
          const std::size_t need = *shape == "triangle" ? 3 : *shape == "trapezoid" ? 4 : 0;
          if (need == 0) {
            rd.error(tp + "/shape", "expected \"triangle\" or \"trapezoid\"");
            terms_ok = false;
            continue;
          }
          if (pts->size() != need) {
            rd.error(tp + "/points", "expected " + std::to_string(need) + " breakpoints");
            terms_ok = false;
            continue;
          }
          if (!std::is_sorted(pts->begin(), pts->end())) {
            rd.error(tp + "/points", "breakpoints must be non-decreasing");
            terms_ok = false;
            continue;
          }
          const auto& q = *pts;
          terms.push_back({*tname, need == 3 ? MembershipFunction::triangle(q[0], q[1], q[2])
                                             : MembershipFunction::trapezoid(q[0], q[1], q[2], q[3])});
        }
      }
    } else {
      terms_ok = false;
    }
    if (!name || !range || !terms_ok) return;
    LinguisticVariable var(*name, (*range)[0], (*range)[1], std::move(terms), std::move(unit));
    for (auto& e : var.validate()) rd.error(p, std::move(e));
    if (!var_names.insert(*name).second) rd.error(p + "/name", "duplicate name '" + *name + "'");
    doc.variables.push_back(std::move(var));
  });

  auto find_var = [&](const std::string& n) -> const LinguisticVariable* {
    for (const auto& v : doc.variables)
      if (v.name() == n) return &v;
    return nullptr;
  };
  // Resolves a term label, accepting aliases such as "usual" or "very much".
  auto resolve_term = [](const LinguisticVariable& v, const std::string& label) -> std::optional<std::string> {
    if (v.find_term(label)) return label;
    auto canon = canonical_term_name(label);
    if (v.find_term(canon)) return canon;
    return std::nullopt;
  };

  std::vector<std::size_t> rb_pos;
  rd.each(root, "rule_bases", [&](const ordered_json& o, const std::string& p) {
    rd.check_keys(o, p, {"name", "inputs", "output", "rules"});
    auto name = rd.string_at(o, p, "name");
    auto inputs = rd.strings(o, p, "inputs");
    auto output = rd.string_at(o, p, "output");
    bool ok = name && inputs && output;
    if (inputs) {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < inputs->size(); ++i) {
        if (!find_var((*inputs)[i])) {
          rd.error(p + "/inputs/" + std::to_string(i), "unresolved variable '" + (*inputs)[i] + "'");
          ok = false;
        } else if (!seen.insert((*inputs)[i]).second) {
          rd.error(p + "/inputs/" + std::to_string(i), "duplicate input '" + (*inputs)[i] + "'");
          ok = false;
        }
      }
    }
    if (output && !find_var(*output)) {
      rd.error(p + "/output", "unresolved variable '" + *output + "'");
      ok = false;
    }
    RuleBaseDef def;
    const auto* rules = rd.member(o, p, "rules");
    if (rules && !rules->is_array()) {
      rd.error(p + "/rules", "expected an array");
      ok = false;
    } else if (rules && ok) {
      const auto* out_var = find_var(*output);
      for (std::size_t i = 0; i < rules->size(); ++i) {
        const std::string rp = p + "/rules/" + std::to_string(i);
        const std::string label = "rule " + std::to_string(i + 1);
        const auto& r = (*rules)[i];
        if (!r.is_object()) {
          rd.error(rp, "expected an object");
          ok = false;
          continue;
        }
        rd.check_keys(r, rp, {"if", "then"});
        const auto* ante = rd.member(r, rp, "if");
        const auto* cons = rd.member(r, rp, "then");
        FuzzyRule rule;
        bool rule_ok = ante && cons;
        if (ante) {
          if (!ante->is_object() || ante->empty()) {
            rd.error(rp + "/if", label + ": antecedent must be a non-empty object");
            rule_ok = false;
          } else {
            for (const auto& [var, term] : ante->items()) {
              const std::string ap = rp + "/if/" + var;
              if (std::find(inputs->begin(), inputs->end(), var) == inputs->end()) {
                rd.error(ap, label + ": unresolved input variable '" + var + "'");
                rule_ok = false;
              } else if (!term.is_string()) {
                rd.error(ap, label + ": expected a term name");
                rule_ok = false;
              } else if (auto t = resolve_term(*find_var(var), term.get<std::string>())) {
                rule.antecedent[var] = *t;
              } else {
                rd.error(ap, label + ": unresolved term '" + term.get<std::string>() + "' of " + var);
                rule_ok = false;
              }
            }
          }
        }
        if (cons) {
          if (!cons->is_object() || cons->size() != 1) {
            rd.error(rp + "/then", label + ": consequent must be a single {variable: term}");
            rule_ok = false;
          } else {
            const auto& [var, term] = *cons->items().begin();
            const std::string cp = rp + "/then/" + var;
            if (var != *output) {
              rd.error(cp, label + ": consequent variable '" + var + "' is not the output " + *output);
              rule_ok = false;
            } else if (!term.is_string()) {
              rd.error(cp, label + ": expected a term name");
              rule_ok = false;
            } else if (auto t = resolve_term(*out_var, term.get<std::string>())) {
              rule.output_variable = var;
              rule.output_term = *t;
            } else {
              rd.error(cp, label + ": unresolved term '" + term.get<std::string>() + "' of " + var);
              rule_ok = false;
            }
          }
        }
        if (rule_ok) def.rules.push_back(std::move(rule));
        else ok = false;
      }
    }
    if (!ok) return;
    def.name = *name;
    def.inputs = std::move(*inputs);
    def.output = *output;
    std::vector<LinguisticVariable> in_vars;
    for (const auto& n : def.inputs) in_vars.push_back(*find_var(n));
    RuleBase rb(std::move(in_vars), *find_var(def.output), def.rules);
    for (auto& e : rb.validate()) rd.error(p, std::move(e));
    doc.rule_bases.push_back(std::move(def));
    rb_pos.push_back(std::stoul(p.substr(p.rfind('/') + 1)));
  });
  detail::check_unique_names(rd, doc.rule_bases, "rule_bases", rb_pos);

  std::vector<std::size_t> frm_pos;
  rd.each(root, "frms", [&](const ordered_json& o, const std::string& p) {
    rd.check_keys(o, p, {"name", "domain", "range", "relation"});
    auto name = rd.string_at(o, p, "name");
    auto domain = rd.strings(o, p, "domain");
    auto range = rd.strings(o, p, "range");
    if (!domain || !range) return;
    auto rel = rd.matrix(o, p, "relation", domain->size(), range->size());
    if (!name || !rel) return;
    auto errs = Frm::validate(*domain, *range, *rel);
    for (auto& e : errs) rd.error(p, std::move(e));
    if (!errs.empty()) return;
    doc.frms.push_back({*name, Frm(std::move(*domain), std::move(*range), std::move(*rel))});
    frm_pos.push_back(std::stoul(p.substr(p.rfind('/') + 1)));
  });
  detail::check_unique_names(rd, doc.frms, "frms", frm_pos);

  std::vector<std::size_t> et_pos;
  rd.each(root, "effect_tables", [&](const ordered_json& o, const std::string& p) {
    rd.check_keys(o, p, {"name", "frm", "entries"});
    auto name = rd.string_at(o, p, "name");
    auto frm_name = rd.string_at(o, p, "frm");
    const auto* entries = rd.member(o, p, "entries");
    if (!name || !frm_name || !entries) return;
    if (!entries->is_array()) {
      rd.error(p + "/entries", "expected an array");
      return;
    }
    EffectTable table{*name, *frm_name, {}};
    bool ok = true;
    for (std::size_t i = 0; i < entries->size(); ++i) {
      const std::string ep = p + "/entries/" + std::to_string(i);
      const auto& e = (*entries)[i];
      if (!e.is_object()) {
        rd.error(ep, "expected an object");
        ok = false;
        continue;
      }
      rd.check_keys(e, ep, {"process", "metric", "delta"});
      auto process = rd.string_at(e, ep, "process");
      auto metric = rd.string_at(e, ep, "metric");
      std::optional<double> delta;
      if (const auto* d = rd.member(e, ep, "delta")) delta = rd.number(*d, ep + "/delta");
      if (!process || !metric || !delta) {
        ok = false;
        continue;
      }
      table.entries.push_back({*process, *metric, *delta});
    }
    if (!ok) return;
    auto frm = std::find_if(doc.frms.begin(), doc.frms.end(), [&](const NamedFrm& f) { return f.name == *frm_name; });
    if (frm == doc.frms.end()) {
      rd.error(p + "/frm", "unresolved FRM '" + *frm_name + "'");
      return;
    }
    for (auto& err : validate_effect_table(table, frm->frm)) rd.error(p, std::move(err));
    doc.effect_tables.push_back(std::move(table));
    et_pos.push_back(std::stoul(p.substr(p.rfind('/') + 1)));
  });
  detail::check_unique_names(rd, doc.effect_tables, "effect_tables", et_pos);

  if (const auto* s = rd.member(root, "", "settings", false)) {
    if (!s->is_object()) {
      rd.error("/settings", "expected an object");
    } else {
      rd.check_keys(*s, "/settings", {"and_op", "agg_op", "implication", "defuzz_method", "defuzz_resolution"});
      auto str = [&](const char* key, std::string& dst) {
        if (!s->contains(key)) return;
        if (auto v = rd.string_at(*s, "/settings", key)) dst = *v;
      };
      str("and_op", doc.settings.and_op);
      str("agg_op", doc.settings.agg_op);
      str("implication", doc.settings.implication);
      str("defuzz_method", doc.settings.defuzz_method);
      if (s->contains("defuzz_resolution")) {
        const auto& r = (*s)["defuzz_resolution"];
        if (!r.is_number_unsigned()) rd.error("/settings/defuzz_resolution", "expected a positive integer");
        else doc.settings.defuzz_resolution = r.get<std::size_t>();
      }
      for (auto& e : doc.settings.validate()) rd.error("/settings", std::move(e));
    }
  }

  // Preserved keys are kept sorted, matching the order the writer emits.
  std::map<std::string, ordered_json> sorted;
  for (const auto& item : doc.extras.items()) sorted[item.key()] = item.value();
  doc.extras = ordered_json::object();
  for (auto& [k, v] : sorted) doc.extras[k] = std::move(v);

  if (result.errors.empty()) result.document = std::move(doc);
  return result;
}

/// Throwing variant of parse_model.
inline ModelDocument load_model(std::string_view text, const LoadOptions& opts = {}) {
  auto r = parse_model(text, opts);
  if (!r.ok()) throw ModelError(std::move(r.errors));
  return std::move(*r.document);
}

inline ordered_json to_json(const ModelDocument& doc) {
  ordered_json root = ordered_json::object();
  root["format_version"] = doc.format_version;

  auto matrix = [](const Matrix<double>& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (double v : m.row(r)) row.push_back(v);
      rows.push_back(std::move(row));
    }
    return rows;
  };

  root["fcms"] = ordered_json::array();
  for (const auto& f : doc.fcms) {
    ordered_json o;
    o["name"] = f.name;
    o["mode"] = to_string(f.fcm.mode());
    o["concepts"] = f.fcm.concepts();
    o["weights"] = matrix(f.fcm.weights());
    root["fcms"].push_back(std::move(o));
  }

  root["variables"] = ordered_json::array();
  for (const auto& v : doc.variables) {
    ordered_json o;
    o["name"] = v.name();
    o["unit"] = v.unit();
    o["range"] = {v.lo(), v.hi()};
    o["terms"] = ordered_json::array();
    for (const auto& t : v.terms()) {
      ordered_json to;
      to["name"] = t.name;
      to["shape"] = t.mf.shape() == MembershipFunction::Shape::triangle ? "triangle" : "trapezoid";
      to["points"] = t.mf.points();
      o["terms"].push_back(std::move(to));
    }
    root["variables"].push_back(std::move(o));
  }

  root["rule_bases"] = ordered_json::array();
  for (const auto& rb : doc.rule_bases) {
    ordered_json o;
    o["name"] = rb.name;
    o["inputs"] = rb.inputs;
    o["output"] = rb.output;
    o["rules"] = ordered_json::array();
    for (const auto& r : rb.rules) {
      ordered_json ro;
      ro["if"] = ordered_json::object();
      // Antecedents follow the rule base's input order.
      for (const auto& in : rb.inputs)
        if (auto it = r.antecedent.find(in); it != r.antecedent.end()) ro["if"][in] = it->second;
      ro["then"] = ordered_json::object({{r.output_variable, r.output_term}});
      o["rules"].push_back(std::move(ro));
    }
    root["rule_bases"].push_back(std::move(o));
  }

  root["frms"] = ordered_json::array();
  for (const auto& f : doc.frms) {
    ordered_json o;
    o["name"] = f.name;
    o["domain"] = f.frm.domain();
    o["range"] = f.frm.range();
    o["relation"] = matrix(f.frm.relation());
    root["frms"].push_back(std::move(o));
  }

  root["effect_tables"] = ordered_json::array();
  for (const auto& t : doc.effect_tables) {
    ordered_json o;
    o["name"] = t.name;
    o["frm"] = t.frm;
    o["entries"] = ordered_json::array();
    for (const auto& e : t.entries)
      o["entries"].push_back(ordered_json{{"process", e.process}, {"metric", e.metric}, {"delta", e.delta}});
    root["effect_tables"].push_back(std::move(o));
  }

  root["settings"] = ordered_json{{"and_op", doc.settings.and_op},
                                  {"agg_op", doc.settings.agg_op},
                                  {"implication", doc.settings.implication},
                                  {"defuzz_method", doc.settings.defuzz_method},
                                  {"defuzz_resolution", doc.settings.defuzz_resolution}};

  // Preserved unknown keys come last, sorted.
  std::map<std::string, ordered_json> extras;
  for (const auto& item : doc.extras.items()) extras[item.key()] = item.value();
  for (auto& [k, v] : extras) root[k] = std::move(v);
  return root;
}

/// Canonical text form.
inline std::string save_model(const ModelDocument& doc) {
  return to_json(doc).dump(2, ' ', false, nlohmann::json::error_handler_t::strict) + "\n";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct BuiltinModel {
  std::string name;
  ModelDocument document;
};

inline ModelDocument itil_service_support_model() {
  ModelDocument doc;
  doc.fcms = {{"binary", itil::binary_goal_map()},
              {"weighted", itil::weighted_goal_map()},
              {"optimum", itil::optimum_goal_map()}};
  doc.variables = itil::metric_variables();
  doc.variables.push_back(itil::cost_variable());
  RuleBaseDef rb{"cost", {}, itil::kCost, itil::cost_rules()};
  for (const auto& v : itil::metric_variables()) rb.inputs.push_back(v.name());
  doc.rule_bases.push_back(std::move(rb));
  const Frm frm = itil_service_support_frm();
  doc.frms = {{"itil-processes", frm}};
  doc.effect_tables = {itil::default_effect_table(frm, "itil-processes")};
  return doc;
}

/// Teaching-state / student-outcome relational map. Only node labels are
/// given for this example; the three diagonal links are illustrative.
inline ModelDocument teaching_frm_model() {
  ModelDocument doc;
  doc.frms = {{"teaching",
               Frm({"Teaching is good", "Teaching is poor", "Teaching is mediocre", "Teacher is kind",
                    "Teacher is harsh"},
                   {"Good Student", "Bad Student", "Average Student"},
                   Matrix<double>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {0, 0, 0}})}};
  return doc;
}

/// Five-concept socio-economic sample with its single documented edge.
inline ModelDocument socio_economic_model() {
  ModelDocument doc;
  Matrix<double> w(5, 5, 0.0);
  w(0, 4) = 1.0;  // population -> unemployment
  doc.fcms = {{"socio-economic",
               Fcm({"Population", "Crime", "EconomicCondition", "Poverty", "Unemployment"}, std::move(w),
                   FcmMode::binary)}};
  return doc;
}

inline std::vector<BuiltinModel> builtin_models() {
  return {{"itil-service-support", itil_service_support_model()},
          {"teaching-frm", teaching_frm_model()},
          {"socio-economic-fcm", socio_economic_model()}};
}

inline ModelDocument builtin_model(const std::string& name) {
  std::vector<std::string> names;
  for (auto& m : builtin_models()) {
    if (m.name == name) return std::move(m.document);
    names.push_back(m.name);
  }
  throw UnknownName("builtin model", name, names);
}

}  // namespace fcmgap

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "fcmgap/error.hpp"
#include "fcmgap/matrix.hpp"

namespace fcmgap {

/// Fuzzy relational map: signed relation from a domain node set (rows) to a
/// disjoint range node set (columns). Invariants are checked on construction.
class Frm {
 public:
  Frm() = default;
  Frm(std::vector<std::string> domain, std::vector<std::string> range, Matrix<double> relation)
      : domain_(std::move(domain)), range_(std::move(range)), relation_(std::move(relation)) {
    if (auto errs = validate(domain_, range_, relation_); !errs.empty()) throw ValidationError(errs.front());
  }

  static std::vector<std::string> validate(const std::vector<std::string>& domain,
                                           const std::vector<std::string>& range,
                                           const Matrix<double>& relation) {
    std::vector<std::string> errors;
    std::set<std::string> d;
    std::set<std::string> r;
    for (const auto& n : domain) {
      if (n.empty()) errors.push_back("empty domain node name");
      else if (!d.insert(n).second) errors.push_back("duplicate domain node '" + n + "'");
    }
    for (const auto& n : range) {
      if (n.empty()) errors.push_back("empty range node name");
      else if (!r.insert(n).second) errors.push_back("duplicate range node '" + n + "'");
      if (d.count(n)) errors.push_back("node '" + n + "' is in both the domain and the range");
    }
    if (relation.rows() != domain.size() || relation.cols() != range.size()) {
      errors.push_back("relation is " + std::to_string(relation.rows()) + "x" + std::to_string(relation.cols()) +
                       ", expected " + std::to_string(domain.size()) + "x" + std::to_string(range.size()));
      return errors;
    }
    for (std::size_t i = 0; i < relation.rows(); ++i)
      for (std::size_t j = 0; j < relation.cols(); ++j)
        if (!(relation(i, j) >= -1.0 && relation(i, j) <= 1.0))
          errors.push_back("relation (" + domain[i] + ", " + range[j] + ") outside [-1, 1]");
    return errors;
  }

  const std::vector<std::string>& domain() const noexcept { return domain_; }
  const std::vector<std::string>& range() const noexcept { return range_; }
  const Matrix<double>& relation() const noexcept { return relation_; }

  std::size_t domain_index(const std::string& name) const {
    auto it = std::find(domain_.begin(), domain_.end(), name);
    if (it == domain_.end()) throw UnknownName("process", name, domain_);
    return static_cast<std::size_t>(it - domain_.begin());
  }
  std::size_t range_index(const std::string& name) const {
    auto it = std::find(range_.begin(), range_.end(), name);
    if (it == range_.end()) throw UnknownName("metric", name, range_);
    return static_cast<std::size_t>(it - range_.begin());
  }
  bool has_domain(const std::string& n) const { return std::find(domain_.begin(), domain_.end(), n) != domain_.end(); }
  bool has_range(const std::string& n) const { return std::find(range_.begin(), range_.end(), n) != range_.end(); }

  double at(const std::string& domain_node, const std::string& range_node) const {
    return relation_(domain_index(domain_node), range_index(range_node));
  }

  friend bool operator==(const Frm&, const Frm&) = default;

 private:
  std::vector<std::string> domain_;
  std::vector<std::string> range_;
  Matrix<double> relation_;
};

enum class Direction { decrease = -1, none = 0, increase = 1 };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::increase: return "increase";
    case Direction::decrease: return "decrease";
    default: return "none";
  }
}

inline Direction direction_of(double v) {
  return v > 0.0 ? Direction::increase : v < 0.0 ? Direction::decrease : Direction::none;
}

struct Effect {
  std::string node;
  double aggregate = 0.0;  // in [-1, 1]
  Direction direction = Direction::none;
};

struct EffectSummary {
  std::vector<Effect> effects;  // one per range node, in range order

  const Effect& operator[](const std::string& node) const {
    for (const auto& e : effects)
      if (e.node == node) return e;
    throw UnknownName("metric", node, {});
  }
};

namespace detail {
inline std::vector<double> clamp_unit(std::vector<double> v) {
  for (auto& x : v) x = std::clamp(x, -1.0, 1.0);
  return v;
}
}  // namespace detail

/// activation * relation, clamped to [-1, 1], with a direction per range node.
inline EffectSummary project(const Frm& frm, const std::vector<double>& domain_activation) {
  if (domain_activation.size() != frm.domain().size())
    throw DimensionMismatch("domain activation length", frm.domain().size(), domain_activation.size());
  for (double a : domain_activation)
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("domain activation must lie in [0, 1]");

  auto raw = detail::clamp_unit(row_times<double>(domain_activation, frm.relation()));
  EffectSummary out;
  for (std::size_t j = 0; j < raw.size(); ++j)
    out.effects.push_back({frm.range()[j], raw[j], direction_of(raw[j])});
  return out;
}

/// activation * relation^T, clamped to [-1, 1]: how strongly each domain node
/// is associated with the given range pattern.
inline std::vector<double> back_project(const Frm& frm, const std::vector<double>& range_activation) {
  if (range_activation.size() != frm.range().size())
    throw DimensionMismatch("range activation length", frm.range().size(), range_activation.size());
  return detail::clamp_unit(row_times<double>(range_activation, frm.relation().transposed()));
}

/// Unit activation of the named domain nodes.
inline std::vector<double> domain_activation(const Frm& frm, const std::vector<std::string>& on) {
  std::vector<double> a(frm.domain().size(), 0.0);
  for (const auto& n : on) a[frm.domain_index(n)] = 1.0;
  return a;
}

namespace itil {

inline constexpr const char* kIncident = "IncidentMgmt";
inline constexpr const char* kProblem = "ProblemMgmt";
inline constexpr const char* kChange = "ChangeMgmt";
inline constexpr const char* kAssetConfig = "ServiceAssetConfigMgmt";
inline constexpr const char* kServiceDesk = "ServiceDesk";

inline constexpr const char* kAuthorizedChanges = "AuthorizedChanges";
inline constexpr const char* kProcessOrientation = "ProcessOrientation";
inline constexpr const char* kRecording = "Recording";
inline constexpr const char* kResponseTime = "ResponseTime";
inline constexpr const char* kInterruptTime = "InterruptTime";

}  // namespace itil

/// Service-support processes to metric directions. Magnitudes are 1; only the
/// sign carries information. The service desk has no assigned effects.
inline Frm itil_service_support_frm() {
  using namespace itil;
  return Frm({kIncident, kProblem, kChange, kAssetConfig, kServiceDesk},
             {kAuthorizedChanges, kProcessOrientation, kRecording, kResponseTime, kInterruptTime},
             Matrix<double>{
                 // auth  po    rec   resp  intr
                 {1, 1, 1, -1, -1},  // incident
                 {0, 1, 0, -1, -1},  // problem
                 {1, 1, 0, 0, 0},    // change
                 {1, 1, 0, 0, 0},    // asset & configuration
                 {0, 0, 0, 0, 0},    // service desk
             });
}

}  // namespace fcmgap

#pragma once

// Fuzzy cognitive maps: signed causal digraphs over named concepts, the
// thresholded hidden-pattern iteration used on simple {-1, 0, 1} maps, a
// saturating linear update for weighted maps, and map combination.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fcmgap/error.hpp"
#include "fcmgap/matrix.hpp"

namespace fcmgap {

enum class FcmMode { binary, weighted };

inline const char* to_string(FcmMode m) { return m == FcmMode::binary ? "binary" : "weighted"; }

inline std::optional<FcmMode> parse_fcm_mode(const std::string& s) {
  if (s == "binary") return FcmMode::binary;
  if (s == "weighted") return FcmMode::weighted;
  return std::nullopt;
}

struct ConceptId {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const ConceptId&, const ConceptId&) = default;
};

/// A cognitive map. Rows of the weight matrix are causes, columns effects.
/// Construction does not validate; call validate_fcm().
class Fcm {
 public:
  Fcm() = default;
  Fcm(std::vector<std::string> concepts, Matrix<double> weights, FcmMode mode = FcmMode::weighted)
      : concepts_(std::move(concepts)), weights_(std::move(weights)), mode_(mode) {}

  const std::vector<std::string>& concepts() const noexcept { return concepts_; }
  const Matrix<double>& weights() const noexcept { return weights_; }
  FcmMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return concepts_.size(); }

  std::optional<ConceptId> find(const std::string& name) const {
    auto it = std::find(concepts_.begin(), concepts_.end(), name);
    if (it == concepts_.end()) return std::nullopt;
    return ConceptId{static_cast<std::size_t>(it - concepts_.begin()), *it};
  }

  ConceptId concept_at(std::size_t index) const { return ConceptId{index, concepts_.at(index)}; }

  double weight(const std::string& from, const std::string& to) const {
    auto a = find(from);
    auto b = find(to);
    if (!a) throw UnknownName("concept", from, concepts_);
    if (!b) throw UnknownName("concept", to, concepts_);
    return weights_(a->index, b->index);
  }

  friend bool operator==(const Fcm&, const Fcm&) = default;

 private:
  std::vector<std::string> concepts_;
  Matrix<double> weights_;
  FcmMode mode_ = FcmMode::weighted;
};

struct Violation {
  enum class Kind {
    not_square,
    size_mismatch,
    empty_name,
    duplicate_name,
    weight_out_of_range,
    nonzero_diagonal,
    non_ternary_weight,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(Violation::Kind k) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [k](const Violation& v) { return v.kind == k; }));
  }
};

inline ValidationReport validate_fcm(const Fcm& fcm) {
  using K = Violation::Kind;
  ValidationReport report;
  auto add = [&](K kind, std::string msg) { report.violations.push_back({kind, std::move(msg)}); };

  const auto& w = fcm.weights();
  if (!w.square())
    add(K::not_square, "weight matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
  if (w.rows() != fcm.size())
    add(K::size_mismatch, "matrix side " + std::to_string(w.rows()) + " != concept count " +
                              std::to_string(fcm.size()));

  std::set<std::string> seen;
  for (const auto& name : fcm.concepts()) {
    if (name.empty()) add(K::empty_name, "concept name is empty");
    else if (!seen.insert(name).second) add(K::duplicate_name, "duplicate concept '" + name + "'");
  }

  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const double e = w(i, j);
      const std::string cell = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (!(e >= -1.0 && e <= 1.0)) {
        add(K::weight_out_of_range, "weight " + cell + " = " + std::to_string(e) + " outside [-1, 1]");
        continue;
      }
      if (i == j && e != 0.0) add(K::nonzero_diagonal, "self-loop at " + cell);
      if (fcm.mode() == FcmMode::binary && e != -1.0 && e != 0.0 && e != 1.0)
        add(K::non_ternary_weight, "binary map weight " + cell + " not in {-1, 0, 1}");
    }
  }
  return report;
}

inline void require_valid(const Fcm& fcm) {
  auto report = validate_fcm(fcm);
  if (!report.ok()) throw ValidationError("invalid FCM: " + report.violations.front().message);
}

/// Activation per concept plus the set of concepts held at their initial value.
struct StateVector {
  std::vector<double> values;
  std::set<std::size_t> clamped;

  StateVector() = default;
  explicit StateVector(std::vector<double> v, std::set<std::size_t> c = {})
      : values(std::move(v)), clamped(std::move(c)) {}

  /// Binary state with every set bit clamped.
  static StateVector binary(std::vector<double> bits) {
    StateVector s(std::move(bits));
    for (std::size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i] != 0.0) s.clamped.insert(i);
    return s;
  }

  /// Binary state with exactly the given concepts on and clamped.
  static StateVector activate(std::size_t n, const std::set<std::size_t>& on) {
    StateVector s(std::vector<double>(n, 0.0), on);
    for (auto i : on) s.values.at(i) = 1.0;
    return s;
  }

  std::size_t size() const noexcept { return values.size(); }
  bool is_binary() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
  }
  bool is_unit_interval() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
  }
  std::vector<std::size_t> active() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] > 0.0) out.push_back(i);
    return out;
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;
};

namespace detail {

inline void check_state(const Fcm& fcm, const StateVector& s) {
  if (s.size() != fcm.size()) throw DimensionMismatch("state length vs concept count", fcm.size(), s.size());
  if (fcm.weights().rows() != fcm.size() || !fcm.weights().square())
    throw DimensionMismatch("weight matrix side vs concept count", fcm.size(), fcm.weights().rows());
  for (auto c : s.clamped)
    if (c >= s.size()) throw DimensionMismatch("clamped concept index", s.size(), c);
}

}  // namespace detail

/// One hidden-pattern update: out_i = 1 if (state * W)_i > 0 or i is clamped, else 0.
inline StateVector threshold_step(const Fcm& fcm, const StateVector& state) {
  detail::check_state(fcm, state);
  if (fcm.mode() != FcmMode::binary) throw ValidationError("threshold_step requires a binary-mode map");
  if (!state.is_binary()) throw ValidationError("threshold_step requires a binary state");
  for (auto c : state.clamped)
    if (state.values[c] != 1.0) throw ValidationError("clamped concept must be on in a binary state");

  const auto product = row_times<double>(state.values, fcm.weights());
  StateVector next(std::vector<double>(product.size(), 0.0), state.clamped);
  for (std::size_t i = 0; i < product.size(); ++i)
    next.values[i] = (product[i] > 0.0 || state.clamped.count(i)) ? 1.0 : 0.0;
  return next;
}

/// Linear propagation saturated to [0, 1]; clamped concepts keep their value.
inline StateVector continuous_step(const Fcm& fcm, const StateVector& state) {
  detail::check_state(fcm, state);
  if (!state.is_unit_interval()) throw ValidationError("continuous state values must lie in [0, 1]");

  const auto product = row_times<double>(state.values, fcm.weights());
  StateVector next(std::vector<double>(product.size(), 0.0), state.clamped);
  for (std::size_t i = 0; i < product.size(); ++i)
    next.values[i] = state.clamped.count(i) ? state.values[i] : std::clamp(product[i], 0.0, 1.0);
  return next;
}

struct Attractor {
  enum class Kind { fixed_point, limit_cycle };

  Kind kind = Kind::fixed_point;
  std::vector<StateVector> trajectory;  // initial state .. first repeated state
  std::size_t period = 1;
  std::size_t iterations = 0;

  const StateVector& final_state() const { return trajectory.back(); }

  /// The states forming the cycle (a single state for a fixed point).
  std::vector<StateVector> cycle() const {
    return {trajectory.end() - 1 - static_cast<std::ptrdiff_t>(period), trajectory.end() - 1};
  }
};

inline const char* to_string(Attractor::Kind k) {
  return k == Attractor::Kind::fixed_point ? "fixed-point" : "limit-cycle";
}

/// 2^n + 1, saturated for large n.
inline std::size_t default_max_iter(std::size_t n) {
  if (n >= std::numeric_limits<std::size_t>::digits - 1) return std::numeric_limits<std::size_t>::max();
  return (std::size_t{1} << n) + 1;
}

/// Iterates threshold_step from `initial` until a state repeats. An empty
/// clamp set on `initial` means "clamp every set bit".
inline Attractor hidden_pattern(const Fcm& fcm, StateVector initial,
                                std::optional<std::size_t> max_iter = std::nullopt) {
  detail::check_state(fcm, initial);
  if (!initial.is_binary()) throw ValidationError("hidden_pattern requires a binary initial state");
  if (initial.clamped.empty()) initial = StateVector::binary(std::move(initial.values));

  const std::size_t limit = max_iter.value_or(default_max_iter(fcm.size()));
  if (limit == 0) throw ValidationError("max_iter must be positive");

  Attractor out;
  std::map<std::vector<double>, std::size_t> seen;
  seen.emplace(initial.values, 0);
  out.trajectory.push_back(std::move(initial));

  for (std::size_t step = 1; step <= limit; ++step) {
    StateVector next = threshold_step(fcm, out.trajectory.back());
    auto [it, inserted] = seen.emplace(next.values, step);
    out.trajectory.push_back(std::move(next));
    if (!inserted) {
      out.iterations = step;
      out.period = step - it->second;
      out.kind = out.period == 1 ? Attractor::Kind::fixed_point : Attractor::Kind::limit_cycle;
      return out;
    }
  }
  throw NonConvergence(limit);
}

/// Iterates continuous_step until the state comes within `tolerance`
/// (max-norm) of an earlier state. The repeated state is recorded as reached.
inline Attractor continuous_pattern(const Fcm& fcm, const StateVector& initial,
                                    std::size_t max_iter = 1000, double tolerance = 1e-9) {
  detail::check_state(fcm, initial);
  if (max_iter == 0) throw ValidationError("max_iter must be positive");

  auto distance = [](const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
  };

  Attractor out;
  out.trajectory.push_back(initial);
  for (std::size_t step = 1; step <= max_iter; ++step) {
    StateVector next = continuous_step(fcm, out.trajectory.back());
    for (std::size_t k = out.trajectory.size(); k-- > 0;) {
      if (distance(out.trajectory[k], next) <= tolerance) {
        out.trajectory.push_back(std::move(next));
        out.iterations = step;
        out.period = step - k;
        out.kind = out.period == 1 ? Attractor::Kind::fixed_point : Attractor::Kind::limit_cycle;
        return out;
      }
    }
    out.trajectory.push_back(std::move(next));
  }
  throw NonConvergence(max_iter);
}

enum class Normalization { clip, scale };

inline std::optional<Normalization> parse_normalization(const std::string& s) {
  if (s == "clip") return Normalization::clip;
  if (s == "scale") return Normalization::scale;
  return std::nullopt;
}

/// Raw entrywise sum of the weight matrices. The result may leave [-1, 1].
inline Fcm sum_fcms(const std::vector<Fcm>& maps) {
  if (maps.empty()) throw ValidationError("cannot combine an empty list of maps");
  const auto& first = maps.front();
  Matrix<double> total = first.weights();
  bool all_binary = first.mode() == FcmMode::binary;
  for (std::size_t k = 1; k < maps.size(); ++k) {
    if (maps[k].concepts() != first.concepts())
      throw ValidationError("concept lists differ between map 0 and map " + std::to_string(k));
    total += maps[k].weights();
    all_binary = all_binary && maps[k].mode() == FcmMode::binary;
  }
  return Fcm(first.concepts(), std::move(total), all_binary ? FcmMode::binary : FcmMode::weighted);
}

/// Brings weights back into [-1, 1]. A binary-mode input stays binary only if
/// every resulting weight is -1, 0 or 1.
inline Fcm normalize(const Fcm& fcm, Normalization how) {
  Matrix<double> w = fcm.weights();
  if (how == Normalization::clip) {
    w.transform([](double e) { return std::clamp(e, -1.0, 1.0); });
  } else {
    double peak = 0.0;
    for (double e : w.values()) peak = std::max(peak, std::abs(e));
    if (peak > 1.0) w.transform([peak](double e) { return e / peak; });
  }
  bool ternary = std::all_of(w.values().begin(), w.values().end(),
                             [](double e) { return e == -1.0 || e == 0.0 || e == 1.0; });
  FcmMode mode = fcm.mode() == FcmMode::binary && ternary ? FcmMode::binary : FcmMode::weighted;
  return Fcm(fcm.concepts(), std::move(w), mode);
}

inline Fcm combine_fcms(const std::vector<Fcm>& maps, Normalization how = Normalization::clip) {
  return normalize(sum_fcms(maps), how);
}

inline Fcm negate(const Fcm& fcm) {
  Matrix<double> w = fcm.weights();
  w.transform([](double e) { return e == 0.0 ? 0.0 : -e; });
  return Fcm(fcm.concepts(), std::move(w), fcm.mode());
}

}  // namespace fcmgap

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mamd {

// Malformed input document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A well-formed document that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Breakpoints n_0 = 0 < n_1 < ... < n_nu of the operational horizon.
/// Segment kappa (1-based) covers slots n_{kappa-1}+1 .. n_kappa.
class TimePartition {
 public:
  TimePartition() : breakpoints_{0, 1} {}

  explicit TimePartition(std::vector<int> breakpoints)
      : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) {
      throw ValidationError("partition needs at least two breakpoints");
    }
    if (breakpoints_.front() != 0) {
      throw ValidationError("partition must start at 0");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (breakpoints_[i] <= breakpoints_[i - 1]) {
        throw ValidationError("partition must be strictly increasing");
      }
    }
  }

  int segments() const { return static_cast<int>(breakpoints_.size()) - 1; }
  int horizon() const { return breakpoints_.back(); }
  int breakpoint(int idx) const { return breakpoints_.at(idx); }
  // 1-based segment index.
  int segment_length(int kappa) const {
    return breakpoints_.at(kappa) - breakpoints_.at(kappa - 1);
  }
  // Slot count of the window (n_a, n_d].
  int window(int a, int d) const { return breakpoints_.at(d) - breakpoints_.at(a); }
  // 1-based segment containing 1-based slot j.
  int segment_of(int slot) const {
    auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), slot);
    return static_cast<int>(it - breakpoints_.begin());
  }
  const std::vector<int>& breakpoints() const { return breakpoints_; }

  friend bool operator==(const TimePartition&, const TimePartition&) = default;

 private:
  std::vector<int> breakpoints_;
};

/// A portion of MAMD service: r slots of unit power somewhere in (n_a, n_d].
struct ServiceSpec {
  int r = 0;
  int a = 0;
  int d = 0;

  friend auto operator<=>(const ServiceSpec&, const ServiceSpec&) = default;
};

inline bool is_valid(const ServiceSpec& s, const TimePartition& p) {
  return s.a >= 0 && s.a < s.d && s.d <= p.segments() && s.r > 0 &&
         s.r <= p.window(s.a, s.d);
}

inline void validate(const ServiceSpec& s, const TimePartition& p) {
  if (s.a < 0 || s.a >= s.d || s.d > p.segments()) {
    throw ValidationError("service (" + std::to_string(s.r) + "," + std::to_string(s.a) +
                          "," + std::to_string(s.d) + ") needs 0 <= a < d <= nu");
  }
  if (s.r <= 0 || s.r > p.window(s.a, s.d)) {
    throw ValidationError("service (" + std::to_string(s.r) + "," + std::to_string(s.a) +
                          "," + std::to_string(s.d) + ") needs 0 < r <= n_d - n_a = " +
                          std::to_string(p.window(s.a, s.d)));
  }
}

/// Every service in S for the partition, ordered by (a, d, r).
inline std::vector<ServiceSpec> all_services(const TimePartition& p) {
  std::vector<ServiceSpec> out;
  for (int a = 0; a < p.segments(); ++a) {
    for (int d = a + 1; d <= p.segments(); ++d) {
      for (int r = 1; r <= p.window(a, d); ++r) out.push_back({r, a, d});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Energy units available per slot, slot j stored at index j-1.
using SupplyProfile = std::vector<double>;

struct Load {
  ServiceSpec spec;
  double weight = 1.0;

  friend bool operator==(const Load&, const Load&) = default;
};

struct DemandCollection {
  std::vector<Load> loads;

  std::size_t size() const { return loads.size(); }
  bool empty() const { return loads.empty(); }

  // Sum of weight * r.
  double energy() const {
    double total = 0.0;
    for (const auto& l : loads) total += l.weight * l.spec.r;
    return total;
  }

  static DemandCollection unit(std::span<const ServiceSpec> specs) {
    DemandCollection out;
    out.loads.reserve(specs.size());
    for (const auto& s : specs) out.loads.push_back({s, 1.0});
    return out;
  }

  friend bool operator==(const DemandCollection&, const DemandCollection&) = default;
};

/// A discretized consumer class with capped-linear utility v_s * min(l, cap).
struct ConsumerType {
  std::string id;
  double cap = 1.0;
  std::map<ServiceSpec, double> values;

  double value(const ServiceSpec& s) const {
    auto it = values.find(s);
    return it == values.end() ? 0.0 : it->second;
  }

  friend bool operator==(const ConsumerType&, const ConsumerType&) = default;
};

struct Instance {
  TimePartition partition;
  SupplyProfile supply;
  DemandCollection demand;
  std::vector<ConsumerType> consumers;

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline double total(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

inline bool is_integral(double x) { return std::isfinite(x) && std::floor(x) == x; }

inline void validate_supply(std::span<const double> supply, const TimePartition& p) {
  if (static_cast<int>(supply.size()) != p.horizon()) {
    throw ValidationError("supply length " + std::to_string(supply.size()) +
                          " does not match horizon n = " + std::to_string(p.horizon()));
  }
  for (std::size_t j = 0; j < supply.size(); ++j) {
    if (!std::isfinite(supply[j]) || supply[j] < 0.0) {
      throw ValidationError("supply at slot " + std::to_string(j + 1) +
                            " must be a nonnegative number");
    }
  }
}

inline void validate(const DemandCollection& demand, const TimePartition& p) {
  for (const auto& load : demand.loads) {
    validate(load.spec, p);
    if (!std::isfinite(load.weight) || load.weight <= 0.0) {
      throw ValidationError("load weight must be positive");
    }
  }
}

inline void validate(const ConsumerType& c, const TimePartition& p) {
  if (!std::isfinite(c.cap) || c.cap <= 0.0) {
    throw ValidationError("consumer '" + c.id + "' needs cap > 0");
  }
  for (const auto& [spec, v] : c.values) {
    validate(spec, p);
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("consumer '" + c.id + "' has a negative value");
    }
  }
}

inline void validate(const Instance& inst) {
  validate_supply(inst.supply, inst.partition);
  validate(inst.demand, inst.partition);
  for (const auto& c : inst.consumers) validate(c, inst.partition);
}

/// True when every segment of the supply is nonincreasing.
inline bool is_canonical(std::span<const double> supply, const TimePartition& p) {
  for (int kappa = 1; kappa <= p.segments(); ++kappa) {
    for (int j = p.breakpoint(kappa - 1) + 1; j < p.breakpoint(kappa); ++j) {
      if (supply[j] > supply[j - 1]) return false;
    }
  }
  return true;
}

/// Sorts each segment in nonincreasing order. Adequacy is unchanged because
/// every window is a union of whole segments.
inline SupplyProfile canonicalize_supply(std::span<const double> supply,
                                         const TimePartition& p) {
  validate_supply(supply, p);
  SupplyProfile out(supply.begin(), supply.end());
  for (int kappa = 1; kappa <= p.segments(); ++kappa) {
    std::sort(out.begin() + p.breakpoint(kappa - 1), out.begin() + p.breakpoint(kappa),
              std::greater<>());
  }
  return out;
}

}  // namespace mamd

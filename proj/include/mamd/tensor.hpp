#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mamd/model.hpp"

namespace mamd {

class NotCanonical : public std::invalid_argument {
 public:
  NotCanonical()
      : std::invalid_argument("supply is not nonincreasing within each segment") {}
};

class TensorTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// k_1..k_nu with 0 <= k_kappa <= segment_length(kappa).
using TailIndex = std::vector<int>;

inline constexpr std::size_t kMaxTensorEntries = 10'000'000;
inline constexpr double kRealTolerance = 1e-9;

/// Dense nu-dimensional array over tail indices, row-major with the last
/// coordinate fastest, so flat order is lexicographic order.
class StructureTensor {
 public:
  explicit StructureTensor(const TimePartition& p) {
    const int nu = p.segments();
    dims_.resize(nu);
    strides_.resize(nu);
    std::size_t total = 1;
    for (int kappa = nu; kappa >= 1; --kappa) {
      dims_[kappa - 1] = p.segment_length(kappa) + 1;
      strides_[kappa - 1] = total;
      if (total > kMaxTensorEntries / dims_[kappa - 1]) {
        throw TensorTooLarge("structure tensor exceeds " +
                             std::to_string(kMaxTensorEntries) + " entries");
      }
      total *= dims_[kappa - 1];
    }
    values_.assign(total, 0.0);
  }

  std::size_t size() const { return values_.size(); }
  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  std::span<const double> values() const { return values_; }

  std::size_t flat(std::span<const int> k) const {
    std::size_t f = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) f += strides_[i] * k[i];
    return f;
  }

  TailIndex index(std::size_t flat) const {
    TailIndex k(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      k[i] = static_cast<int>(flat / strides_[i]);
      flat %= strides_[i];
    }
    return k;
  }

  double at(std::span<const int> k) const { return values_[flat(k)]; }
  double& operator[](std::size_t f) { return values_[f]; }
  double operator[](std::size_t f) const { return values_[f]; }
  std::size_t stride(int axis) const { return strides_[axis]; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

/// Calls fn(k) for every tail index in lexicographic order.
template <typename Fn>
void for_each_tail_index(const TimePartition& p, Fn&& fn) {
  const int nu = p.segments();
  TailIndex k(nu, 0);
  while (true) {
    fn(std::as_const(k));
    int axis = nu - 1;
    while (axis >= 0 && k[axis] == p.segment_length(axis + 1)) {
      k[axis] = 0;
      --axis;
    }
    if (axis < 0) return;
    ++k[axis];
  }
}

/// Supply left after skipping the k_kappa largest slots of each segment.
/// Assumes canonical supply.
inline double supply_tail(std::span<const double> supply, const TimePartition& p,
                          std::span<const int> k) {
  double tail = 0.0;
  for (int kappa = 1; kappa <= p.segments(); ++kappa) {
    for (int j = p.breakpoint(kappa - 1) + k[kappa - 1]; j < p.breakpoint(kappa); ++j) {
      tail += supply[j];
    }
  }
  return tail;
}

/// Service still owed by (r, a, d) after maximal service in the skipped slots:
/// [r - k_{a+1} - ... - k_d]^+.
inline int demand_tail(const ServiceSpec& s, std::span<const int> k) {
  int served = 0;
  for (int kappa = s.a + 1; kappa <= s.d; ++kappa) served += k[kappa - 1];
  return std::max(s.r - served, 0);
}

/// Builds W by the backward recursion from the all-max corner, where W = 0.
/// Each step lowers one coordinate k_j by one, adding the slot it releases and
/// subtracting the weight of loads in windows covering segment j that still
/// need service. Cost is O((nu + |pairs|) * prod(len + 1)).
inline StructureTensor compute_tensor(std::span<const double> supply,
                                      const DemandCollection& demand,
                                      const TimePartition& p) {
  validate_supply(supply, p);
  validate(demand, p);
  if (!is_canonical(supply, p)) throw NotCanonical();

  const int nu = p.segments();
  StructureTensor tensor(p);

  // need_ge[pair][s]: total weight of loads on window pair with r >= s.
  struct PairDemand {
    int a;
    int d;
    std::vector<double> need_ge;
  };
  std::vector<PairDemand> pairs;
  std::vector<int> pair_slot(static_cast<std::size_t>((nu + 1) * (nu + 1)), -1);
  for (const auto& load : demand.loads) {
    const auto key = static_cast<std::size_t>(load.spec.a * (nu + 1) + load.spec.d);
    if (pair_slot[key] < 0) {
      pair_slot[key] = static_cast<int>(pairs.size());
      pairs.push_back({load.spec.a, load.spec.d,
                       std::vector<double>(p.window(load.spec.a, load.spec.d) + 2, 0.0)});
    }
    pairs[pair_slot[key]].need_ge[load.spec.r] += load.weight;
  }
  for (auto& pd : pairs) {
    for (int s = static_cast<int>(pd.need_ge.size()) - 2; s >= 0; --s) {
      pd.need_ge[s] += pd.need_ge[s + 1];
    }
  }
  // Pairs whose window covers each segment.
  std::vector<std::vector<int>> covering(nu + 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (int j = pairs[i].a + 1; j <= pairs[i].d; ++j) covering[j].push_back(static_cast<int>(i));
  }

  std::vector<int> prefix(nu + 1, 0);
  for (std::size_t f = tensor.size(); f-- > 0;) {
    const TailIndex k = tensor.index(f);
    int axis = nu - 1;
    while (axis >= 0 && k[axis] == p.segment_length(axis + 1)) --axis;
    if (axis < 0) {
      tensor[f] = 0.0;
      continue;
    }
    for (int i = 0; i < nu; ++i) prefix[i + 1] = prefix[i] + k[i];
    const int j = axis + 1;  // 1-based segment being stepped
    double value = tensor[f + tensor.stride(axis)] +
                   supply[p.breakpoint(j - 1) + k[axis]];
    for (int idx : covering[j]) {
      const auto& pd = pairs[idx];
      // Window sum at the neighbour, which has k_j one larger.
      const int served = prefix[pd.d] - prefix[pd.a] + 1;
      if (served < static_cast<int>(pd.need_ge.size())) value -= pd.need_ge[served];
    }
    tensor[f] = value;
  }
  return tensor;
}

struct AdequacyReport {
  bool adequate = true;
  double min_value = 0.0;
  TailIndex witness;
  double surplus = 0.0;
  double tolerance = 0.0;
};

/// True when supply and weights are all integers, where the verdict is exact.
inline bool is_integer_instance(std::span<const double> supply, const DemandCollection& demand) {
  return std::all_of(supply.begin(), supply.end(), is_integral) &&
         std::all_of(demand.loads.begin(), demand.loads.end(),
                     [](const Load& l) { return is_integral(l.weight); });
}

/// Adequacy verdict from the minimum tensor entry. Supply is canonicalized
/// first. The witness is the lexicographically smallest minimizer.
inline AdequacyReport check_adequacy(std::span<const double> supply,
                                     const DemandCollection& demand, const TimePartition& p,
                                     std::optional<double> tolerance = std::nullopt) {
  const SupplyProfile canonical = canonicalize_supply(supply, p);
  const StructureTensor tensor = compute_tensor(canonical, demand, p);

  AdequacyReport report;
  report.tolerance =
      tolerance.value_or(is_integer_instance(canonical, demand) ? 0.0 : kRealTolerance);
  std::size_t best = 0;
  for (std::size_t f = 1; f < tensor.size(); ++f) {
    if (tensor[f] < tensor[best]) best = f;
  }
  report.min_value = tensor[best];
  report.witness = tensor.index(best);
  report.adequate = report.min_value >= -report.tolerance;
  report.surplus = total(canonical) - demand.energy();
  return report;
}

/// Single-segment check W_k = sum_{j>k} h_j - sum_i [r_i - k]^+ >= 0 for
/// 0 <= k < n, evaluated by the downward recursion from W_n = 0.
/// Supply must be nonincreasing.
inline bool gale_ryser_check(std::span<const long long> supply,
                             std::span<const long long> durations) {
  const auto n = static_cast<long long>(supply.size());
  if (!std::is_sorted(supply.begin(), supply.end(), std::greater<>())) {
    throw std::invalid_argument("supply must be nonincreasing");
  }
  std::vector<long long> at_least(static_cast<std::size_t>(n + 2), 0);
  for (long long r : durations) {
    if (r < 0) throw std::invalid_argument("durations must be nonnegative");
    if (r > n) return false;
    ++at_least[static_cast<std::size_t>(r)];
  }
  for (long long s = n - 1; s >= 0; --s) at_least[s] += at_least[s + 1];
  long long w = 0;
  for (long long k = n; k >= 1; --k) {
    w += supply[k - 1] - at_least[k];
    if (w < 0) return false;
  }
  return true;
}

}  // namespace mamd

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mamd/flow.hpp"
#include "mamd/model.hpp"
#include "mamd/rng.hpp"
#include "mamd/tensor.hpp"

namespace mamd::sim {

using WindowPair = std::pair<int, int>;  // (a, d)

enum class DurationLaw { kUniform };

inline std::vector<WindowPair> all_pairs(const TimePartition& p) {
  std::vector<WindowPair> out;
  for (int a = 0; a < p.segments(); ++a) {
    for (int d = a + 1; d <= p.segments(); ++d) out.emplace_back(a, d);
  }
  return out;
}

/// The `count` pairs with the narrowest windows, ties broken by (a, d).
inline std::vector<WindowPair> smallest_pairs(const TimePartition& p, std::size_t count) {
  auto pairs = all_pairs(p);
  std::stable_sort(pairs.begin(), pairs.end(), [&](const WindowPair& x, const WindowPair& y) {
    const int wx = p.window(x.first, x.second);
    const int wy = p.window(y.first, y.second);
    return wx != wy ? wx < wy : x < y;
  });
  pairs.resize(std::min(count, pairs.size()));
  return pairs;
}

struct SimConfig {
  TimePartition partition{std::vector<int>{0, 3, 7, 12, 14, 16}};
  std::vector<WindowPair> pairs = all_pairs(partition);
  int loads_per_pair = 200;
  int trials = 20;
  std::uint64_t seed = 1;
  DurationLaw duration_law = DurationLaw::kUniform;
  // When nonempty, trial t uses loads_sweep[t] loads per pair and `trials`
  // is ignored.
  std::vector<int> loads_sweep;
  unsigned threads = 1;

  int trial_count() const {
    return loads_sweep.empty() ? trials : static_cast<int>(loads_sweep.size());
  }
  int loads_for(int trial) const {
    return loads_sweep.empty() ? loads_per_pair : loads_sweep[trial];
  }
};

inline void validate(const SimConfig& c) {
  for (const auto& [a, d] : c.pairs) {
    if (a < 0 || a >= d || d > c.partition.segments()) {
      throw ValidationError("pair (" + std::to_string(a) + "," + std::to_string(d) +
                            ") is not a window of the partition");
    }
  }
  if (c.loads_per_pair < 0) throw ValidationError("loads_per_pair must be >= 0");
  for (int l : c.loads_sweep) {
    if (l < 0) throw ValidationError("sweep entries must be >= 0");
  }
  if (c.loads_sweep.empty() && c.trials < 1) throw ValidationError("trials must be >= 1");
}

/// loads_per_pair loads for each pair in order, durations drawn from the
/// configured law.
inline DemandCollection generate_demand(const SimConfig& config, int loads_per_pair,
                                        CounterRng& rng) {
  DemandCollection out;
  out.loads.reserve(config.pairs.size() * static_cast<std::size_t>(loads_per_pair));
  for (const auto& [a, d] : config.pairs) {
    const int window = config.partition.window(a, d);
    for (int i = 0; i < loads_per_pair; ++i) {
      const int r = static_cast<int>(rng.between(1, window));
      out.loads.push_back({{r, a, d}, 1.0});
    }
  }
  return out;
}

inline DemandCollection generate_demand(const SimConfig& config, CounterRng& rng) {
  return generate_demand(config, config.loads_per_pair, rng);
}

/// Column sums of one random feasible schedule: each load takes r distinct
/// slots chosen uniformly inside its window. Adequate with zero surplus.
inline SupplyProfile synthesize_adequate_supply(const DemandCollection& demand,
                                                const TimePartition& p, CounterRng& rng) {
  SupplyProfile h(p.horizon(), 0.0);
  std::vector<int> slots;
  for (const auto& load : demand.loads) {
    const int lo = p.breakpoint(load.spec.a);
    const int hi = p.breakpoint(load.spec.d);
    slots.resize(hi - lo);
    for (int j = lo; j < hi; ++j) slots[j - lo] = j;
    // Partial Fisher-Yates: the first r entries are a uniform r-subset.
    for (int i = 0; i < load.spec.r; ++i) {
      const auto pick = i + static_cast<int>(rng.below(slots.size() - i));
      std::swap(slots[i], slots[pick]);
      h[slots[i]] += load.weight;
    }
  }
  return h;
}

/// Per-segment durations (rho_1..rho_nu) with sum r, rho_kappa within the
/// segment length and zero outside (a, d], uniform over all such vectors.
/// Sampled segment by segment with completion counts.
inline std::vector<int> decompose_to_benchmark(const ServiceSpec& load, const TimePartition& p,
                                               CounterRng& rng) {
  validate(load, p);
  const int nu = p.segments();
  // ways[kappa][s]: splits of s over segments kappa..d.
  std::vector<std::vector<std::uint64_t>> ways(nu + 2, std::vector<std::uint64_t>(load.r + 1, 0));
  ways[load.d + 1][0] = 1;
  for (int kappa = load.d; kappa > load.a; --kappa) {
    const int len = p.segment_length(kappa);
    for (int s = 0; s <= load.r; ++s) {
      for (int x = 0; x <= std::min(len, s); ++x) ways[kappa][s] += ways[kappa + 1][s - x];
    }
  }
  std::vector<int> rho(nu, 0);
  int remaining = load.r;
  for (int kappa = load.a + 1; kappa <= load.d; ++kappa) {
    std::uint64_t target = rng.below(ways[kappa][remaining]);
    int x = 0;
    while (true) {
      const std::uint64_t w = ways[kappa + 1][remaining - x];
      if (target < w) break;
      target -= w;
      ++x;
    }
    rho[kappa - 1] = x;
    remaining -= x;
  }
  return rho;
}

struct GnrResult {
  std::int64_t total_gap = 0;
  std::vector<std::int64_t> segment_gaps;
  std::optional<double> gnr;  // absent when there are no loads
};

/// Model-adequacy gap of the benchmark split: each segment becomes its own
/// single-window instance over its supply slice, loads carrying rho_kappa.
inline GnrResult compute_gnr(std::span<const double> supply, const DemandCollection& demand,
                             const std::vector<std::vector<int>>& decompositions,
                             const TimePartition& p) {
  if (decompositions.size() != demand.size()) {
    throw std::invalid_argument("one decomposition per load is required");
  }
  GnrResult out;
  for (int kappa = 1; kappa <= p.segments(); ++kappa) {
    const int lo = p.breakpoint(kappa - 1);
    const int len = p.segment_length(kappa);
    const TimePartition single(std::vector<int>{0, len});
    const SupplyProfile slice(supply.begin() + lo, supply.begin() + lo + len);
    DemandCollection local;
    for (std::size_t i = 0; i < demand.size(); ++i) {
      const int rho = decompositions[i].at(kappa - 1);
      if (rho > 0) local.loads.push_back({{rho, 0, 1}, 1.0});
    }
    const std::int64_t gap = adequacy_gap(slice, local, single);
    out.segment_gaps.push_back(gap);
    out.total_gap += gap;
  }
  if (!demand.empty()) out.gnr = static_cast<double>(out.total_gap) / demand.size();
  return out;
}

struct TrialRecord {
  int trial = 0;
  std::int64_t num_loads = 0;
  std::int64_t total_gap = 0;
  std::optional<double> gnr;
};

struct GnrSummary {
  double mean = 0.0;
  double mean_last_half = 0.0;
  double std_last_half = 0.0;
  int defined = 0;  // trials with a gnr value
};

struct GnrTrace {
  std::vector<TrialRecord> records;
  GnrSummary summary;
};

/// Mean over all defined gnr values; mean and population standard deviation
/// over the defined values among the last ceil(T/2) trials.
inline GnrSummary summarize(const std::vector<TrialRecord>& records) {
  GnrSummary s;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.gnr) {
      sum += *r.gnr;
      ++s.defined;
    }
  }
  if (s.defined > 0) s.mean = sum / s.defined;
  std::vector<double> tail;
  for (std::size_t i = records.size() / 2; i < records.size(); ++i) {
    if (records[i].gnr) tail.push_back(*records[i].gnr);
  }
  if (!tail.empty()) {
    double m = 0.0;
    for (double v : tail) m += v;
    m /= tail.size();
    double var = 0.0;
    for (double v : tail) var += (v - m) * (v - m);
    s.mean_last_half = m;
    s.std_last_half = std::sqrt(var / tail.size());
  }
  return s;
}

/// One trial on its own sub-stream (seed, trial).
inline TrialRecord run_trial(const SimConfig& config, int trial) {
  CounterRng rng = CounterRng::stream(config.seed, static_cast<std::uint64_t>(trial));
  const DemandCollection demand = generate_demand(config, config.loads_for(trial), rng);
  const SupplyProfile supply = synthesize_adequate_supply(demand, config.partition, rng);
  if (!check_adequacy(supply, demand, config.partition).adequate) {
    throw std::logic_error("synthesized supply is not adequate");
  }
  std::vector<std::vector<int>> split;
  split.reserve(demand.size());
  for (const auto& load : demand.loads) {
    split.push_back(decompose_to_benchmark(load.spec, config.partition, rng));
  }
  const GnrResult g = compute_gnr(supply, demand, split, config.partition);
  return {trial, static_cast<std::int64_t>(demand.size()), g.total_gap, g.gnr};
}

/// Runs every trial, in parallel when config.threads > 1. Records are stored
/// by trial index so the trace does not depend on scheduling.
inline GnrTrace run_experiment(const SimConfig& config) {
  validate(config);
  const int n = config.trial_count();
  std::vector<TrialRecord> records(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, n));
  if (workers == 1) {
    for (int t = 0; t < n; ++t) records[t] = run_trial(config, t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (int t = next++; t < n; t = next++) {
            try {
              records[t] = run_trial(config, t);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  GnrTrace trace;
  trace.records = std::move(records);
  trace.summary = summarize(trace.records);
  return trace;
}

}  // namespace mamd::sim

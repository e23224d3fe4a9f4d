#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mamd/model.hpp"

namespace mamd {

class NonIntegerInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Blocking-flow max-flow on an explicit arc list. Arcs are stored in
/// forward/backward pairs; arc 2e is the e-th arc added.
template <typename Cap>
  requires std::is_integral_v<Cap> && std::is_signed_v<Cap>
class Dinic {
 public:
  struct Arc {
    int to;
    Cap residual;
  };

  explicit Dinic(int vertices) : adjacency_(vertices), level_(vertices), cursor_(vertices) {}

  int add_arc(int from, int to, Cap capacity) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, capacity});
    arcs_.push_back({from, 0});
    capacity_.push_back(capacity);
    adjacency_[from].push_back(id);
    adjacency_[to].push_back(id + 1);
    return id / 2;
  }

  Cap run(int source, int sink) {
    Cap total = 0;
    while (build_levels(source, sink)) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      while (Cap pushed = augment(source, sink, std::numeric_limits<Cap>::max())) {
        total += pushed;
      }
    }
    return total;
  }

  Cap flow(int arc) const { return capacity_[arc] - arcs_[2 * arc].residual; }

  /// Vertices reachable from source in the residual graph.
  std::vector<bool> reachable(int source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::vector<int> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int id : adjacency_[v]) {
        const Arc& a = arcs_[id];
        if (a.residual > 0 && !seen[a.to]) {
          seen[a.to] = true;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

 private:
  bool build_levels(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      for (int id : adjacency_[v]) {
        const Arc& a = arcs_[id];
        if (a.residual > 0 && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          queue.push(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  Cap augment(int v, int sink, Cap limit) {
    if (v == sink) return limit;
    for (auto& i = cursor_[v]; i < adjacency_[v].size(); ++i) {
      const int id = adjacency_[v][i];
      Arc& a = arcs_[id];
      if (a.residual <= 0 || level_[a.to] != level_[v] + 1) continue;
      if (Cap pushed = augment(a.to, sink, std::min(limit, a.residual))) {
        a.residual -= pushed;
        arcs_[id ^ 1].residual += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<Cap> capacity_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

/// s-t network whose integral flows are exactly the feasible allocations:
/// source -> slot j (capacity h_j), slot j -> load i (capacity 1) for j in the
/// window of load i, load i -> sink (capacity r_i).
struct FlowNetwork {
  enum class Kind { kSource, kUnit, kSink };
  struct Arc {
    Kind kind;
    int from;
    int to;
    std::int64_t capacity;
    int slot;  // 0-based slot, -1 for sink arcs
    int load;  // 0-based load, -1 for source arcs
  };

  static constexpr int kSource = 0;
  static constexpr int kSink = 1;

  int slots = 0;
  int loads = 0;
  std::vector<Arc> arcs;
  std::vector<int> durations;
  std::vector<std::int64_t> supply;
  std::vector<std::pair<int, int>> windows;  // 0-based half-open slot ranges

  int slot_vertex(int j) const { return 2 + j; }
  int load_vertex(int i) const { return 2 + slots + i; }
  int vertex_count() const { return 2 + slots + loads; }

  std::size_t count(Kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(arcs.begin(), arcs.end(), [kind](const Arc& a) { return a.kind == kind; }));
  }

  std::int64_t demand_total() const {
    std::int64_t t = 0;
    for (int r : durations) t += r;
    return t;
  }
};

inline void require_integer_instance(std::span<const double> supply,
                                     const DemandCollection& demand) {
  for (double h : supply) {
    if (!is_integral(h)) throw NonIntegerInput("flow operations need integer supply");
  }
  for (const auto& l : demand.loads) {
    if (l.weight != 1.0) throw NonIntegerInput("flow operations need unit load weights");
  }
}

/// Arcs are ordered: source arcs by slot, unit arcs by (load, slot), sink arcs
/// by load.
inline FlowNetwork build_network(std::span<const double> supply, const DemandCollection& demand,
                                 const TimePartition& p) {
  validate_supply(supply, p);
  validate(demand, p);
  require_integer_instance(supply, demand);

  FlowNetwork net;
  net.slots = p.horizon();
  net.loads = static_cast<int>(demand.size());
  for (int j = 0; j < net.slots; ++j) {
    const auto h = static_cast<std::int64_t>(supply[j]);
    net.supply.push_back(h);
    net.arcs.push_back({FlowNetwork::Kind::kSource, FlowNetwork::kSource, net.slot_vertex(j), h, j, -1});
  }
  for (int i = 0; i < net.loads; ++i) {
    const auto& s = demand.loads[i].spec;
    const int lo = p.breakpoint(s.a);
    const int hi = p.breakpoint(s.d);
    net.windows.emplace_back(lo, hi);
    net.durations.push_back(s.r);
    for (int j = lo; j < hi; ++j) {
      net.arcs.push_back({FlowNetwork::Kind::kUnit, net.slot_vertex(j), net.load_vertex(i), 1, j, i});
    }
  }
  for (int i = 0; i < net.loads; ++i) {
    net.arcs.push_back({FlowNetwork::Kind::kSink, net.load_vertex(i), FlowNetwork::kSink,
                        net.durations[i], -1, i});
  }
  return net;
}

struct FlowResult {
  std::int64_t value = 0;
  std::vector<std::int64_t> arc_flow;  // parallel to FlowNetwork::arcs
  std::vector<bool> source_side;       // residual reachability at optimum
};

inline FlowResult max_flow(const FlowNetwork& net) {
  Dinic<std::int64_t> solver(net.vertex_count());
  for (const auto& a : net.arcs) solver.add_arc(a.from, a.to, a.capacity);
  FlowResult out;
  out.value = solver.run(FlowNetwork::kSource, FlowNetwork::kSink);
  out.arc_flow.reserve(net.arcs.size());
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    out.arc_flow.push_back(solver.flow(static_cast<int>(e)));
  }
  out.source_side = solver.reachable(FlowNetwork::kSource);
  return out;
}

/// Cut (X, Y): X are loads on the sink side, Y slots on the source side.
struct CutWitness {
  std::vector<int> loads;  // X, 0-based
  std::vector<int> slots;  // Y, 0-based
  std::int64_t capacity = 0;
};

/// c(X, Y) = sum h - sum_Y h + sum r - sum_X r + #{(i, j) in X x Y : j in window i}.
inline std::int64_t cut_capacity(const FlowNetwork& net, std::span<const int> loads,
                                 std::span<const int> slots) {
  std::int64_t c = 0;
  for (auto h : net.supply) c += h;
  for (int j : slots) c -= net.supply[j];
  c += net.demand_total();
  for (int i : loads) {
    c -= net.durations[i];
    const auto [lo, hi] = net.windows[i];
    for (int j : slots) c += (j >= lo && j < hi) ? 1 : 0;
  }
  return c;
}

inline CutWitness cut_from(const FlowNetwork& net, const FlowResult& flow) {
  CutWitness w;
  for (int i = 0; i < net.loads; ++i) {
    if (!flow.source_side[net.load_vertex(i)]) w.loads.push_back(i);
  }
  for (int j = 0; j < net.slots; ++j) {
    if (flow.source_side[net.slot_vertex(j)]) w.slots.push_back(j);
  }
  w.capacity = cut_capacity(net, w.loads, w.slots);
  return w;
}

/// Minimum cut read off the residual graph at maximum flow.
inline CutWitness min_cut_witness(const FlowNetwork& net) { return cut_from(net, max_flow(net)); }

/// Tail index of the canonical tensor bounded by the cut: k_kappa counts the
/// slots of segment kappa in Y. The entry there is at most capacity - sum r.
inline std::vector<int> witness_tail_index(const CutWitness& cut, const TimePartition& p) {
  std::vector<int> k(p.segments(), 0);
  for (int j : cut.slots) ++k[p.segment_of(j + 1) - 1];
  return k;
}

class NotAdequate : public std::runtime_error {
 public:
  explicit NotAdequate(CutWitness cut)
      : std::runtime_error("supply is not adequate: cut capacity " +
                           std::to_string(cut.capacity)),
        cut_(std::move(cut)) {}
  const CutWitness& cut() const { return cut_; }

 private:
  CutWitness cut_;
};

/// m x n (0,1) schedule; row i is load i, column j is slot j.
struct AllocationMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> entries;

  AllocationMatrix() = default;
  AllocationMatrix(int m, int n) : rows(m), cols(n), entries(static_cast<std::size_t>(m) * n, 0) {}
  std::uint8_t& operator()(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
  std::uint8_t operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * cols + j];
  }

  friend bool operator==(const AllocationMatrix&, const AllocationMatrix&) = default;
};

/// Empty string when the matrix is a feasible allocation, otherwise the
/// first violated condition.
inline std::string allocation_violation(const AllocationMatrix& A, std::span<const double> supply,
                                        const DemandCollection& demand, const TimePartition& p) {
  if (A.rows != static_cast<int>(demand.size()) || A.cols != p.horizon()) {
    return "matrix shape does not match instance";
  }
  for (int i = 0; i < A.rows; ++i) {
    const auto& s = demand.loads[i].spec;
    int row = 0;
    for (int j = 0; j < A.cols; ++j) {
      const auto v = A(i, j);
      if (v > 1) return "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0/1";
      if (v == 1 && (j < p.breakpoint(s.a) || j >= p.breakpoint(s.d))) {
        return "load " + std::to_string(i) + " served outside its window at slot " +
               std::to_string(j + 1);
      }
      row += v;
    }
    if (row != s.r) {
      return "row " + std::to_string(i) + " sums to " + std::to_string(row) + ", expected " +
             std::to_string(s.r);
    }
  }
  for (int j = 0; j < A.cols; ++j) {
    int col = 0;
    for (int i = 0; i < A.rows; ++i) col += A(i, j);
    if (col > supply[j]) {
      return "column " + std::to_string(j + 1) + " exceeds supply";
    }
  }
  return {};
}

inline bool is_feasible_allocation(const AllocationMatrix& A, std::span<const double> supply,
                                   const DemandCollection& demand, const TimePartition& p) {
  return allocation_violation(A, supply, demand, p).empty();
}

/// A member of A(h, r, a, d) read from the saturated unit arcs of an integral
/// maximum flow. Throws NotAdequate with the min-cut certificate otherwise.
inline AllocationMatrix extract_allocation(std::span<const double> supply,
                                           const DemandCollection& demand,
                                           const TimePartition& p) {
  const FlowNetwork net = build_network(supply, demand, p);
  const FlowResult flow = max_flow(net);
  if (flow.value < net.demand_total()) throw NotAdequate(cut_from(net, flow));
  AllocationMatrix A(net.loads, net.slots);
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    const auto& arc = net.arcs[e];
    if (arc.kind == FlowNetwork::Kind::kUnit && flow.arc_flow[e] == 1) A(arc.load, arc.slot) = 1;
  }
  return A;
}

/// Least total energy that, added to the slots, makes the supply adequate.
inline std::int64_t adequacy_gap(std::span<const double> supply, const DemandCollection& demand,
                                 const TimePartition& p) {
  const FlowNetwork net = build_network(supply, demand, p);
  return net.demand_total() - max_flow(net).value;
}

}  // namespace mamd

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mamd/lp.hpp"
#include "mamd/model.hpp"
#include "mamd/tensor.hpp"

namespace mamd {

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kEquilibriumTolerance = 1e-7;

/// Per-unit prices pi_r^{a,d}; absent services and r = 0 cost nothing.
struct PriceMenu {
  std::map<ServiceSpec, double> prices;

  double price(const ServiceSpec& s) const {
    if (s.r <= 0) return 0.0;
    auto it = prices.find(s);
    return it == prices.end() ? 0.0 : it->second;
  }

  friend bool operator==(const PriceMenu&, const PriceMenu&) = default;
};

/// Multipliers alpha_k >= 0 on the adequacy rows, and beta_t on the cap rows
/// of the welfare program.
struct DualMultipliers {
  StructureTensor alpha;
  std::vector<double> cap;

  explicit DualMultipliers(const TimePartition& p) : alpha(p) {}
};

/// Level bought by each type of each service, indexed like the consumer list.
using Purchases = std::vector<std::map<ServiceSpec, double>>;

struct ServiceBundle {
  std::map<ServiceSpec, double> quantity;

  double get(const ServiceSpec& s) const {
    auto it = quantity.find(s);
    return it == quantity.end() ? 0.0 : it->second;
  }

  /// delta_j^{a,d} = sum_{r >= j} q_r^{a,d}.
  double tail_quantity(int a, int d, int j) const {
    double t = 0.0;
    for (const auto& [s, q] : quantity) {
      if (s.a == a && s.d == d && s.r >= j) t += q;
    }
    return t;
  }
};

namespace detail {

// Adequacy row of a service at tail index k.
inline double tail_coefficient(const ServiceSpec& s, std::span<const int> k) {
  return static_cast<double>(demand_tail(s, k));
}

// Largest excess of bundle load over supply tail across all tail indices.
inline double bundle_infeasibility(const std::map<ServiceSpec, double>& bundle,
                                   std::span<const double> canonical, const TimePartition& p) {
  double worst = -std::numeric_limits<double>::infinity();
  for_each_tail_index(p, [&](const TailIndex& k) {
    double used = 0.0;
    for (const auto& [s, q] : bundle) used += q * tail_coefficient(s, k);
    worst = std::max(worst, used - supply_tail(canonical, p, k));
  });
  return worst;
}

inline double scaled(double tol, double magnitude) { return tol * std::max(1.0, std::abs(magnitude)); }

}  // namespace detail

struct WelfareSolution {
  Purchases purchases;
  double welfare = 0.0;
  DualMultipliers duals;
  double dual_objective = 0.0;
  double complementary_slackness = 0.0;  // max alpha_k * slack_k
  long iterations = 0;

  explicit WelfareSolution(const TimePartition& p) : duals(p) {}
};

/// Social welfare program over finitely many consumer types:
///   max sum_t sum_s v_ts l_ts
///   s.t. sum_t sum_s l_ts [r_s - K_s(k)]^+ <= supply tail(k)  for every k,
///        sum_s l_ts <= cap_t,  l >= 0.
/// Supply is canonicalized first.
inline WelfareSolution solve_welfare(const Instance& inst, const lp::Options& opt = {}) {
  const TimePartition& p = inst.partition;
  const SupplyProfile canonical = canonicalize_supply(inst.supply, p);
  for (const auto& c : inst.consumers) validate(c, p);

  struct Column {
    std::size_t type;
    ServiceSpec spec;
  };
  std::vector<Column> columns;
  for (std::size_t t = 0; t < inst.consumers.size(); ++t) {
    for (const auto& [s, v] : inst.consumers[t].values) columns.push_back({t, s});
  }

  lp::LinearProgram program(static_cast<int>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    program.objective[c] = inst.consumers[columns[c].type].value(columns[c].spec);
  }
  std::vector<double> tails;
  for_each_tail_index(p, [&](const TailIndex& k) {
    std::vector<double> row(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      row[c] = detail::tail_coefficient(columns[c].spec, k);
    }
    tails.push_back(supply_tail(canonical, p, k));
    program.add_constraint(std::move(row), lp::Sense::kLessEqual, tails.back());
  });
  const int first_cap_row = program.constraints();
  for (std::size_t t = 0; t < inst.consumers.size(); ++t) {
    std::vector<double> row(columns.size(), 0.0);
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c].type == t ? 1.0 : 0.0;
    program.add_constraint(std::move(row), lp::Sense::kLessEqual, inst.consumers[t].cap);
  }

  const lp::Solution sol = lp::solve(program, opt);
  if (sol.status == lp::Status::kInfeasible) {
    throw std::logic_error("welfare program infeasible although l = 0 is feasible");
  }
  if (sol.status != lp::Status::kOptimal) {
    throw SolverFailure(std::string("welfare program: ") + lp::to_string(sol.status));
  }

  WelfareSolution out(p);
  out.iterations = sol.iterations;
  out.purchases.resize(inst.consumers.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.purchases[columns[c].type][columns[c].spec] = sol.x[c];
  }
  out.welfare = sol.objective;

  double dual_obj = 0.0;
  double cs = 0.0;
  for (int row = 0; row < program.constraints(); ++row) {
    const double y = std::max(sol.duals[row], 0.0);
    double activity = 0.0;
    for (std::size_t c = 0; c < columns.size(); ++c) activity += program.rows[row][c] * sol.x[c];
    const double slack = std::max(program.rhs[row] - activity, 0.0);
    cs = std::max(cs, y * slack);
    dual_obj += y * program.rhs[row];
    if (row < first_cap_row) {
      out.duals.alpha[static_cast<std::size_t>(row)] = y;
    } else {
      out.duals.cap.push_back(y);
    }
  }
  out.dual_objective = dual_obj;
  out.complementary_slackness = cs;
  return out;
}

/// pi_r^{a,d} = sum_k alpha_k [r - k_{a+1} - ... - k_d]^+ for every service.
inline PriceMenu prices_from_duals(const StructureTensor& alpha, const TimePartition& p) {
  PriceMenu menu;
  const auto services = all_services(p);
  for (const auto& s : services) menu.prices[s] = 0.0;
  std::size_t f = 0;
  for_each_tail_index(p, [&](const TailIndex& k) {
    const double weight = alpha[f++];
    if (weight == 0.0) return;
    for (const auto& s : services) {
      const int owed = demand_tail(s, k);
      if (owed > 0) menu.prices[s] += weight * owed;
    }
  });
  return menu;
}

/// Optimal face of max_s,l (v_s - pi_s) l over 0 <= l <= cap. With positive
/// best surplus the whole cap goes to the maximizing services; at zero any
/// level in [0, cap] is optimal; below zero the type buys nothing.
struct BestResponse {
  std::vector<ServiceSpec> services;
  double unit_surplus = 0.0;
  double min_level = 0.0;
  double max_level = 0.0;

  double optimal_surplus(double cap) const { return std::max(unit_surplus, 0.0) * cap; }
};

inline BestResponse consumer_best_response(const ConsumerType& type, const PriceMenu& menu,
                                           double tolerance = 1e-9) {
  BestResponse br;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [s, v] : type.values) best = std::max(best, v - menu.price(s));
  const double tol = detail::scaled(tolerance, best);
  if (type.values.empty() || best < -tol) {
    br.unit_surplus = 0.0;
    return br;
  }
  for (const auto& [s, v] : type.values) {
    if (v - menu.price(s) >= best - tol) br.services.push_back(s);
  }
  if (best > tol) {
    br.unit_surplus = best;
    br.min_level = br.max_level = type.cap;
  } else {
    br.unit_surplus = 0.0;
    br.max_level = type.cap;
  }
  return br;
}

struct SupplierSolution {
  ServiceBundle bundle;
  double revenue = 0.0;
};

/// Revenue-maximizing production: max sum_s pi_s q_s over q >= 0 with
/// sum_s q_s [r_s - K_s(k)]^+ <= supply tail(k), which is the delta-form
/// adequacy constraint rewritten per service.
inline SupplierSolution supplier_optimal_bundle(const PriceMenu& menu,
                                                std::span<const double> supply,
                                                const TimePartition& p,
                                                const lp::Options& opt = {}) {
  const SupplyProfile canonical = canonicalize_supply(supply, p);
  const auto services = all_services(p);
  lp::LinearProgram program(static_cast<int>(services.size()));
  for (std::size_t c = 0; c < services.size(); ++c) program.objective[c] = menu.price(services[c]);
  for_each_tail_index(p, [&](const TailIndex& k) {
    std::vector<double> row(services.size());
    for (std::size_t c = 0; c < services.size(); ++c) {
      row[c] = detail::tail_coefficient(services[c], k);
    }
    program.add_constraint(std::move(row), lp::Sense::kLessEqual, supply_tail(canonical, p, k));
  });
  const lp::Solution sol = lp::solve(program, opt);
  if (sol.status != lp::Status::kOptimal) {
    throw SolverFailure(std::string("supplier program: ") + lp::to_string(sol.status));
  }
  SupplierSolution out;
  for (std::size_t c = 0; c < services.size(); ++c) {
    if (sol.x[c] > 0.0) out.bundle.quantity[services[c]] = sol.x[c];
  }
  out.revenue = sol.objective;
  return out;
}

/// Market-clearing quantities: q_s = sum_t l_ts.
inline ServiceBundle aggregate(const Purchases& purchases) {
  ServiceBundle b;
  for (const auto& per_type : purchases) {
    for (const auto& [s, l] : per_type) {
      if (l != 0.0) b.quantity[s] += l;
    }
  }
  return b;
}

inline double revenue_of(const ServiceBundle& bundle, const PriceMenu& menu) {
  double r = 0.0;
  for (const auto& [s, q] : bundle.quantity) r += q * menu.price(s);
  return r;
}

struct EquilibriumChecks {
  bool consumer_optimal = false;
  bool supplier_optimal = false;
  bool market_clear = false;

  bool all() const { return consumer_optimal && supplier_optimal && market_clear; }
};

struct EquilibriumReport {
  double welfare = 0.0;
  double revenue = 0.0;
  double consumer_surplus = 0.0;
  double supplier_optimum = 0.0;
  PriceMenu menu;
  Purchases purchases;
  std::vector<std::string> consumer_ids;
  ServiceBundle bundle;
  EquilibriumChecks checks;
  double consumer_violation = 0.0;  // worst surplus loss against best response
  double supplier_violation = 0.0;  // revenue shortfall or supply overuse
  double clearing_violation = 0.0;  // shortfall of best clearing revenue, inf if none
  // Filled by clear_market from the welfare program.
  double duality_gap = 0.0;
  double complementary_slackness = 0.0;
};

namespace detail {

// Largest revenue of a bundle assembled from best responses, or -inf if the
// best-response faces admit no producible combination.
inline double best_clearing_revenue(const std::vector<BestResponse>& responses,
                                    const std::vector<ConsumerType>& consumers,
                                    const PriceMenu& menu, std::span<const double> canonical,
                                    const TimePartition& p, const lp::Options& opt) {
  struct Column {
    std::size_t type;
    ServiceSpec spec;
  };
  std::vector<Column> columns;
  for (std::size_t t = 0; t < responses.size(); ++t) {
    for (const auto& s : responses[t].services) columns.push_back({t, s});
  }
  lp::LinearProgram program(static_cast<int>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) program.objective[c] = menu.price(columns[c].spec);
  for_each_tail_index(p, [&](const TailIndex& k) {
    std::vector<double> row(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = tail_coefficient(columns[c].spec, k);
    program.add_constraint(std::move(row), lp::Sense::kLessEqual, supply_tail(canonical, p, k));
  });
  for (std::size_t t = 0; t < responses.size(); ++t) {
    const auto& br = responses[t];
    if (br.max_level == 0.0) continue;
    std::vector<double> row(columns.size(), 0.0);
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c].type == t ? 1.0 : 0.0;
    program.add_constraint(row, lp::Sense::kLessEqual, consumers[t].cap);
    if (br.min_level > 0.0) program.add_constraint(row, lp::Sense::kGreaterEqual, br.min_level);
  }
  const lp::Solution sol = lp::solve(program, opt);
  if (sol.status == lp::Status::kInfeasible) return -std::numeric_limits<double>::infinity();
  if (sol.status != lp::Status::kOptimal) {
    throw SolverFailure(std::string("clearing program: ") + lp::to_string(sol.status));
  }
  return sol.objective;
}

}  // namespace detail

/// Checks the three equilibrium conditions for a price menu and purchases:
///  consumer_optimal  every type's purchase lies on its best-response face;
///  supplier_optimal  the aggregated bundle is producible and earns the
///                    supplier-optimal revenue;
///  market_clear      some best-response purchases aggregate to a
///                    supplier-optimal bundle (certified directly by the
///                    given purchases when the first two hold).
inline EquilibriumReport verify_equilibrium(const Purchases& purchases, const PriceMenu& menu,
                                            std::span<const double> supply,
                                            const TimePartition& p,
                                            const std::vector<ConsumerType>& consumers,
                                            double tolerance = kEquilibriumTolerance,
                                            const lp::Options& opt = {}) {
  if (purchases.size() != consumers.size()) {
    throw std::invalid_argument("one purchase map per consumer type is required");
  }
  const SupplyProfile canonical = canonicalize_supply(supply, p);
  EquilibriumReport rep;
  rep.menu = menu;
  rep.purchases = purchases;
  for (const auto& c : consumers) rep.consumer_ids.push_back(c.id);
  rep.bundle = aggregate(purchases);

  std::vector<BestResponse> responses;
  double worst_loss = 0.0;
  bool consumers_ok = true;
  for (std::size_t t = 0; t < consumers.size(); ++t) {
    const auto& type = consumers[t];
    responses.push_back(consumer_best_response(type, menu));
    double level = 0.0;
    double surplus = 0.0;
    for (const auto& [s, l] : purchases[t]) {
      if (l < -detail::scaled(tolerance, type.cap)) consumers_ok = false;
      level += l;
      surplus += (type.value(s) - menu.price(s)) * l;
      rep.welfare += type.value(s) * l;
    }
    if (level > type.cap + detail::scaled(tolerance, type.cap)) consumers_ok = false;
    const double loss = responses.back().optimal_surplus(type.cap) - surplus;
    worst_loss = std::max(worst_loss, loss);
    rep.consumer_surplus += surplus;
    if (loss > detail::scaled(tolerance, responses.back().optimal_surplus(type.cap))) {
      consumers_ok = false;
    }
  }
  rep.consumer_violation = worst_loss;
  rep.checks.consumer_optimal = consumers_ok;

  rep.revenue = revenue_of(rep.bundle, menu);
  rep.supplier_optimum = supplier_optimal_bundle(menu, canonical, p, opt).revenue;
  const double overuse = detail::bundle_infeasibility(rep.bundle.quantity, canonical, p);
  const double shortfall = rep.supplier_optimum - rep.revenue;
  rep.supplier_violation = std::max({overuse, shortfall, 0.0});
  const double supply_scale = std::max(1.0, total(canonical));
  rep.checks.supplier_optimal = overuse <= tolerance * supply_scale &&
                                shortfall <= detail::scaled(tolerance, rep.supplier_optimum);

  if (rep.checks.consumer_optimal && rep.checks.supplier_optimal) {
    rep.checks.market_clear = true;
    rep.clearing_violation = 0.0;
  } else {
    const double best =
        detail::best_clearing_revenue(responses, consumers, menu, canonical, p, opt);
    rep.clearing_violation = rep.supplier_optimum - best;
    rep.checks.market_clear =
        rep.clearing_violation <= detail::scaled(tolerance, rep.supplier_optimum);
    rep.clearing_violation = std::max(rep.clearing_violation, 0.0);
  }
  return rep;
}

/// Solve the welfare program, price from its adequacy duals, aggregate the
/// purchases into the supplier's bundle and verify all three conditions.
inline EquilibriumReport clear_market(const Instance& inst,
                                      double tolerance = kEquilibriumTolerance,
                                      const lp::Options& opt = {}) {
  const WelfareSolution ws = solve_welfare(inst, opt);
  const PriceMenu menu = prices_from_duals(ws.duals.alpha, inst.partition);
  EquilibriumReport rep = verify_equilibrium(ws.purchases, menu, inst.supply, inst.partition,
                                             inst.consumers, tolerance, opt);
  rep.duality_gap = std::abs(ws.dual_objective - ws.welfare);
  rep.complementary_slackness = ws.complementary_slackness;
  return rep;
}

}  // namespace mamd

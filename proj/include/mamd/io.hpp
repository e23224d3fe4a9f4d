#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mamd/flow.hpp"
#include "mamd/market.hpp"
#include "mamd/model.hpp"
#include "mamd/sim.hpp"
#include "mamd/tensor.hpp"

// Document formats. Slot and load indices in reports are 1-based, matching
// the (r, a, d) convention of instance documents.
namespace mamd::io {

using nlohmann::json;

namespace detail {

inline const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

inline int as_int(const json& v, const char* what) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 1e9) return static_cast<int>(d);
  }
  throw ParseError(std::string("'") + what + "' must be an integer");
}

inline double as_number(const json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string("'") + what + "' must be a number");
  return v.get<double>();
}

inline const json& as_array(const json& v, const char* what) {
  if (!v.is_array()) throw ParseError(std::string("'") + what + "' must be an array");
  return v;
}

inline ServiceSpec service(const json& obj) {
  if (!obj.is_object()) throw ParseError("service entries must be objects");
  return {as_int(field(obj, "r"), "r"), as_int(field(obj, "a"), "a"), as_int(field(obj, "d"), "d")};
}

// Integral values print without a fractional part.
inline json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
  return v;
}

inline json spec_json(const ServiceSpec& s) { return {{"r", s.r}, {"a", s.a}, {"d", s.d}}; }

}  // namespace detail

/// Parses and validates an instance document.
inline Instance load_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be an object");

  Instance inst;
  std::vector<int> breakpoints;
  for (const auto& v : detail::as_array(detail::field(doc, "partition"), "partition")) {
    breakpoints.push_back(detail::as_int(v, "partition"));
  }
  inst.partition = TimePartition(std::move(breakpoints));
  for (const auto& v : detail::as_array(detail::field(doc, "supply"), "supply")) {
    inst.supply.push_back(detail::as_number(v, "supply"));
  }
  if (auto it = doc.find("loads"); it != doc.end()) {
    for (const auto& l : detail::as_array(*it, "loads")) {
      Load load{detail::service(l), 1.0};
      if (auto w = l.find("weight"); w != l.end()) load.weight = detail::as_number(*w, "weight");
      inst.demand.loads.push_back(load);
    }
  }
  if (auto it = doc.find("consumers"); it != doc.end()) {
    for (const auto& c : detail::as_array(*it, "consumers")) {
      if (!c.is_object()) throw ParseError("consumer entries must be objects");
      ConsumerType type;
      if (auto id = c.find("id"); id != c.end()) {
        if (!id->is_string()) throw ParseError("'id' must be a string");
        type.id = id->get<std::string>();
      }
      type.cap = detail::as_number(detail::field(c, "cap"), "cap");
      if (auto vals = c.find("values"); vals != c.end()) {
        for (const auto& v : detail::as_array(*vals, "values")) {
          const ServiceSpec s = detail::service(v);
          if (type.values.contains(s)) {
            throw ValidationError("consumer '" + type.id + "' lists a service twice");
          }
          type.values[s] = detail::as_number(detail::field(v, "v"), "v");
        }
      }
      inst.consumers.push_back(std::move(type));
    }
  }
  validate(inst);
  return inst;
}

inline Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str());
}

inline json to_json(const Instance& inst) {
  json doc;
  doc["partition"] = inst.partition.breakpoints();
  doc["supply"] = json::array();
  for (double h : inst.supply) doc["supply"].push_back(detail::number(h));
  doc["loads"] = json::array();
  for (const auto& l : inst.demand.loads) {
    json j = detail::spec_json(l.spec);
    j["weight"] = detail::number(l.weight);
    doc["loads"].push_back(std::move(j));
  }
  if (!inst.consumers.empty()) {
    doc["consumers"] = json::array();
    for (const auto& c : inst.consumers) {
      json values = json::array();
      for (const auto& [s, v] : c.values) {
        json e = detail::spec_json(s);
        e["v"] = detail::number(v);
        values.push_back(std::move(e));
      }
      doc["consumers"].push_back({{"id", c.id}, {"cap", detail::number(c.cap)}, {"values", values}});
    }
  }
  return doc;
}

inline std::string serialize(const Instance& inst) { return to_json(inst).dump(); }

inline json to_json(const AdequacyReport& r) {
  return {{"adequate", r.adequate},
          {"min_value", detail::number(r.min_value)},
          {"witness", r.witness},
          {"surplus", detail::number(r.surplus)},
          {"tolerance", r.tolerance}};
}

inline AdequacyReport adequacy_from_json(const json& j) {
  AdequacyReport r;
  r.adequate = detail::field(j, "adequate").get<bool>();
  r.min_value = detail::as_number(detail::field(j, "min_value"), "min_value");
  r.witness = detail::field(j, "witness").get<std::vector<int>>();
  r.surplus = detail::as_number(detail::field(j, "surplus"), "surplus");
  r.tolerance = detail::as_number(detail::field(j, "tolerance"), "tolerance");
  return r;
}

inline json to_json(const AllocationMatrix& A) {
  json rows = json::array();
  for (int i = 0; i < A.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < A.cols; ++j) row.push_back(static_cast<int>(A(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rows", A.rows}, {"cols", A.cols}, {"allocation", rows}};
}

inline AllocationMatrix allocation_from_json(const json& j) {
  AllocationMatrix A(detail::as_int(detail::field(j, "rows"), "rows"),
                     detail::as_int(detail::field(j, "cols"), "cols"));
  const auto& rows = detail::as_array(detail::field(j, "allocation"), "allocation");
  if (static_cast<int>(rows.size()) != A.rows) throw ParseError("allocation row count mismatch");
  for (int i = 0; i < A.rows; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != A.cols) {
      throw ParseError("allocation column count mismatch");
    }
    for (int j2 = 0; j2 < A.cols; ++j2) {
      A(i, j2) = static_cast<std::uint8_t>(detail::as_int(rows[i][j2], "allocation"));
    }
  }
  return A;
}

inline json to_json(const CutWitness& c) {
  json loads = json::array(), slots = json::array();
  for (int i : c.loads) loads.push_back(i + 1);
  for (int j : c.slots) slots.push_back(j + 1);
  return {{"loads", loads}, {"slots", slots}, {"capacity", c.capacity}};
}

inline CutWitness cut_from_json(const json& j) {
  CutWitness c;
  for (const auto& v : detail::as_array(detail::field(j, "loads"), "loads")) {
    c.loads.push_back(detail::as_int(v, "loads") - 1);
  }
  for (const auto& v : detail::as_array(detail::field(j, "slots"), "slots")) {
    c.slots.push_back(detail::as_int(v, "slots") - 1);
  }
  c.capacity = detail::field(j, "capacity").get<std::int64_t>();
  return c;
}

inline json to_json(const EquilibriumReport& r) {
  json menu = json::array();
  for (const auto& [s, price] : r.menu.prices) {
    json e = detail::spec_json(s);
    e["price"] = price;
    menu.push_back(std::move(e));
  }
  json purchases = json::array();
  for (std::size_t t = 0; t < r.purchases.size(); ++t) {
    json items = json::array();
    for (const auto& [s, l] : r.purchases[t]) {
      json e = detail::spec_json(s);
      e["level"] = l;
      items.push_back(std::move(e));
    }
    purchases.push_back({{"id", t < r.consumer_ids.size() ? r.consumer_ids[t] : ""},
                         {"items", items}});
  }
  json bundle = json::array();
  for (const auto& [s, q] : r.bundle.quantity) {
    json e = detail::spec_json(s);
    e["quantity"] = q;
    bundle.push_back(std::move(e));
  }
  return {{"welfare", r.welfare},
          {"revenue", r.revenue},
          {"consumer_surplus", r.consumer_surplus},
          {"supplier_optimum", r.supplier_optimum},
          {"menu", menu},
          {"purchases", purchases},
          {"bundle", bundle},
          {"checks",
           {{"consumer_optimal", r.checks.consumer_optimal},
            {"supplier_optimal", r.checks.supplier_optimal},
            {"market_clear", r.checks.market_clear}}},
          {"violations",
           {{"consumer", detail::number(r.consumer_violation)},
            {"supplier", detail::number(r.supplier_violation)},
            {"clearing", detail::number(r.clearing_violation)}}},
          {"duality_gap", r.duality_gap},
          {"complementary_slackness", r.complementary_slackness}};
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

/// trial,num_loads,total_gap,gnr rows plus a trailing summary comment.
inline std::string trace_csv(const sim::GnrTrace& trace) {
  std::ostringstream os;
  os << "trial,num_loads,total_gap,gnr\n";
  for (const auto& r : trace.records) {
    os << r.trial << ',' << r.num_loads << ',' << r.total_gap << ',';
    if (r.gnr) os << format_real(*r.gnr);
    os << '\n';
  }
  os << "# mean=" << format_real(trace.summary.mean)
     << " std_last_half=" << format_real(trace.summary.std_last_half) << '\n';
  return os.str();
}

inline json summary_json(const sim::GnrTrace& trace, const sim::SimConfig& config) {
  json pairs = json::array();
  for (const auto& [a, d] : config.pairs) pairs.push_back({a, d});
  return {{"seed", config.seed},
          {"partition", config.partition.breakpoints()},
          {"pairs", pairs},
          {"trials", trace.records.size()},
          {"defined_trials", trace.summary.defined},
          {"mean", trace.summary.mean},
          {"mean_last_half", trace.summary.mean_last_half},
          {"std_last_half", trace.summary.std_last_half}};
}

}  // namespace mamd::io

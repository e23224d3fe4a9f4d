#pragma once

#include <vector>

#include "mamd/flow.hpp"
#include "mamd/model.hpp"

namespace mamd::fixtures {

// Partition {0,1,4,6}, five loads and the supply [2 4 2 5 1 3].
inline Instance figure_one() {
  Instance inst;
  inst.partition = TimePartition({0, 1, 4, 6});
  inst.supply = {2, 4, 2, 5, 1, 3};
  inst.demand = DemandCollection::unit(std::vector<ServiceSpec>{
      {2, 0, 2}, {3, 0, 2}, {5, 0, 3}, {2, 1, 3}, {2, 1, 2}});
  return inst;
}

// The feasible allocation displayed next to the instance.
inline AllocationMatrix figure_one_allocation() {
  const int rows[5][6] = {{0, 1, 0, 1, 0, 0},
                          {0, 1, 1, 1, 0, 0},
                          {1, 1, 0, 1, 1, 1},
                          {0, 0, 0, 1, 0, 1},
                          {0, 1, 0, 1, 0, 0}};
  AllocationMatrix A(5, 6);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 6; ++j) A(i, j) = static_cast<std::uint8_t>(rows[i][j]);
  }
  return A;
}

// Partition {0,1,2}, supply [1 1], two unit loads that both need slot 2.
inline Instance one_slot_window() {
  Instance inst;
  inst.partition = TimePartition({0, 1, 2});
  inst.supply = {1, 1};
  inst.demand = DemandCollection::unit(std::vector<ServiceSpec>{{1, 1, 2}, {1, 1, 2}});
  return inst;
}

// Single segment of three slots, supply [2 1 0], one load of duration 3.
inline Instance short_tail() {
  Instance inst;
  inst.partition = TimePartition({0, 3});
  inst.supply = {2, 1, 0};
  inst.demand = DemandCollection::unit(std::vector<ServiceSpec>{{3, 0, 1}});
  return inst;
}

// Two slots in one segment, supply [2 1]; type A values the two-slot service
// at 10 (cap 1), type B the one-slot service at 4 (cap 3).
inline Instance worked_market() {
  Instance inst;
  inst.partition = TimePartition({0, 2});
  inst.supply = {2, 1};
  inst.consumers.push_back({"A", 1.0, {{ServiceSpec{2, 0, 1}, 10.0}}});
  inst.consumers.push_back({"B", 3.0, {{ServiceSpec{1, 0, 1}, 4.0}}});
  return inst;
}

// The figure-one partition and supply sold to two single-service types; the
// supply constraint splits the market between them.
inline Instance figure_one_market() {
  Instance inst = figure_one();
  inst.demand = {};
  inst.consumers.push_back({"X", 2.5, {{ServiceSpec{3, 0, 2}, 5.0}}});
  inst.consumers.push_back({"Y", 4.0, {{ServiceSpec{5, 0, 3}, 2.0}}});
  return inst;
}

}  // namespace mamd::fixtures

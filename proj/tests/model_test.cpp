#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mamd/io.hpp"
#include "mamd/model.hpp"
#include "mamd/tensor.hpp"
#include "oracles.hpp"

namespace mamd {
namespace {

constexpr const char* kFigureOne = R"({
  "partition": [0, 1, 4, 6],
  "supply": [2, 4, 2, 5, 1, 3],
  "loads": [{"r": 2, "a": 0, "d": 2}, {"r": 3, "a": 0, "d": 2}, {"r": 5, "a": 0, "d": 3},
            {"r": 2, "a": 1, "d": 3}, {"r": 2, "a": 1, "d": 2, "weight": 1}]
})";

TEST(TimePartition, DerivedQuantities) {
  const TimePartition p({0, 1, 4, 6});
  EXPECT_EQ(p.segments(), 3);
  EXPECT_EQ(p.horizon(), 6);
  EXPECT_EQ(p.segment_length(2), 3);
  EXPECT_EQ(p.window(1, 3), 5);
  EXPECT_EQ(p.segment_of(1), 1);
  EXPECT_EQ(p.segment_of(4), 2);
  EXPECT_EQ(p.segment_of(5), 3);
}

TEST(TimePartition, RejectsBadBreakpoints) {
  EXPECT_THROW(TimePartition({0}), ValidationError);
  EXPECT_THROW(TimePartition({1, 3}), ValidationError);
  EXPECT_THROW(TimePartition({0, 2, 2}), ValidationError);
  EXPECT_THROW(TimePartition({0, 3, 1}), ValidationError);
}

TEST(LoadInstance, FigureOneIsValid) {
  const Instance inst = io::load_instance(kFigureOne);
  EXPECT_EQ(inst, fixtures::figure_one());
  EXPECT_TRUE(inst.consumers.empty());
}

TEST(LoadInstance, DurationLongerThanWindow) {
  EXPECT_THROW(io::load_instance(R"({"partition":[0,1,4,6],"supply":[2,4,2,5,1,3],
                                     "loads":[{"r":5,"a":1,"d":2}]})"),
               ValidationError);
}

TEST(LoadInstance, SupplyLengthMismatch) {
  EXPECT_THROW(io::load_instance(R"({"partition":[0,1,4,6],"supply":[2,4,2,5,1],"loads":[]})"),
               ValidationError);
}

TEST(LoadInstance, OtherInvariantViolations) {
  EXPECT_THROW(io::load_instance(R"({"partition":[0,2],"supply":[1,-1]})"), ValidationError);
  EXPECT_THROW(io::load_instance(R"({"partition":[0,2],"supply":[1,1],
                                     "loads":[{"r":1,"a":1,"d":1}]})"),
               ValidationError);
  EXPECT_THROW(io::load_instance(R"({"partition":[0,2],"supply":[1,1],
                                     "loads":[{"r":1,"a":0,"d":1,"weight":0}]})"),
               ValidationError);
  EXPECT_THROW(io::load_instance(R"({"partition":[0,2],"supply":[1,1],
                                     "consumers":[{"id":"x","cap":0,"values":[]}]})"),
               ValidationError);
}

TEST(LoadInstance, MalformedDocuments) {
  EXPECT_THROW(io::load_instance("{not json"), ParseError);
  EXPECT_THROW(io::load_instance("[1,2]"), ParseError);
  EXPECT_THROW(io::load_instance(R"({"supply":[1]})"), ParseError);
  EXPECT_THROW(io::load_instance(R"({"partition":[0,1],"supply":["x"]})"), ParseError);
  EXPECT_THROW(io::load_instance(R"({"partition":[0,1],"supply":[1],"loads":[{"r":1.5,"a":0,"d":1}]})"),
               ParseError);
}

TEST(LoadInstance, ConsumersAndDefaultWeight) {
  const Instance inst = io::load_instance(R"({"partition":[0,2],"supply":[2,1],
      "loads":[{"r":1,"a":0,"d":1}],
      "consumers":[{"id":"A","cap":1.0,"values":[{"r":2,"a":0,"d":1,"v":10.0}]}]})");
  ASSERT_EQ(inst.demand.size(), 1u);
  EXPECT_EQ(inst.demand.loads[0].weight, 1.0);
  ASSERT_EQ(inst.consumers.size(), 1u);
  EXPECT_EQ(inst.consumers[0].value({2, 0, 1}), 10.0);
  EXPECT_EQ(inst.consumers[0].value({1, 0, 1}), 0.0);
}

TEST(CanonicalizeSupply, SortsEachSegment) {
  const TimePartition p({0, 1, 4, 6});
  EXPECT_EQ(canonicalize_supply(std::vector<double>{2, 4, 2, 5, 1, 3}, p),
            (SupplyProfile{2, 5, 4, 2, 3, 1}));
  EXPECT_EQ(canonicalize_supply(std::vector<double>{2, 5, 4, 2, 3, 1}, p),
            (SupplyProfile{2, 5, 4, 2, 3, 1}));
  EXPECT_EQ(canonicalize_supply(std::vector<double>{3, 1, 2}, TimePartition({0, 3})),
            (SupplyProfile{3, 2, 1}));
}

TEST(CanonicalizeSupply, IdempotentAndPreservesSegmentMultisets) {
  CounterRng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_instance(rng, 4, 10, 0, 5);
    const auto h = inst.supply_real();
    const auto c = canonicalize_supply(h, inst.partition);
    EXPECT_TRUE(is_canonical(c, inst.partition));
    EXPECT_EQ(canonicalize_supply(c, inst.partition), c);
    for (int kappa = 1; kappa <= inst.partition.segments(); ++kappa) {
      const int lo = inst.partition.breakpoint(kappa - 1);
      const int hi = inst.partition.breakpoint(kappa);
      std::vector<double> x(h.begin() + lo, h.begin() + hi), y(c.begin() + lo, c.begin() + hi);
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      EXPECT_EQ(x, y);
    }
  }
}

TEST(CanonicalizeSupply, AdequacyUnchangedAgainstBruteForce) {
  CounterRng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_instance(rng, 3, 7, 5, 3);
    std::vector<int> canon(inst.supply);
    const auto c = canonicalize_supply(inst.supply_real(), inst.partition);
    for (std::size_t j = 0; j < c.size(); ++j) canon[j] = static_cast<int>(c[j]);
    const bool raw = oracle::exists_allocation(inst.supply, inst.loads, inst.partition);
    EXPECT_EQ(raw, oracle::exists_allocation(canon, inst.loads, inst.partition));
    EXPECT_EQ(raw, check_adequacy(inst.supply_real(), inst.demand(), inst.partition).adequate);
  }
}

TEST(Serialize, RoundTripsRandomInstances) {
  CounterRng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = oracle::random_instance(rng, 4, 9, 6, 4);
    Instance inst{r.partition, r.supply_real(), r.demand(), {}};
    if (trial % 2 == 0 && !inst.demand.empty()) inst.demand.loads[0].weight = 0.25 * (trial % 7 + 1);
    if (trial % 3 == 0) {
      ConsumerType c{"t" + std::to_string(trial), 1.5, {}};
      c.values[oracle::random_service(rng, r.partition)] = 3.25;
      inst.consumers.push_back(c);
    }
    EXPECT_EQ(io::load_instance(io::serialize(inst)), inst);
  }
}

}  // namespace
}  // namespace mamd

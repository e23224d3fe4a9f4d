#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mamd/market.hpp"
#include "oracles.hpp"

namespace mamd {
namespace {

const ServiceSpec kShort{1, 0, 1};
const ServiceSpec kLong{2, 0, 1};

TEST(SolveWelfare, WorkedExample) {
  const auto inst = fixtures::worked_market();
  const auto ws = solve_welfare(inst);
  EXPECT_NEAR(ws.welfare, 14.0, 1e-9);
  EXPECT_NEAR(ws.purchases[0].at(kLong), 1.0, 1e-9);
  EXPECT_NEAR(ws.purchases[1].at(kShort), 1.0, 1e-9);
  EXPECT_NEAR(ws.duals.alpha[0], 4.0, 1e-9);
  EXPECT_GE(ws.duals.alpha[1], -1e-12);
  EXPECT_LE(ws.duals.alpha[1], 2.0 + 1e-9);
  EXPECT_NEAR(ws.dual_objective, ws.welfare, 1e-9);
  EXPECT_LE(ws.complementary_slackness, 1e-7);
}

TEST(SolveWelfare, ZeroValuesAndZeroSupply) {
  auto inst = fixtures::worked_market();
  for (auto& c : inst.consumers) {
    for (auto& [s, v] : c.values) v = 0.0;
  }
  auto ws = solve_welfare(inst);
  EXPECT_EQ(ws.welfare, 0.0);
  for (const auto& per_type : ws.purchases) {
    for (const auto& [s, l] : per_type) EXPECT_EQ(l, 0.0);
  }

  inst = fixtures::worked_market();
  inst.supply = {0, 0};
  ws = solve_welfare(inst);
  EXPECT_EQ(ws.welfare, 0.0);
  for (const auto& per_type : ws.purchases) {
    for (const auto& [s, l] : per_type) EXPECT_NEAR(l, 0.0, 1e-12);
  }
}

TEST(PricesFromDuals, Examples) {
  const TimePartition two({0, 2});
  StructureTensor alpha(two);
  EXPECT_EQ(prices_from_duals(alpha, two).price(kLong), 0.0);
  alpha[0] = 4;
  alpha[1] = 2;
  const auto menu = prices_from_duals(alpha, two);
  EXPECT_EQ(menu.price(kShort), 4.0);
  EXPECT_EQ(menu.price(kLong), 10.0);
  EXPECT_EQ(menu.price({0, 0, 1}), 0.0);

  const TimePartition split({0, 1, 2});
  StructureTensor beta(split);
  beta[beta.flat(std::vector<int>{1, 0})] = 1.0;
  const auto m2 = prices_from_duals(beta, split);
  EXPECT_EQ(m2.price({2, 0, 2}), 1.0);
  EXPECT_EQ(m2.price({1, 1, 2}), 1.0);
  EXPECT_EQ(m2.price({1, 0, 2}), 0.0);
}

TEST(PricesFromDuals, MonotoneInDurationAndWindow) {
  CounterRng rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = oracle::random_partition(rng, 3, 7);
    StructureTensor alpha(p);
    for (std::size_t f = 0; f < alpha.size(); ++f) {
      alpha[f] = rng.below(3) == 0 ? 0.0 : static_cast<double>(rng.below(1000)) / 100.0;
    }
    const auto menu = prices_from_duals(alpha, p);
    for (const auto& s : all_services(p)) {
      EXPECT_GE(menu.price(s), 0.0);
      if (s.r > 1) {
        EXPECT_GE(menu.price(s), menu.price({s.r - 1, s.a, s.d}));
      }
      for (int c = 0; c <= s.a; ++c) {
        for (int d = s.d; d <= p.segments(); ++d) {
          EXPECT_GE(menu.price(s), menu.price({s.r, c, d}));
        }
      }
    }
  }
}

TEST(BestResponse, Examples) {
  const auto inst = fixtures::worked_market();
  PriceMenu menu;
  menu.prices[kLong] = 8;
  menu.prices[kShort] = 4;
  const auto a = consumer_best_response(inst.consumers[0], menu);
  EXPECT_EQ(a.services, std::vector<ServiceSpec>{kLong});
  EXPECT_EQ(a.min_level, 1.0);
  EXPECT_EQ(a.max_level, 1.0);
  EXPECT_EQ(a.optimal_surplus(1.0), 2.0);

  const auto b = consumer_best_response(inst.consumers[1], menu);
  EXPECT_EQ(b.services, std::vector<ServiceSpec>{kShort});
  EXPECT_EQ(b.min_level, 0.0);
  EXPECT_EQ(b.max_level, 3.0);

  menu.prices[kLong] = 20;
  menu.prices[kShort] = 20;
  const auto none = consumer_best_response(inst.consumers[0], menu);
  EXPECT_TRUE(none.services.empty());
  EXPECT_EQ(none.max_level, 0.0);
}

TEST(BestResponse, ZeroValueTypeMayBuyNothing) {
  const ConsumerType idle{"idle", 2.0, {{kShort, 0.0}, {kLong, 0.0}}};
  PriceMenu free_menu;
  EXPECT_EQ(consumer_best_response(idle, free_menu).min_level, 0.0);
  PriceMenu menu;
  menu.prices[kShort] = 1.0;
  menu.prices[kLong] = 1.0;
  EXPECT_EQ(consumer_best_response(idle, menu).max_level, 0.0);
}

TEST(SupplierOptimalBundle, Examples) {
  const auto inst = fixtures::worked_market();
  PriceMenu menu;
  menu.prices[kShort] = 4;
  menu.prices[kLong] = 10;
  const auto sup = supplier_optimal_bundle(menu, inst.supply, inst.partition);
  EXPECT_NEAR(sup.revenue, 14.0, 1e-9);
  EXPECT_TRUE(oracle::bundle_fits({sup.bundle.quantity.begin(), sup.bundle.quantity.end()},
                                  inst.supply, inst.partition, 1e-9));

  EXPECT_EQ(supplier_optimal_bundle(PriceMenu{}, inst.supply, inst.partition).revenue, 0.0);
  EXPECT_EQ(supplier_optimal_bundle(menu, std::vector<double>{0, 0}, inst.partition).revenue, 0.0);
}

TEST(VerifyEquilibrium, WorkedPipeline) {
  const auto inst = fixtures::worked_market();
  const auto rep = clear_market(inst);
  EXPECT_TRUE(rep.checks.all());
  EXPECT_NEAR(rep.welfare, 14.0, 1e-9);
  EXPECT_NEAR(rep.menu.price(kShort), 4.0, 1e-9);
  EXPECT_GE(rep.menu.price(kLong), 8.0 - 1e-9);
  EXPECT_LE(rep.menu.price(kLong), 10.0 + 1e-9);
  EXPECT_NEAR(rep.revenue + rep.consumer_surplus, rep.welfare, 1e-9);
  EXPECT_EQ(rep.consumer_ids, (std::vector<std::string>{"A", "B"}));
}

TEST(VerifyEquilibrium, ExplicitMenuWithZeroSurplus) {
  const auto inst = fixtures::worked_market();
  PriceMenu menu;
  menu.prices[kShort] = 4;
  menu.prices[kLong] = 10;
  const Purchases purchases{{{kLong, 1.0}}, {{kShort, 1.0}}};
  const auto rep =
      verify_equilibrium(purchases, menu, inst.supply, inst.partition, inst.consumers);
  EXPECT_TRUE(rep.checks.all());
  EXPECT_NEAR(rep.welfare, 14.0, 1e-12);
  EXPECT_NEAR(rep.revenue, 14.0, 1e-12);
  EXPECT_NEAR(rep.consumer_surplus, 0.0, 1e-12);
}

TEST(VerifyEquilibrium, PerturbedMenuFails) {
  const auto inst = fixtures::worked_market();
  PriceMenu menu;
  menu.prices[kShort] = 5;
  menu.prices[kLong] = 10;
  const Purchases purchases{{{kLong, 1.0}}, {{kShort, 1.0}}};
  const auto rep =
      verify_equilibrium(purchases, menu, inst.supply, inst.partition, inst.consumers);
  EXPECT_FALSE(rep.checks.consumer_optimal);
  EXPECT_FALSE(rep.checks.market_clear);
  EXPECT_NEAR(rep.consumer_violation, 1.0, 1e-9);
  EXPECT_NEAR(rep.clearing_violation, 5.0, 1e-9);
}

TEST(VerifyEquilibrium, EmptyMarket) {
  Instance inst;
  inst.partition = TimePartition({0, 2});
  inst.supply = {2, 1};
  const auto rep = verify_equilibrium({}, PriceMenu{}, inst.supply, inst.partition, {});
  EXPECT_TRUE(rep.checks.all());
  const auto cleared = clear_market(inst);
  EXPECT_TRUE(cleared.checks.all());
  EXPECT_EQ(cleared.welfare, 0.0);
}

TEST(VerifyEquilibrium, RejectsMismatchedPurchases) {
  const auto inst = fixtures::worked_market();
  EXPECT_THROW(verify_equilibrium({}, PriceMenu{}, inst.supply, inst.partition, inst.consumers),
               std::invalid_argument);
}

TEST(ClearMarket, FigureOneMatchesGrid) {
  const auto inst = fixtures::figure_one_market();
  const auto rep = clear_market(inst);
  EXPECT_TRUE(rep.checks.all());
  EXPECT_NEAR(rep.welfare, oracle::grid_welfare(inst, 0.01), 1e-6);
  EXPECT_NEAR(rep.welfare, 15.0, 1e-9);
  EXPECT_GT(rep.purchases[1].at(ServiceSpec{5, 0, 3}), 0.0);
}

TEST(ClearMarket, WorkedExampleMatchesGrid) {
  const auto inst = fixtures::worked_market();
  EXPECT_NEAR(oracle::grid_welfare(inst, 0.01), 14.0, 1e-9);
}

TEST(ClearMarket, RandomMarketsAreEquilibria) {
  CounterRng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = oracle::random_market(rng, 4, 6);
    const auto ws = solve_welfare(inst);
    const auto rep = clear_market(inst);
    ASSERT_TRUE(rep.checks.all()) << "trial " << trial;
    EXPECT_LE(rep.duality_gap, 1e-9 * std::max(1.0, std::abs(rep.welfare)));
    EXPECT_LE(rep.complementary_slackness, 1e-7);
    EXPECT_NEAR(rep.welfare, ws.welfare, 1e-9);
    EXPECT_NEAR(rep.revenue + rep.consumer_surplus, rep.welfare, 1e-7);
    std::vector<std::pair<ServiceSpec, double>> levels(rep.bundle.quantity.begin(),
                                                       rep.bundle.quantity.end());
    EXPECT_TRUE(oracle::bundle_fits(levels, inst.supply, inst.partition, 1e-7));
  }
}

}  // namespace
}  // namespace mamd

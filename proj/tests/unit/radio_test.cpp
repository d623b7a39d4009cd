#include "topogen/radio.hpp"

#include <gtest/gtest.h>

namespace topogen {
namespace {

TEST(Budget, Arithmetic) {
  EXPECT_EQ(budget({-17, -63}), 46);
  EXPECT_EQ(budget({3, -101}), 104);
  EXPECT_EQ(budget({-17, -48}), 31);
  EXPECT_EQ(bound_for_settings({-3, -66}), 63);
  EXPECT_EQ(format_setting({-17, -63}), "-17/-63 (46 dB)");
}

TEST(Profile, BudgetRange) {
  const auto p = at86rf231_profile();
  EXPECT_EQ(p.min_budget(), 31);
  EXPECT_EQ(p.max_budget(), 104);
  std::vector<int> expected;
  for (int b = 31; b <= 104; ++b) expected.push_back(b);
  EXPECT_EQ(achievable_budgets(p), expected);
}

TEST(Profile, Validation) {
  TransceiverProfile empty{"x", {}, {-90}};
  EXPECT_THROW(empty.validate(), InputError);
  TransceiverProfile unsorted{"x", {3, 0}, {-90}};
  EXPECT_THROW(unsorted.validate(), InputError);
  EXPECT_NO_THROW(at86rf231_profile().validate());
}

TEST(SettingsForBound, TypicalBound) {
  const auto settings = settings_for_bound(46, at86rf231_profile());
  ASSERT_FALSE(settings.empty());
  EXPECT_EQ(settings.front().base, (RadioSetting{-17, -63}));
  ASSERT_TRUE(settings.front().guarded.has_value());
  EXPECT_EQ(*settings.front().guarded, (RadioSetting{-17, -66}));
  EXPECT_FALSE(settings.front().saturated);
  EXPECT_EQ(settings.size(), 16u);  // tx -17..-2
}

TEST(SettingsForBound, TopOfRangeSaturates) {
  const auto settings = settings_for_bound(104, at86rf231_profile());
  ASSERT_EQ(settings.size(), 1u);
  EXPECT_EQ(settings[0].base, (RadioSetting{3, -101}));
  EXPECT_TRUE(settings[0].saturated);
  EXPECT_FALSE(settings[0].guarded.has_value());
}

TEST(SettingsForBound, OutOfRange) {
  try {
    settings_for_bound(30, at86rf231_profile());
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("below minimum budget 31"), std::string::npos);
  }
  EXPECT_THROW(settings_for_bound(105, at86rf231_profile()), InputError);
  EXPECT_THROW(settings_for_bound(50, at86rf231_profile(), -1), InputError);
}

TEST(SettingsForBound, GuardFallsBackToTxPower) {
  // Sensitivity already at its floor: only more power helps.
  const auto settings = settings_for_bound(90, at86rf231_profile());
  const auto& lowest = settings.front();
  EXPECT_EQ(lowest.base, (RadioSetting{-11, -101}));
  ASSERT_TRUE(lowest.guarded.has_value());
  EXPECT_EQ(*lowest.guarded, (RadioSetting{-8, -101}));
}

TEST(SettingsForBound, EveryBudgetRoundTrips) {
  const auto p = at86rf231_profile();
  for (int beta = p.min_budget(); beta <= p.max_budget(); ++beta) {
    for (int guard : {0, 3, 7}) {
      const auto settings = settings_for_bound(beta, p, guard);
      ASSERT_FALSE(settings.empty()) << beta;
      for (std::size_t i = 0; i < settings.size(); ++i) {
        const auto& s = settings[i];
        EXPECT_EQ(bound_for_settings(s.base), beta);
        EXPECT_TRUE(p.has_tx(s.base.tx_power));
        EXPECT_TRUE(p.has_sensitivity(s.base.sensitivity));
        if (i > 0) {
          EXPECT_LT(settings[i - 1].base.tx_power, s.base.tx_power);
        }
        if (s.guarded) {
          EXPECT_TRUE(p.has_tx(s.guarded->tx_power));
          EXPECT_TRUE(p.has_sensitivity(s.guarded->sensitivity));
        }
        if (!s.saturated) {
          ASSERT_TRUE(s.guarded.has_value());
          EXPECT_GE(budget(*s.guarded), beta + guard);
        } else {
          EXPECT_GT(beta + guard, p.max_budget());
        }
      }
    }
  }
}

}  // namespace
}  // namespace topogen

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "officedr/office_config.hpp"
#include "officedr/sim_env.hpp"

using namespace officedr;

namespace {

BaselineProfile one_hour(double b, double lo, double hi) { return {{b}, {lo}, {hi}}; }

BaselineProfile uniform_profile(double b, std::size_t hours = kHours) {
  return {Hourly(hours, b), Hourly(hours, 0.0), Hourly(hours, 10.0 * b)};
}

PersonModel curtail_person(const BaselineProfile& profile, int t_curtail = 3, int t_shift = 3) {
  return {profile, CurtailShiftResponse{0.4, 0.3, 0.3, t_curtail, t_shift}};
}

double sum(const Hourly& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Independent shift rule: scan each hour's window left to right and keep
// the first strict minimum.
std::vector<std::size_t> shift_destinations(const Hourly& p, int window) {
  const int n = static_cast<int>(p.size());
  std::vector<std::size_t> dest(p.size());
  for (int t = 0; t < n; ++t) {
    int best = std::max(0, t - window);
    for (int u = best; u <= std::min(n - 1, t + window); ++u) {
      if (p[u] < p[best]) best = u;
    }
    dest[t] = static_cast<std::size_t>(best);
  }
  return dest;
}

}  // namespace

TEST(RespondLinear, ZeroPriceIsIdentity) {
  EXPECT_EQ(respond_linear(one_hour(10, 0.5, 19), std::vector{0.0}, 1.0)[0], 10.0);
}

TEST(RespondLinear, HandEvaluated) {
  EXPECT_NEAR(respond_linear(one_hour(10, 1, 19), std::vector{2.0}, 2.0)[0], 6.0, 1e-9);
}

TEST(RespondLinear, FloorBinds) {
  EXPECT_NEAR(respond_linear(one_hour(10, 1, 19), std::vector{10.0}, 5.0)[0], 1.0, 1e-9);
}

TEST(RespondSinusoidal, ZeroPriceIsIdentity) {
  EXPECT_EQ(respond_sinusoidal(one_hour(10, 1, 19), std::vector{0.0}, 2.0)[0], 10.0);
}

TEST(RespondSinusoidal, QuarterTurn) {
  EXPECT_NEAR(respond_sinusoidal(one_hour(10, 1, 19), std::vector{std::numbers::pi / 2}, 2.0)[0], 8.0, 1e-9);
}

TEST(RespondSinusoidal, HalfTurn) {
  EXPECT_NEAR(respond_sinusoidal(one_hour(10, 1, 19), std::vector{std::numbers::pi}, 2.0)[0], 10.0, 1e-9);
}

TEST(RespondThresholdExp, IndicatorIsStrict) {
  EXPECT_EQ(respond_threshold_exp(one_hour(10, 1, 19), std::vector{5.0}, 5.0)[0], 10.0);
}

TEST(RespondThresholdExp, FloorBindsAboveThreshold) {
  EXPECT_NEAR(respond_threshold_exp(one_hour(10, 1, 19), std::vector{6.0}, 5.0)[0], 1.0, 1e-9);
}

TEST(RespondThresholdExp, BelowThreshold) {
  EXPECT_EQ(respond_threshold_exp(one_hour(10, 1, 19), std::vector{0.0}, 5.0)[0], 10.0);
}

TEST(RespondCurtailShift, FlatPricesCurtailFirstHoursAndShiftToWindowStart) {
  const PersonModel person = curtail_person(uniform_profile(1.0));
  const Hourly p(kHours, 4.0);
  const auto parts = curtail_shift_breakdown(person.profile, std::get<CurtailShiftResponse>(person.response), p);
  for (std::size_t t = 0; t < kHours; ++t) {
    EXPECT_NEAR(parts.curtailable[t], t < 3 ? 0.0 : 0.3, 1e-12) << "hour " << t;
  }
  Hourly expected_shift(kHours, 0.0);
  const auto dest = shift_destinations(p, 3);
  for (std::size_t t = 0; t < kHours; ++t) expected_shift[dest[t]] += 0.3;
  for (std::size_t t = 0; t < kHours; ++t) EXPECT_NEAR(parts.shiftable[t], expected_shift[t], 1e-12);
  // Under flat prices every block lands on max(0, t - 3).
  EXPECT_NEAR(parts.shiftable[0], 4 * 0.3, 1e-12);
  EXPECT_NEAR(sum(respond_curtail_shift(person, p)), 10 * 0.4 + 10 * 0.3 + 7 * 0.3, 1e-12);
}

TEST(RespondCurtailShift, WorkerAvoidsThreePeakHours) {
  // 400 Wh fixed, 300 Wh curtailable, 300 Wh shiftable each hour.
  const PersonModel person = curtail_person(uniform_profile(1.0));
  Hourly p(kHours, 0.0);
  p[3] = p[4] = p[5] = 10.0;
  const auto parts = curtail_shift_breakdown(person.profile, std::get<CurtailShiftResponse>(person.response), p);
  for (std::size_t t : {3u, 4u, 5u}) {
    EXPECT_EQ(parts.curtailable[t], 0.0);
    EXPECT_EQ(parts.shiftable[t], 0.0);
    EXPECT_NEAR(respond_curtail_shift(person, p)[t], 0.4, 1e-12);
  }
  for (std::size_t t : {0u, 1u, 2u, 6u, 7u, 8u, 9u}) EXPECT_NEAR(parts.curtailable[t], 0.3, 1e-12);
}

TEST(RespondCurtailShift, ZeroWindowKeepsLayout) {
  Rng rng(3);
  const PersonModel person = curtail_person(synthetic_profile(rng, kHours, 5, 15), 3, 0);
  Hourly p(kHours);
  for (auto& v : p) v = rng.uniform(0, 10);
  const auto parts = curtail_shift_breakdown(person.profile, std::get<CurtailShiftResponse>(person.response), p);
  for (std::size_t t = 0; t < kHours; ++t) EXPECT_EQ(parts.shiftable[t], person.profile.baseline[t] * 0.3);
}

TEST(RespondCurtailShift, RejectsOtherVariants) {
  const PersonModel person{uniform_profile(1.0), LinearResponse{1.0}};
  EXPECT_THROW(respond_curtail_shift(person, Hourly(kHours, 0.0)), ValidationError);
}

TEST(ResponseProperties, ClippingHoldsForRandomInputs) {
  Rng rng(11);
  for (int k = 0; k < 20000; ++k) {
    const BaselineProfile prof = synthetic_profile(rng, kHours, 5, 15);
    Hourly p(kHours);
    for (auto& v : p) v = rng.uniform(0, 10);
    const double m = rng.uniform(0.01, 8);
    for (const Hourly& d : {respond_linear(prof, p, m), respond_sinusoidal(prof, p, m),
                            respond_threshold_exp(prof, p, rng.uniform(0, 10))}) {
      for (std::size_t t = 0; t < kHours; ++t) {
        ASSERT_GE(d[t], prof.floor[t]);
        ASSERT_LE(d[t], prof.ceiling[t]);
      }
    }
  }
}

TEST(ResponseProperties, LinearIsMonotoneInPrice) {
  Rng rng(12);
  for (int k = 0; k < 5000; ++k) {
    const BaselineProfile prof = synthetic_profile(rng, kHours, 5, 15);
    Hourly lo(kHours), hi(kHours);
    for (std::size_t t = 0; t < kHours; ++t) {
      lo[t] = rng.uniform(0, 10);
      hi[t] = rng.uniform(lo[t], 10);
    }
    const double m = rng.uniform(0.1, 4);
    const Hourly a = respond_linear(prof, lo, m), b = respond_linear(prof, hi, m);
    for (std::size_t t = 0; t < kHours; ++t) ASSERT_LE(b[t], a[t]);
  }
}

TEST(ResponseProperties, ShiftConservationIsExactOnDyadicBaselines) {
  // Baselines on a 2^-10 grid make every partial sum exact, so any lost or
  // duplicated block shows up as an inequality.
  Rng rng(13);
  for (int k = 0; k < 20000; ++k) {
    BaselineProfile prof = uniform_profile(1.0);
    for (auto& b : prof.baseline) b = static_cast<double>(5 * 1024 + rng.index(10 * 1024)) / 1024.0;
    const int window = static_cast<int>(rng.index(10));
    const CurtailShiftResponse params{0.5, 0.25, 0.25, 1 + static_cast<int>(rng.index(10)), window};
    Hourly p(kHours);
    for (auto& v : p) v = static_cast<double>(rng.index(5));  // many ties
    const auto parts = curtail_shift_breakdown(prof, params, p);
    double in = 0.0;
    for (double b : prof.baseline) in += b * 0.25;
    ASSERT_EQ(sum(parts.shiftable), in);
  }
}

TEST(ResponseProperties, CurtailBoundHolds) {
  Rng rng(14);
  for (int k = 0; k < 20000; ++k) {
    const PersonModel person = curtail_person(synthetic_profile(rng, kHours, 5, 15), 1 + static_cast<int>(rng.index(10)),
                                              static_cast<int>(rng.index(10)));
    Hourly p(kHours);
    for (auto& v : p) v = rng.uniform(0, 10);
    const double total = sum(respond_curtail_shift(person, p));
    const double b = sum(person.profile.baseline);
    ASSERT_GE(total, 0.7 * b - 1e-9);
    ASSERT_LE(total, b + 1e-9);
  }
}

TEST(ResponseProperties, DeterministicFunctionsAreSeparablePerHour) {
  Rng rng(15);
  const BaselineProfile prof = synthetic_profile(rng, kHours, 5, 15);
  Hourly p(kHours);
  for (auto& v : p) v = rng.uniform(0, 10);
  const Hourly base = respond_linear(prof, p, 1.5);
  Hourly q = p;
  q[4] = 9.5;
  const Hourly moved = respond_linear(prof, q, 1.5);
  for (std::size_t t = 0; t < kHours; ++t) {
    if (t != 4) EXPECT_EQ(moved[t], base[t]);
  }
}

TEST(AggregateDemand, SingletonAndDoubling) {
  Rng rng(16);
  const PersonModel a{synthetic_profile(rng, kHours, 5, 15), SinusoidalResponse{2.0}};
  OfficeConfig one{{a}};
  OfficeConfig two{{a, a}};
  Hourly p(kHours, 1.3);
  const Hourly single = respond(a, p);
  EXPECT_EQ(aggregate_demand(one, p), single);
  const Hourly doubled = aggregate_demand(two, p);
  for (std::size_t t = 0; t < kHours; ++t) EXPECT_EQ(doubled[t], 2 * single[t]);
}

TEST(AggregateDemand, MixedOfficeSumsUnitResponses) {
  Rng rng(17);
  const PersonModel lin{synthetic_profile(rng, kHours, 5, 15), LinearResponse{2.0}};
  const PersonModel sn{synthetic_profile(rng, kHours, 5, 15), SinusoidalResponse{2.0}};
  const PersonModel th{synthetic_profile(rng, kHours, 5, 15), ThresholdExpResponse{5.0}};
  OfficeConfig office{{lin, sn, th}};
  Hourly p(kHours);
  for (auto& v : p) v = rng.uniform(0, 10);
  const Hourly a = respond_linear(lin.profile, p, 2.0), b = respond_sinusoidal(sn.profile, p, 2.0),
               c = respond_threshold_exp(th.profile, p, 5.0);
  const Hourly d = aggregate_demand(office, p);
  for (std::size_t t = 0; t < kHours; ++t) EXPECT_NEAR(d[t], a[t] + b[t] + c[t], 1e-12);
}

TEST(ComputeReward, Examples) {
  const GridPriceVector g{{1.0}};
  EXPECT_EQ(compute_reward(std::vector{1.0}, g, 0.0, 10.0), 0.0);
  EXPECT_NEAR(compute_reward(std::vector{100.0}, g, 0.0, 10.0), -4.6052, 1e-4);
  EXPECT_NEAR(compute_reward(std::vector{10.0}, g, 20.0, 10.0), -12.3026, 1e-4);
}

TEST(ComputeReward, NonPositiveCostIsDomainError) {
  const GridPriceVector g{{1.0}};
  EXPECT_THROW(compute_reward(std::vector{0.0}, g, 0.0, 10.0), DomainError);
  EXPECT_THROW(compute_reward(std::vector{-1.0}, g, 0.0, 10.0), DomainError);
}

TEST(EnvStep, FlatZeroOnLinearOfficeCostsBaseline) {
  OfficeSpec spec;
  spec.persons = 7;
  spec.variant_weights = {1, 0, 0, 0};
  const OfficeConfig office = build_office(spec);
  double expected = 0.0;
  for (const auto& p : office.persons) expected += demand_cost(p.profile.baseline, office.grid.prices);
  const StepResult r = env_step(office, env_reset(office, 0), PriceSignal::constant(0.0));
  EXPECT_NEAR(r.daily_cost_usd, expected, 1e-9);
}

TEST(EnvStep, TouBeatsFlatOnCurtailShiftOffice) {
  OfficeSpec spec = evaluation_office_spec();
  spec.persons = 20;
  const OfficeConfig office = build_office(spec);
  const EnvState s = env_reset(office, 0);
  const double flat = env_step(office, s, PriceSignal::constant(0.0)).daily_cost_usd;
  const double tou = env_step(office, s, PriceSignal{GridPriceVector::time_of_use().prices}).daily_cost_usd;
  EXPECT_LT(tou, flat);
}

TEST(EnvStep, EpisodeLengthOneIsDoneImmediately) {
  OfficeSpec spec;
  spec.persons = 2;
  spec.episode_length = 1;
  const OfficeConfig office = build_office(spec);
  EXPECT_TRUE(env_step(office, env_reset(office, 0), PriceSignal::constant(1.0)).done);
}

TEST(EnvStep, RejectsOutOfBoundsAction) {
  OfficeSpec spec;
  spec.persons = 2;
  const OfficeConfig office = build_office(spec);
  PriceSignal bad = PriceSignal::constant(1.0);
  bad.points[2] = 10.5;
  EXPECT_THROW(env_step(office, env_reset(office, 0), bad), ValidationError);
  EXPECT_THROW(env_step(office, env_reset(office, 0), PriceSignal::constant(1.0, 9)), ValidationError);
}

TEST(EnvStep, NextStateCarriesDemand) {
  OfficeSpec spec;
  spec.persons = 3;
  const OfficeConfig office = build_office(spec);
  const StepResult r = env_step(office, env_reset(office, 0), PriceSignal::constant(2.0));
  EXPECT_EQ(r.next.prev_aggregate_demand, r.demand);
  EXPECT_EQ(r.next.day_index, 1);
  EXPECT_EQ(r.reward, compute_reward(r.demand, office.reward_params()));
}

TEST(EnvReset, UsesFlatZeroResponse) {
  OfficeSpec spec;
  spec.persons = 3;
  const OfficeConfig office = build_office(spec);
  const EnvState s = env_reset(office, 5);
  EXPECT_EQ(s.day_index, 0);
  EXPECT_EQ(s.prev_aggregate_demand, aggregate_demand(office, Hourly(kHours, 0.0)));
}

TEST(EncodeObservation, ScalesByMaxAndHandlesZero) {
  const OfficeConfig office;
  EnvState s{0, {1, 2, 4, 2, 1, 0, 0, 0, 0, 2}};
  const auto obs = encode_observation(s, office);
  ASSERT_EQ(obs.size(), kObservationDim);
  EXPECT_EQ(obs[2], 1.0);
  EXPECT_EQ(obs[1], 0.5);
  s.prev_aggregate_demand.assign(kHours, 0.0);
  EXPECT_EQ(encode_observation(s, office), std::vector<double>(kHours, 0.0));
}

TEST(OfficeEnv, DeterministicTransitionStream) {
  OfficeSpec spec = evaluation_office_spec();
  spec.persons = 10;
  spec.variant_weights = {1, 1, 1, 1};
  const OfficeConfig office = build_office(spec);
  OfficeEnv a(office, 9), b(office, 9);
  Rng rng(4);
  for (int k = 0; k < 25; ++k) {
    PriceSignal p = PriceSignal::constant(0.0);
    for (auto& v : p.points) v = rng.uniform(0, 10);
    const StepResult ra = a.step(p), rb = b.step(p);
    ASSERT_EQ(ra.demand, rb.demand);
    ASSERT_EQ(ra.reward, rb.reward);
    ASSERT_EQ(ra.next_observation, rb.next_observation);
    ASSERT_EQ(ra.done, rb.done);
  }
  EXPECT_EQ(a.step_count(), 25u);
}

TEST(OfficeEnv, ResetsAfterEpisode) {
  OfficeSpec spec;
  spec.persons = 2;
  spec.episode_length = 3;
  OfficeEnv env(build_office(spec));
  const auto first = env.observation();
  for (int k = 0; k < 3; ++k) env.step(PriceSignal::constant(7.0));
  EXPECT_EQ(env.state().day_index, 0);
  EXPECT_EQ(env.observation(), first);
}

TEST(OfficeSpecJson, RoundTrip) {
  OfficeSpec spec;
  spec.persons = 12;
  spec.variant_weights = {1, 2, 0, 3};
  spec.d_hat_mode = DHatMode::Absolute;
  spec.d_hat_value = 3.5;
  spec.seed = 99;
  const OfficeSpec back = office_spec_from_json(office_spec_to_json(spec));
  EXPECT_EQ(office_spec_to_json(back), office_spec_to_json(spec));
  EXPECT_THROW(office_spec_from_json("{\"persons\": 0}"), ConfigError);
}

TEST(BuildOffice, SyntheticBoundsAndDHat) {
  OfficeSpec spec;
  spec.persons = 40;
  spec.variant_weights = {1, 1, 1, 1};
  const OfficeConfig office = build_office(spec);
  ASSERT_EQ(office.persons.size(), 40u);
  for (const auto& p : office.persons) {
    const auto [mn, mx] = std::minmax_element(p.profile.baseline.begin(), p.profile.baseline.end());
    EXPECT_GE(*mn, 5.0);
    EXPECT_LT(*mx, 15.0);
    EXPECT_EQ(p.profile.floor[0], 0.5 * *mn);
    EXPECT_EQ(p.profile.ceiling[0], 1.9 * *mx);
  }
  EXPECT_DOUBLE_EQ(office.d_hat, 0.5 * flat_signal_cost(office));
}

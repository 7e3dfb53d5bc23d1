#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <filesystem>

#include "officedr/office_config.hpp"
#include "officedr/planning.hpp"

using namespace officedr;
namespace fs = std::filesystem;

namespace {

// Linear workers with a multiplier small enough that clipping never binds,
// so office demand is exactly affine in the signal.
OfficeConfig linear_office(int persons = 2) {
  OfficeSpec s;
  s.persons = persons;
  s.variant_weights = {1, 0, 0, 0};
  s.multiplier_range = {0.1, 0.1};
  s.seed = 5;
  return build_office(s);
}

OfficeConfig curtail_office() {
  OfficeSpec s = evaluation_office_spec();
  s.persons = 6;
  return build_office(s);
}

// Exact planning model for linear_office(): d_h = Σb_h - n·m·(5 + 5u_h).
PlanningModel exact_linear_model(const OfficeConfig& office) {
  const double nm = 0.1 * static_cast<double>(office.persons.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(kHours, kObservationDim + kHours);
  Eigen::VectorXd b(kHours);
  for (std::size_t h = 0; h < kHours; ++h) {
    double base = 0.0;
    for (const auto& p : office.persons) base += p.profile.baseline[h];
    b(static_cast<Eigen::Index>(h)) = base - 5.0 * nm;
    w(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(kObservationDim + h)) = -5.0 * nm;
  }
  PlanningModel m;
  m.net = DenseNet({DenseLayer{w, b, Activation::Identity}});
  m.target_mean = Eigen::VectorXd::Zero(kHours);
  m.target_std = Eigen::VectorXd::Ones(kHours);
  return m;
}

SacAgent tiny_agent(std::uint64_t seed = 1) {
  SacConfig c;
  c.hidden = {8, 8};
  c.batch_size = 8;
  c.buffer_capacity = 100000;
  c.seed = seed;
  return SacAgent::create(c);
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("officedr_" + name); }

}  // namespace

TEST(CollectPlanningData, CountsAndEmpty) {
  const OfficeConfig office = curtail_office();
  EXPECT_EQ(collect_planning_data(office, 1000, 3).size(), 1000u);
  EXPECT_EQ(collect_planning_data(office, 0, 3).size(), 0u);
  EXPECT_EQ(collect_planning_data(office, 50, 3), collect_planning_data(office, 50, 3));
}

TEST(CollectPlanningData, DemandReplaysThroughEnvironment) {
  const OfficeConfig office = curtail_office();
  const PlanningDataset data = collect_planning_data(office, 40, 11);
  // Same env seed, same actions: the env reproduces every stored demand.
  OfficeEnv env(office, 11);
  for (const auto& s : data.samples) {
    ASSERT_EQ(env.observation(), s.obs);
    ASSERT_EQ(env.step(PriceSignal{s.action}).demand, s.demand);
  }
}

TEST(PlanningData, SaveLoadRoundTrip) {
  const PlanningDataset data = collect_planning_data(curtail_office(), 20, 2);
  const auto path = temp_file("pd.bin");
  save_planning_data(data, path);
  EXPECT_EQ(load_planning_data(path), data);
  fs::remove(path);
  try {
    load_planning_data(path);
    FAIL();
  } catch (const MissingPrerequisite& e) {
    EXPECT_EQ(e.producer(), "collect-planning");
  }
}

TEST(TrainPlanning, BestEpochBookkeeping) {
  const PlanningDataset data = collect_planning_data(curtail_office(), 400, 4);
  PlanningTrainOptions opt;
  opt.epochs = 60;
  opt.holdout = 100;
  opt.hidden = {16, 16};
  opt.seed = 8;
  const PlanningTrainResult r = train_planning_model(data, opt);
  ASSERT_EQ(r.holdout_loss.size(), 60u);
  EXPECT_LE(r.model.best_loss, r.holdout_loss.front());
  EXPECT_EQ(r.model.first_epoch_loss, r.holdout_loss.front());
  EXPECT_EQ(r.model.best_loss, *std::min_element(r.holdout_loss.begin(), r.holdout_loss.end()));
  EXPECT_EQ(r.model.best_loss, r.holdout_loss[static_cast<std::size_t>(r.model.best_epoch - 1)]);
  // The returned parameters are the best epoch's.
  EXPECT_EQ(planning_mse(r.model, data, r.holdout_indices), r.model.best_loss);
  EXPECT_EQ(r.holdout_indices.size(), 100u);
}

TEST(TrainPlanning, FitsAffineDataClosely) {
  const PlanningDataset data = collect_planning_data(linear_office(), 600, 6);
  PlanningTrainOptions opt;
  opt.epochs = 4000;
  opt.holdout = 128;
  opt.l2 = 0.0;
  opt.hidden = {16};
  opt.seed = 2;
  const PlanningTrainResult r = train_planning_model(data, opt);
  EXPECT_LT(r.model.best_loss, 1e-3);
}

TEST(TrainPlanning, Deterministic) {
  const PlanningDataset data = collect_planning_data(curtail_office(), 300, 4);
  PlanningTrainOptions opt;
  opt.epochs = 5;
  opt.holdout = 50;
  opt.hidden = {8};
  EXPECT_EQ(train_planning_model(data, opt).model, train_planning_model(data, opt).model);
}

TEST(TrainPlanning, HoldoutTooLargeIsConfigError) {
  const PlanningDataset data = collect_planning_data(curtail_office(), 100, 4);
  PlanningTrainOptions opt;
  opt.holdout = 256;
  EXPECT_THROW(train_planning_model(data, opt), ConfigError);
}

TEST(PlanningModelIo, RoundTripAndMissing) {
  const PlanningDataset data = collect_planning_data(curtail_office(), 80, 4);
  PlanningTrainOptions opt;
  opt.epochs = 3;
  opt.holdout = 20;
  opt.hidden = {8};
  const PlanningModel m = train_planning_model(data, opt).model;
  const auto path = temp_file("pm.bin");
  save_planning_model(m, path);
  EXPECT_EQ(load_planning_model(path), m);
  fs::remove(path);
  try {
    load_planning_model(path);
    FAIL();
  } catch (const MissingPrerequisite& e) {
    EXPECT_EQ(e.producer(), "train-planning");
  }
}

TEST(PlanningStep, ExactModelReproducesEnvReward) {
  const OfficeConfig office = linear_office();
  const PlanningModel model = exact_linear_model(office);
  OfficeEnv env(office, 1);
  Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    PriceSignal a;
    for (std::size_t h = 0; h < kHours; ++h) a.points.push_back(rng.uniform(0, 10));
    const std::vector<double> obs = env.observation();
    const PlanningStepResult p = planning_step(model, obs, a, office.reward_params());
    const StepResult r = env.step(a);
    for (std::size_t h = 0; h < kHours; ++h) ASSERT_NEAR(p.demand[h], r.demand[h], 1e-9);
    ASSERT_NEAR(p.reward, r.reward, 1e-12);
    for (std::size_t h = 0; h < kHours; ++h) ASSERT_NEAR(p.next_obs[h], r.next_observation[h], 1e-12);
  }
  const PlanningDataset data = collect_planning_data(office, 50, 2);
  std::vector<std::size_t> idx(50);
  std::iota(idx.begin(), idx.end(), 0);
  EXPECT_LT(planning_reward_gap(model, data, idx, office.reward_params()), 1e-12);
}

TEST(PlanningStep, FloorPreventsLogDomainError) {
  PlanningModel m;
  m.net = DenseNet({DenseLayer{Eigen::MatrixXd::Zero(kHours, 2 * kHours), Eigen::VectorXd::Constant(kHours, -50.0),
                               Activation::Identity}});
  m.target_mean = Eigen::VectorXd::Zero(kHours);
  m.target_std = Eigen::VectorXd::Ones(kHours);
  const PlanningStepResult p =
      planning_step(m, std::vector<double>(kHours, 0.5), PriceSignal::constant(3.0), RewardParams{GridPriceVector::time_of_use(), 0.0, 10.0});
  for (double d : p.demand) EXPECT_EQ(d, kPredictionFloor);
  EXPECT_TRUE(std::isfinite(p.reward));
}

TEST(PlanningStep, RejectsOutOfRangeAction) {
  const OfficeConfig office = linear_office();
  const PlanningModel model = exact_linear_model(office);
  EXPECT_THROW(planning_step(model, std::vector<double>(kHours, 0.0), PriceSignal::constant(11.0),
                             office.reward_params()),
               ValidationError);
}

TEST(MixSchedule, ClosedForm) {
  EXPECT_EQ((MixSchedule{10.0, 0.99, 0}).planning_trajectories(), 10u);
  EXPECT_EQ((MixSchedule{10.0, 0.99, 100}).planning_trajectories(), 3u);
  EXPECT_NEAR((MixSchedule{10.0, 0.99, 100}).value(), 3.660323412732292, 1e-12);
  MixSchedule s{10.0, 0.99, 0};
  for (int k = 0; k < 10000; ++k) s.advance();
  EXPECT_EQ(s.value(), 10.0 * std::pow(0.99, 10000.0));
  EXPECT_EQ((MixSchedule{10.0, 0.0, 1}).planning_trajectories(), 0u);
}

TEST(Dagger, ProvenanceAndRealStepAccounting) {
  const OfficeConfig office = linear_office();
  const PlanningModel model = exact_linear_model(office);
  SacAgent agent = tiny_agent();
  ReplayBuffer buffer = make_replay_buffer(agent.config);
  OfficeEnv env(office, 3);
  MixSchedule schedule{10.0, 0.9, 0};
  const DaggerOptions opt{30, 4, 1};
  std::uint64_t planning = 0, real = 0;
  const auto stats = dagger_train(agent, buffer, env, model, schedule, opt, [&](const DaggerIterationStats& s, const SacAgent&) {
    const auto expected = static_cast<std::uint64_t>(std::floor(10.0 * std::pow(0.9, static_cast<double>(s.iteration - 1))));
    EXPECT_EQ(s.planning_trajectories, expected);
    EXPECT_EQ(s.planning_steps, expected * 4);
    EXPECT_EQ(s.real_steps, 4u);
    planning += s.planning_steps;
    real += s.real_steps;
    EXPECT_EQ(s.buffer_planning, planning);
    EXPECT_EQ(s.buffer_online, real);
    EXPECT_EQ(s.buffer_offline, 0u);
    EXPECT_EQ(s.env_step_count, real);
  });
  ASSERT_EQ(stats.size(), 30u);
  EXPECT_EQ(env.step_count(), 30u * 4u);
  EXPECT_EQ(agent.env_steps, 30u * 4u);
  EXPECT_EQ(agent.update_steps, planning + real);
  EXPECT_EQ(schedule.i, 30u);
}

TEST(Dagger, PlanningTrajectoriesNeverTouchTheEnvironment) {
  const OfficeConfig office = linear_office();
  const PlanningModel model = exact_linear_model(office);
  SacAgent agent = tiny_agent();
  ReplayBuffer buffer = make_replay_buffer(agent.config);
  OfficeEnv env(office, 3);
  MixSchedule schedule{10.0, 0.99, 0};
  dagger_train(agent, buffer, env, model, schedule, DaggerOptions{1, 5, 0}, [&](const DaggerIterationStats& s, const SacAgent&) {
    EXPECT_EQ(s.planning_steps, 50u);
    EXPECT_EQ(env.step_count(), 5u);  // real trajectory only
  });
  // The first ten buffer records are the planning trajectory steps.
  EXPECT_EQ(buffer.at(0).source, SourceTag::Planning);
  EXPECT_EQ(buffer.at(49).source, SourceTag::Planning);
  EXPECT_EQ(buffer.at(50).source, SourceTag::Online);
}

TEST(Dagger, ZeroBetaIsPureOnlineAfterFirstIteration) {
  const OfficeConfig office = linear_office();
  const PlanningModel model = exact_linear_model(office);
  SacAgent agent = tiny_agent();
  ReplayBuffer buffer = make_replay_buffer(agent.config);
  OfficeEnv env(office, 3);
  MixSchedule schedule{10.0, 0.0, 0};
  const auto stats = dagger_train(agent, buffer, env, model, schedule, DaggerOptions{5, 3, 1});
  EXPECT_EQ(stats[0].planning_trajectories, 10u);
  for (std::size_t k = 1; k < stats.size(); ++k) EXPECT_EQ(stats[k].planning_trajectories, 0u);
  EXPECT_EQ(stats.back().buffer_planning, 30u);
}

TEST(TwoStage, WarmupThenDagger) {
  const OfficeConfig office = curtail_office();
  SacAgent agent = tiny_agent();
  ReplayBuffer buffer = make_replay_buffer(agent.config);
  OfficeEnv env(office, 3);
  TwoStageOptions opt;
  opt.warmup_steps = 60;
  opt.planning.epochs = 5;
  opt.planning.holdout = 10;
  opt.planning.hidden = {8};
  opt.dagger = DaggerOptions{3, 5, 1};
  std::uint64_t online_calls = 0;
  const TwoStageResult r = two_stage_train(agent, buffer, env, opt, [&](const OnlineStepRecord&, const SacAgent&) { ++online_calls; });
  EXPECT_EQ(online_calls, 60u);
  EXPECT_EQ(r.warmup_data.size(), 60u);
  ASSERT_EQ(r.iterations.size(), 3u);
  EXPECT_EQ(r.iterations[0].planning_trajectories, 10u);
  EXPECT_EQ(env.step_count(), 60u + 3u * 5u);
  // Planning share right after the first mixed iteration.
  const auto& s = r.iterations[0];
  EXPECT_NEAR(static_cast<double>(s.buffer_planning) / (s.buffer_planning + s.buffer_online), 50.0 / 115.0, 1e-12);
}

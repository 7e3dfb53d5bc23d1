#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "officedr/dense_net.hpp"
#include "officedr/replay_buffer.hpp"
#include "officedr/sac_agent.hpp"
#include "officedr/sim_env.hpp"

namespace officedr {

struct PlanningSample {
  std::vector<double> obs;
  std::vector<double> action;
  Hourly demand;  // realized office demand

  friend bool operator==(const PlanningSample&, const PlanningSample&) = default;
};

struct PlanningDataset {
  std::vector<PlanningSample> samples;

  std::size_t size() const { return samples.size(); }
  friend bool operator==(const PlanningDataset&, const PlanningDataset&) = default;
};

/// Uniform-random actions on `office`, `n` consecutive real days.
PlanningDataset collect_planning_data(const OfficeConfig& office, std::size_t n, std::uint64_t seed);

void save_planning_data(const PlanningDataset& data, const std::filesystem::path& path);
PlanningDataset load_planning_data(const std::filesystem::path& path);

inline constexpr double kPredictionFloor = 1e-6;

/// Regressor (observation ⊕ normalized action) → demand profile. Targets
/// are standardized per hour; the statistics travel with the model.
struct PlanningModel {
  DenseNet net;
  Eigen::VectorXd target_mean;
  Eigen::VectorXd target_std;
  double action_low = PriceSignal::kMinPoints;
  double action_high = PriceSignal::kMaxPoints;
  double best_loss = 0.0;         // holdout MSE in standardized units
  int best_epoch = 0;             // 1-based
  double first_epoch_loss = 0.0;

  /// Inputs for a batch, one sample per column.
  Eigen::MatrixXd encode_inputs(const std::vector<const PlanningSample*>& samples) const;
  Eigen::MatrixXd encode_targets(const std::vector<const PlanningSample*>& samples) const;
  /// Demand in kWh, floored at kPredictionFloor.
  Hourly predict(std::span<const double> obs, std::span<const double> action) const;

  friend bool operator==(const PlanningModel&, const PlanningModel&) = default;
};

void save_planning_model(const PlanningModel& model, const std::filesystem::path& path);
PlanningModel load_planning_model(const std::filesystem::path& path);

struct PlanningTrainOptions {
  int epochs = 10'000;
  double lr = 1e-3;
  double l2 = 1e-3;
  std::size_t holdout = 256;
  std::size_t batch_size = 64;
  std::vector<int> hidden{32, 32, 32};
  std::uint64_t seed = 0;
};

struct PlanningTrainResult {
  PlanningModel model;
  std::vector<std::size_t> holdout_indices;
  std::vector<double> holdout_loss;  // per epoch, standardized MSE
};

/// Adam with L2 weight decay on minibatches reshuffled each epoch; the
/// parameters with the lowest holdout loss are returned.
PlanningTrainResult train_planning_model(const PlanningDataset& data, const PlanningTrainOptions& options);

/// Standardized MSE of `model` over data[indices].
double planning_mse(const PlanningModel& model, const PlanningDataset& data,
                    const std::vector<std::size_t>& indices);

struct PlanningStepResult {
  std::vector<double> next_obs;
  double reward = 0.0;
  Hourly demand;
};

/// Predicts demand, scores it with the real reward and encodes the next
/// observation from it. No environment is touched.
PlanningStepResult planning_step(const PlanningModel& model, std::span<const double> obs,
                                 const PriceSignal& action, const RewardParams& params);

/// Mean |predicted reward - real reward| over data[indices].
double planning_reward_gap(const PlanningModel& model, const PlanningDataset& data,
                           const std::vector<std::size_t>& indices, const RewardParams& params);

/// Ratio of planning to real trajectories, Mᵢ = M0·βⁱ in closed form.
struct MixSchedule {
  double m0 = 10.0;
  double beta = 0.99;
  std::uint64_t i = 0;

  double value() const;
  std::uint64_t planning_trajectories() const;  // ⌊Mᵢ⌋
  void advance() { ++i; }
};

struct DaggerOptions {
  std::uint64_t iterations = 100;
  int horizon = 10;                 // T, days per trajectory
  int updates_per_step = 1;         // gradient updates per collected step
};

struct DaggerIterationStats {
  std::uint64_t iteration = 0;      // 1-based
  std::uint64_t exponent = 0;
  double mix = 0.0;
  std::uint64_t planning_trajectories = 0;
  std::uint64_t planning_steps = 0;
  std::uint64_t real_steps = 0;
  std::size_t buffer_planning = 0;
  std::size_t buffer_online = 0;
  std::size_t buffer_offline = 0;
  std::uint64_t env_step_count = 0;
  std::uint64_t agent_env_steps = 0;
  double mean_real_daily_cost_usd = 0.0;
};

using DaggerHook = std::function<void(const DaggerIterationStats&, const SacAgent&)>;

/// Alg. 1: per iteration ⌊Mᵢ⌋ planning trajectories from the latest real
/// observation, one real trajectory, then training on the aggregate buffer.
std::vector<DaggerIterationStats> dagger_train(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env,
                                               const PlanningModel& model, MixSchedule& schedule,
                                               const DaggerOptions& options, const DaggerHook& hook = {});

struct TwoStageOptions {
  std::uint64_t warmup_steps = 1000;
  PlanningTrainOptions planning;
  DaggerOptions dagger;
  double m0 = 10.0;
  double beta = 0.99;
};

struct TwoStageResult {
  PlanningModel model;
  PlanningDataset warmup_data;
  std::vector<DaggerIterationStats> iterations;
};

/// Stage 1 trains online while recording planning data; stage 2 fits the
/// planning model on it and continues with dagger_train.
TwoStageResult two_stage_train(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env, const TwoStageOptions& options,
                               const OnlineHook& online_hook = {}, const DaggerHook& dagger_hook = {});

}  // namespace officedr

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "officedr/dense_net.hpp"
#include "officedr/replay_buffer.hpp"
#include "officedr/sim_env.hpp"

namespace officedr {

struct SacConfig {
  double gamma = 0.99;
  double alpha = 0.1;
  double tau = 0.005;
  double lr = 3e-4;
  int batch_size = 256;
  std::size_t buffer_capacity = 1'000'000;
  int updates_per_env_step = 1;
  std::vector<int> hidden{256, 256};
  int obs_dim = static_cast<int>(kObservationDim);
  int action_dim = static_cast<int>(kHours);
  double action_low = PriceSignal::kMinPoints;
  double action_high = PriceSignal::kMaxPoints;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const SacConfig&, const SacConfig&) = default;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Squashed-Gaussian policy draw for a batch (one column per sample).
struct PolicySample {
  Eigen::MatrixXd action;    // rescaled into [action_low, action_high]
  Eigen::MatrixXd squashed;  // tanh(pre_tanh), in [-1, 1]
  Eigen::MatrixXd pre_tanh;
  Eigen::MatrixXd noise;     // standard normal draws (zero when deterministic)
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;   // after clamping
  Eigen::MatrixXd std;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> log_std_clamped;
  Eigen::VectorXd log_prob;  // density of `action` in action space
};

/// Observation → (mean, log-std) per action dimension.
struct Actor {
  DenseNet net;
  double action_low = PriceSignal::kMinPoints;
  double action_high = PriceSignal::kMaxPoints;

  int action_dim() const { return net.output_dim() / 2; }
  double center() const { return 0.5 * (action_low + action_high); }
  double half_range() const { return 0.5 * (action_high - action_low); }

  /// `rng == nullptr` selects the deterministic squash(mean) action.
  PolicySample sample(const Eigen::MatrixXd& obs, Rng* rng, DenseNet::Trace* trace = nullptr) const;

  friend bool operator==(const Actor&, const Actor&) = default;
};

/// log N(u; mean, std) - log(1 - tanh²u) - log(half_range), summed over dims.
Eigen::VectorXd squashed_gaussian_log_prob(const Eigen::MatrixXd& pre_tanh, const Eigen::MatrixXd& mean,
                                           const Eigen::MatrixXd& log_std, double half_range);

/// Twin Q networks over (observation ⊕ normalized action) with target copies.
struct CriticPair {
  DenseNet q1, q2;
  DenseNet target1, target2;

  friend bool operator==(const CriticPair&, const CriticPair&) = default;
};

struct SacAgent {
  SacConfig config;
  Actor actor;
  CriticPair critics;
  AdamState actor_adam, critic1_adam, critic2_adam;
  Rng rng;
  std::uint64_t env_steps = 0;
  std::uint64_t update_steps = 0;

  static SacAgent create(const SacConfig& config);

  /// Maps raw actions into the critic's [-1, 1] action coordinates.
  Eigen::MatrixXd normalize_actions(const Eigen::MatrixXd& actions) const;

  friend bool operator==(const SacAgent&, const SacAgent&) = default;
};

PriceSignal sample_action(const Actor& actor, std::span<const double> obs, Rng& rng, bool deterministic);

/// y = r + γ·(1 - done)·(min(Q'₁, Q'₂)(s', a') - α·log π(a'|s')), a' ~ π(s').
Eigen::VectorXd critic_targets(const Batch& batch, const CriticPair& critics, const Actor& actor, double gamma,
                               double alpha, Rng& rng);

struct UpdateReport {
  enum class Status { Updated, WarmingUp };
  Status status = Status::WarmingUp;
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
};

/// One critic step, one actor step and a polyak target update. Returns a
/// WarmingUp report without touching the agent while the buffer holds
/// fewer than batch_size records.
UpdateReport sac_update(SacAgent& agent, const ReplayBuffer& buffer);

struct OnlineStepRecord {
  std::uint64_t env_step = 0;
  double daily_cost_usd = 0.0;
  double reward = 0.0;
  UpdateReport update;
};

using OnlineHook = std::function<void(const OnlineStepRecord&, const SacAgent&)>;

/// Stochastic-policy rollout in `env`, pushing online-tagged transitions
/// and running updates_per_env_step updates after every day.
void train_online(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env, std::uint64_t total_env_steps,
                  const OnlineHook& hook = {});

ReplayBuffer make_replay_buffer(const SacConfig& config);

void checkpoint_save(const SacAgent& agent, const std::filesystem::path& path);
SacAgent checkpoint_load(const std::filesystem::path& path);

}  // namespace officedr

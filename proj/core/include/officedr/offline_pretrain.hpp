#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "officedr/baselines.hpp"
#include "officedr/dataset.hpp"
#include "officedr/sac_agent.hpp"

namespace officedr {

enum class BehaviorPolicy : std::uint8_t { UniformRandom };

/// Recipe for the deterministic-function offline dataset.
struct OfflineDatasetSpec {
  /// Transitions per variant: linear, sinusoidal, threshold_exp.
  std::array<std::uint64_t, 3> counts{256'000, 256'000, 256'000};
  std::array<double, 2> multiplier_range{0.5, 4.0};
  std::array<double, 2> threshold_range{5.0, 5.0};
  int persons_per_office = 10;
  int episode_length = 10;
  std::array<double, 2> baseline_range{5.0, 15.0};
  double lambda = 10.0;
  double d_hat_fraction = 0.5;
  BehaviorPolicy behavior = BehaviorPolicy::UniformRandom;
  std::uint64_t seed = 7;

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2]; }
  void validate() const;
};

std::string offline_spec_to_json(const OfflineDatasetSpec& spec);
OfflineDatasetSpec offline_spec_from_json(const std::string& text);
OfflineDatasetSpec load_offline_spec(const std::filesystem::path& path);

/// Randomized single-variant office: one multiplier (and threshold) drawn
/// for all persons.
OfficeConfig randomized_office(const OfflineDatasetSpec& spec, ResponseKind variant, Rng& rng);

/// Rolls uniform-random episodes on freshly randomized offices, variant by
/// variant, until each variant's count is met exactly. Variant k draws from
/// derive_seed(seed, k), so output is byte-identical for a given spec.
DatasetHeader generate_offline_dataset(const OfflineDatasetSpec& spec, const std::filesystem::path& out);

/// Loads every record into an offline-tagged buffer sized to the dataset.
ReplayBuffer load_offline_buffer(const std::filesystem::path& dataset, const SacConfig& config);

struct PretrainOptions {
  int epochs = 15;
  int checkpoint_every = 1;         // epochs; 0 disables checkpoints
  std::filesystem::path out_dir;    // empty disables checkpoints
};

struct PretrainResult {
  std::uint64_t updates = 0;
  std::uint64_t updates_per_epoch = 0;
  std::vector<std::filesystem::path> checkpoints;
};

/// epochs × ⌊size / batch⌋ sac_update calls on `buffer`. Never steps an
/// environment, so agent.env_steps is unchanged.
PretrainResult pretrain(SacAgent& agent, const ReplayBuffer& buffer, const PretrainOptions& options);
PretrainResult pretrain(SacAgent& agent, const std::filesystem::path& dataset, const PretrainOptions& options);

std::filesystem::path pretrain_checkpoint_path(const std::filesystem::path& dir, int epoch);

struct AblationOptions {
  std::uint64_t days = 2000;
  std::uint64_t eval_stride = 50;
  std::uint64_t seed = 0;
};

/// Fine-tunes each checkpoint online with identical agent and environment
/// seeds and returns one evaluation curve per checkpoint.
std::vector<CostCurve> ablation_series(const std::vector<std::filesystem::path>& checkpoints,
                                       const OfficeConfig& train_office, const OfficeConfig& eval_office,
                                       const AblationOptions& options);

}  // namespace officedr

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "officedr/common.hpp"

namespace officedr {

/// Grid tariff in $/kWh, one entry per work hour.
struct GridPriceVector {
  Hourly prices;

  /// The time-of-use tariff the office pays.
  static GridPriceVector time_of_use();
  void validate(std::size_t hours = kHours) const;
};

/// Controller action: points per kWh shown to workers for each hour.
struct PriceSignal {
  static constexpr double kMinPoints = 0.0;
  static constexpr double kMaxPoints = 10.0;

  Hourly points;

  static PriceSignal constant(double value, std::size_t hours = kHours) {
    return PriceSignal{Hourly(hours, value)};
  }
  void validate(std::size_t hours = kHours) const;
};

/// Per-person hourly baseline demand with its clip floor and ceiling (kWh).
struct BaselineProfile {
  Hourly baseline;
  Hourly floor;
  Hourly ceiling;

  std::size_t hours() const { return baseline.size(); }
  void validate() const;
};

struct LinearResponse {
  double multiplier = 1.0;
};

struct SinusoidalResponse {
  double multiplier = 1.0;
};

struct ThresholdExpResponse {
  double threshold = 5.0;
};

struct CurtailShiftResponse {
  double fixed_fraction = 0.4;
  double curtail_fraction = 0.3;
  double shift_fraction = 0.3;
  int curtail_hours = 3;
  int shift_window = 3;
};

enum class ResponseKind : std::uint8_t { Linear = 0, Sinusoidal = 1, ThresholdExp = 2, CurtailShift = 3 };

std::string_view to_string(ResponseKind kind);
ResponseKind response_kind_from_string(std::string_view name);

using ResponseModel =
    std::variant<LinearResponse, SinusoidalResponse, ThresholdExpResponse, CurtailShiftResponse>;

struct PersonModel {
  BaselineProfile profile;
  ResponseModel response;

  ResponseKind kind() const { return static_cast<ResponseKind>(response.index()); }
  bool is_deterministic_function() const { return kind() != ResponseKind::CurtailShift; }
  void validate() const;
};

// Deterministic-function responses. Each hour's demand depends only on that
// hour's points and is clipped to [floor, ceiling].
Hourly respond_linear(const BaselineProfile& profile, std::span<const double> points, double multiplier);
Hourly respond_sinusoidal(const BaselineProfile& profile, std::span<const double> points, double multiplier);
Hourly respond_threshold_exp(const BaselineProfile& profile, std::span<const double> points,
                             double threshold = 5.0);

/// Curtail-and-shift demand split into its three components after the
/// price response has been applied.
struct CurtailShiftBreakdown {
  Hourly fixed;
  Hourly curtailable;
  Hourly shiftable;

  Hourly total() const;
};

CurtailShiftBreakdown curtail_shift_breakdown(const BaselineProfile& profile,
                                              const CurtailShiftResponse& params,
                                              std::span<const double> points);
/// Throws ValidationError when `person` is not a curtail-and-shift worker.
Hourly respond_curtail_shift(const PersonModel& person, std::span<const double> points);

/// Dispatches on the person's response variant.
Hourly respond(const PersonModel& person, std::span<const double> points);

/// Reward parameters shared by the real environment and the planning model.
struct RewardParams {
  GridPriceVector grid;
  double d_hat = 0.0;
  double lambda = 10.0;
};

struct OfficeConfig {
  std::vector<PersonModel> persons;
  GridPriceVector grid = GridPriceVector::time_of_use();
  double d_hat = 0.0;
  double lambda = 10.0;
  int episode_length = 10;
  std::uint64_t rng_seed = 0;

  std::size_t hours() const { return grid.prices.size(); }
  RewardParams reward_params() const { return {grid, d_hat, lambda}; }
  void validate() const;
};

Hourly aggregate_demand(const OfficeConfig& office, std::span<const double> points);

/// dᵀg in dollars.
double demand_cost(std::span<const double> demand, std::span<const double> grid);

/// -ln(dᵀg) - λ·[dᵀg < d̂]. Throws DomainError when dᵀg ≤ 0.
double compute_reward(std::span<const double> demand, const GridPriceVector& grid, double d_hat,
                      double lambda);
inline double compute_reward(std::span<const double> demand, const RewardParams& params) {
  return compute_reward(demand, params.grid, params.d_hat, params.lambda);
}

struct EnvState {
  int day_index = 0;
  Hourly prev_aggregate_demand;
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool done = false;
  double daily_cost_usd = 0.0;
  Hourly demand;
  std::vector<double> next_observation;
};

EnvState env_reset(const OfficeConfig& office, std::uint64_t seed);
StepResult env_step(const OfficeConfig& office, const EnvState& state, const PriceSignal& action);

/// Previous-day aggregate demand scaled by its own maximum (zeros if the
/// maximum is zero).
std::vector<double> encode_observation(const EnvState& state, const OfficeConfig& office);

inline constexpr std::size_t kObservationDim = kHours;

/// Owning wrapper around the functional env_reset / env_step pair. Counts
/// every real step so that callers can prove a code path never touched the
/// environment.
class OfficeEnv {
 public:
  explicit OfficeEnv(OfficeConfig office, std::uint64_t seed = 0);

  const std::vector<double>& reset();
  StepResult step(const PriceSignal& action);

  const OfficeConfig& office() const { return office_; }
  const EnvState& state() const { return state_; }
  const std::vector<double>& observation() const { return observation_; }
  std::uint64_t step_count() const { return step_count_; }

 private:
  OfficeConfig office_;
  std::uint64_t seed_;
  EnvState state_;
  std::vector<double> observation_;
  std::uint64_t step_count_ = 0;
};

}  // namespace officedr

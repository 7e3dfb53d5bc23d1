#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "officedr/baselines.hpp"
#include "officedr/office_config.hpp"
#include "officedr/planning.hpp"
#include "officedr/sac_agent.hpp"

namespace officedr {

enum class Scenario : std::uint8_t {
  OnlineSac,
  OfflineOnlineSac,
  DaggerSac,
  OfflineDaggerSac,
  TwoStageDagger,
  Tou,
  Flat,
};

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view name);
/// Every pricing scheme except flat runs the Social Game and pays its overhead.
bool is_social_game(Scenario s);
bool uses_planning_model(Scenario s);
bool uses_pretrained_checkpoint(Scenario s);

// ---- cost ledger (integer cents) ----

inline constexpr std::int64_t kBusinessDays = 250;
inline constexpr std::int64_t kSocialGameOverheadCents = 10'000 * 100;

std::int64_t to_cents(double usd);
std::string format_cents(std::int64_t cents);  // "30000.00"

struct AnnualCost {
  std::int64_t energy_cents = 0;
  std::int64_t overhead_cents = 0;
  std::int64_t total_cents = 0;
};

AnnualCost annualize(std::int64_t daily_cents, Scenario scenario);

inline constexpr std::uint64_t kInfiniteDataCost = std::numeric_limits<std::uint64_t>::max();

/// First eval day whose cost, and the costs of the following window - 1
/// evaluations, are all strictly below `baseline_daily_usd`.
/// kInfiniteDataCost if no such run exists.
std::uint64_t data_cost(const CostCurve& curve, double baseline_daily_usd, std::size_t confirmation_window = 10);

/// Prepends `offset_days` days of TOU cost to a per-day series.
std::vector<double> planning_offset(const std::vector<double>& daily_usd, double tou_daily_usd,
                                    std::uint64_t offset_days = 1000);
/// Curve form: days shift right by `offset_days`, and evaluations at
/// 0, stride, … below the offset report the TOU cost.
CostCurve planning_offset(const CostCurve& curve, double tou_daily_usd, std::uint64_t stride,
                          std::uint64_t offset_days = 1000);

inline constexpr double kCarbonIntensityLbsPerKwh = 0.52;

/// energy × intensity × (1 - retained), rounded to 1e-6 lbs.
double carbon_estimate(double energy_kwh, double intensity_lbs_per_kwh, double retained_fraction);

// ---- plans ----

struct DaggerPlan {
  double m0 = 10.0;
  double beta = 0.99;
  int horizon = 10;
  int updates_per_step = 1;
};

struct ExperimentPlan {
  Scenario scenario = Scenario::OnlineSac;
  int trials = 5;
  std::uint64_t days = 2000;
  std::uint64_t eval_stride = 50;
  std::uint64_t seed_base = 0;
  std::vector<std::uint64_t> seeds;  // empty: derive_seed(seed_base, trial)
  OfficeSpec office = evaluation_office_spec();
  SacConfig sac;
  std::filesystem::path checkpoint;      // offline-* scenarios
  std::filesystem::path planning_model;  // dagger-sac, offline-dagger-sac
  DaggerPlan dagger;
  std::uint64_t warmup_steps = 1000;     // two-stage-dagger
  int planning_epochs = 10'000;          // two-stage-dagger
  std::uint64_t planning_offset_days = 1000;
  std::size_t confirmation_window = 10;
  std::filesystem::path out_dir = "results";

  std::vector<std::uint64_t> trial_seeds() const;
  void validate() const;
};

std::string plan_to_json(const ExperimentPlan& plan);
/// Relative artifact paths resolve against `base_dir`.
ExperimentPlan plan_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path& path);
std::uint64_t plan_hash(const ExperimentPlan& plan);

SacConfig sac_config_from_json(const std::string& text);
std::string sac_config_to_json(const SacConfig& config);

struct AggregateCurve {
  std::string label;
  std::vector<std::uint64_t> day;
  std::vector<double> mean;
  std::vector<double> sem;  // sample stddev / √trials, 0 for one trial
};

AggregateCurve aggregate_curves(const std::vector<CostCurve>& trials);

struct TrialResult {
  std::uint64_t seed = 0;
  CostCurve curve;
  std::optional<SacAgent> agent;
};

/// One trial of the plan's scenario. Static scenarios evaluate their fixed
/// signal; learning scenarios train with evaluations every eval_stride days.
/// When `metrics` is set, one metrics_csv_header() row per real training day
/// is appended to it.
TrialResult run_trial(const ExperimentPlan& plan, std::uint64_t seed, int trial = 0, std::ostream* metrics = nullptr);

std::string metrics_csv_header();

struct ExperimentResult {
  std::vector<TrialResult> trials;
  AggregateCurve aggregate;
  double tou_daily_usd = 0.0;
  std::uint64_t data_cost_days = kInfiniteDataCost;
  std::vector<std::filesystem::path> files;
};

/// Runs every trial, writing trial_<k>.csv, trial_<k>.ckpt (learning
/// scenarios) and aggregate.csv under plan.out_dir.
ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream* metrics = nullptr);

std::string curve_csv(const CostCurve& curve, Scenario scenario, std::uint64_t plan_hash);
std::string aggregate_csv(const AggregateCurve& curve, Scenario scenario, std::uint64_t plan_hash);
AggregateCurve read_aggregate_csv(const std::filesystem::path& path);

/// Long-format "series,day,mean_daily_usd,sem_daily_usd" rows.
std::string emit_plot_data(const std::vector<AggregateCurve>& curves);

struct ReportInput {
  std::vector<AggregateCurve> curves;
  double tou_daily_usd = 0.0;
  double flat_daily_usd = 0.0;
  double tou_retained_energy = 1.0;  // TOU kWh / flat kWh on the office
  std::size_t confirmation_window = 10;
};

ReportInput report_input(const std::vector<AggregateCurve>& curves, const OfficeConfig& office);
std::string build_report(const ReportInput& input);

}  // namespace officedr

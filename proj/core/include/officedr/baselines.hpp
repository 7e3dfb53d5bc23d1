#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "officedr/replay_buffer.hpp"
#include "officedr/sac_agent.hpp"
#include "officedr/sim_env.hpp"

namespace officedr {

enum class StaticLabel : std::uint8_t { TOU, Flat };

struct StaticController {
  PriceSignal signal;
  StaticLabel label = StaticLabel::Flat;
};

/// The grid tariff passed straight through as points.
PriceSignal tou_signal();
/// All zeros: workers behave as with no demand response.
PriceSignal flat_signal();

StaticController tou_controller();
StaticController flat_controller();

using Controller = std::function<PriceSignal(std::span<const double> obs)>;

Controller as_controller(const StaticController& controller);
/// Deterministic squash(mean) policy of `actor`.
Controller policy_controller(const Actor& actor);

struct CostStats {
  double mean_daily_usd = 0.0;
  double total_usd = 0.0;
  std::vector<double> daily_usd;
};

CostStats evaluate_controller(const Controller& controller, const OfficeConfig& office, int days,
                              std::uint64_t seed);

struct OracleResult {
  PriceSignal signal;
  double daily_cost_usd = 0.0;
  /// True when the unconstrained optimum fell below d̂ and the result is
  /// the cheapest grid point found that still meets it.
  bool floor_binding = false;
};

inline constexpr double kDefaultOracleResolution = 0.1;

/// Per-hour grid scan over [0, 10] exploiting separability of the
/// deterministic-function responses. Grid points with dᵀg < d̂ are treated
/// as infeasible; when the per-hour optimum violates that floor a bucketed
/// dynamic program over partial costs recovers the cheapest feasible
/// signal (exact up to 1e-5 of the largest achievable cost).
OracleResult oracle_deterministic(const OfficeConfig& office, double resolution = kDefaultOracleResolution);

/// Joint enumeration of every grid signal for offices with at most five
/// hours and at most 1e7 grid signals. Ties go to the lexicographically
/// smallest signal.
OracleResult oracle_exhaustive(const OfficeConfig& office, double resolution);

/// Grid values k·resolution for k = 0..round(10 / resolution).
std::vector<double> price_grid(double resolution);

/// Evaluation cost series recorded while training online.
struct CostCurve {
  std::string label;
  std::vector<std::uint64_t> day;  // real environment days consumed
  std::vector<double> daily_cost_usd;
};

/// Mean daily cost of one deterministic-policy episode on `eval_office`.
double evaluate_policy_episode(const Actor& actor, const OfficeConfig& eval_office);

/// train_online with a deterministic evaluation every `eval_stride` days,
/// including day 0.
CostCurve train_online_with_eval(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env,
                                 const OfficeConfig& eval_office, std::uint64_t days, std::uint64_t eval_stride,
                                 const OnlineHook& hook = {});

}  // namespace officedr

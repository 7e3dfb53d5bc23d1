#include "officedr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace officedr {

PriceSignal tou_signal() { return PriceSignal{GridPriceVector::time_of_use().prices}; }

PriceSignal flat_signal() { return PriceSignal::constant(0.0); }

StaticController tou_controller() { return {tou_signal(), StaticLabel::TOU}; }
StaticController flat_controller() { return {flat_signal(), StaticLabel::Flat}; }

Controller as_controller(const StaticController& controller) {
  return [signal = controller.signal](std::span<const double>) { return signal; };
}

Controller policy_controller(const Actor& actor) {
  return [&actor](std::span<const double> obs) {
    Rng unused;
    return sample_action(actor, obs, unused, true);
  };
}

CostStats evaluate_controller(const Controller& controller, const OfficeConfig& office, int days,
                              std::uint64_t seed) {
  if (days < 1) throw ValidationError("evaluation needs at least one day");
  OfficeEnv env(office, seed);
  CostStats stats;
  stats.daily_usd.reserve(static_cast<std::size_t>(days));
  for (int d = 0; d < days; ++d) {
    const PriceSignal action = controller(env.observation());
    const StepResult r = env.step(action);
    stats.daily_usd.push_back(r.daily_cost_usd);
    stats.total_usd += r.daily_cost_usd;
  }
  stats.mean_daily_usd = stats.total_usd / days;
  return stats;
}

std::vector<double> price_grid(double resolution) {
  if (!(resolution > 0.0) || resolution > PriceSignal::kMaxPoints) {
    throw ValidationError("oracle resolution must lie in (0, 10]");
  }
  const auto steps = static_cast<long>(std::llround(PriceSignal::kMaxPoints / resolution));
  std::vector<double> grid;
  for (long k = 0; k <= steps; ++k) grid.push_back(std::min(k * resolution, PriceSignal::kMaxPoints));
  return grid;
}

OracleResult oracle_deterministic(const OfficeConfig& office, double resolution) {
  office.validate();
  for (const auto& p : office.persons) {
    if (!p.is_deterministic_function()) {
      throw ValidationError("oracle_deterministic requires deterministic-function persons only");
    }
  }
  const std::vector<double> grid = price_grid(resolution);
  const std::size_t hours = office.hours();
  const std::size_t G = grid.size();

  // cost[t][k]: hour-t office cost with p_t = grid[k]. Responses are
  // separable, so a constant signal evaluates every hour at once.
  std::vector<std::vector<double>> cost(hours, std::vector<double>(G));
  for (std::size_t k = 0; k < G; ++k) {
    const Hourly d = aggregate_demand(office, Hourly(hours, grid[k]));
    for (std::size_t t = 0; t < hours; ++t) cost[t][k] = d[t] * office.grid.prices[t];
  }

  OracleResult best;
  best.signal.points.assign(hours, 0.0);
  std::vector<std::size_t> choice(hours, 0);
  double total = 0.0;
  for (std::size_t t = 0; t < hours; ++t) {
    for (std::size_t k = 1; k < G; ++k) {
      if (cost[t][k] < cost[t][choice[t]]) choice[t] = k;
    }
    total += cost[t][choice[t]];
  }

  if (total < office.d_hat) {
    // Cheapest combination with Σ cost ≥ d̂. Partial sums are bucketed;
    // each bucket keeps its largest exact sum so feasibility is never lost.
    best.floor_binding = true;
    double max_total = 0.0;
    for (std::size_t t = 0; t < hours; ++t) max_total += *std::max_element(cost[t].begin(), cost[t].end());
    if (max_total < office.d_hat) throw ValidationError("no grid signal meets the d_hat floor");
    constexpr std::size_t kBuckets = 100000;
    const double width = max_total / static_cast<double>(kBuckets - 1);
    constexpr double kEmpty = -1.0;
    std::vector<double> sums(kBuckets, kEmpty);
    sums[0] = 0.0;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint16_t>>> back(
        hours, std::vector<std::pair<std::uint32_t, std::uint16_t>>(kBuckets));
    for (std::size_t t = 0; t < hours; ++t) {
      std::vector<double> next(kBuckets, kEmpty);
      for (std::size_t b = 0; b < kBuckets; ++b) {
        if (sums[b] < 0.0) continue;
        for (std::size_t k = 0; k < G; ++k) {
          const double s = sums[b] + cost[t][k];
          const auto nb = std::min(kBuckets - 1, static_cast<std::size_t>(s / width));
          if (s > next[nb]) {
            next[nb] = s;
            back[t][nb] = {static_cast<std::uint32_t>(b), static_cast<std::uint16_t>(k)};
          }
        }
      }
      sums = std::move(next);
    }
    std::size_t pick = kBuckets;
    for (std::size_t b = 0; b < kBuckets; ++b) {
      if (sums[b] >= office.d_hat && (pick == kBuckets || sums[b] < sums[pick])) pick = b;
    }
    if (pick == kBuckets) throw ValidationError("no grid signal meets the d_hat floor");
    std::size_t b = pick;
    for (std::size_t t = hours; t-- > 0;) {
      choice[t] = back[t][b].second;
      b = back[t][b].first;
    }
  }

  for (std::size_t t = 0; t < hours; ++t) best.signal.points[t] = grid[choice[t]];
  best.daily_cost_usd = demand_cost(aggregate_demand(office, best.signal.points), office.grid.prices);
  return best;
}

OracleResult oracle_exhaustive(const OfficeConfig& office, double resolution) {
  office.validate();
  const std::size_t hours = office.hours();
  if (hours > 5) throw ValidationError("oracle_exhaustive supports at most 5 hours");
  const std::vector<double> grid = price_grid(resolution);
  const double combos = std::pow(static_cast<double>(grid.size()), static_cast<double>(hours));
  if (combos > 1e7) throw ValidationError("oracle_exhaustive search space exceeds 1e7 signals");

  // Odometer over grid indices, last hour fastest, so the first minimum
  // found is the lexicographically smallest.
  std::vector<std::size_t> idx(hours, 0);
  Hourly signal(hours);
  OracleResult best;
  best.daily_cost_usd = std::numeric_limits<double>::infinity();
  bool found = false;
  while (true) {
    for (std::size_t t = 0; t < hours; ++t) signal[t] = grid[idx[t]];
    const double c = demand_cost(aggregate_demand(office, signal), office.grid.prices);
    if (c >= office.d_hat && c < best.daily_cost_usd) {
      best.daily_cost_usd = c;
      best.signal.points = signal;
      found = true;
    }
    bool carry = true;
    for (std::size_t t = hours; carry && t-- > 0;) {
      if (++idx[t] < grid.size()) {
        carry = false;
      } else {
        idx[t] = 0;
      }
    }
    if (carry) break;
  }
  if (!found) throw ValidationError("no grid signal meets the d_hat floor");
  return best;
}

double evaluate_policy_episode(const Actor& actor, const OfficeConfig& eval_office) {
  return evaluate_controller(policy_controller(actor), eval_office, eval_office.episode_length, 0).mean_daily_usd;
}

CostCurve train_online_with_eval(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env,
                                 const OfficeConfig& eval_office, std::uint64_t days, std::uint64_t eval_stride,
                                 const OnlineHook& hook) {
  if (eval_stride == 0) throw ValidationError("eval stride must be positive");
  CostCurve curve;
  curve.day.push_back(0);
  curve.daily_cost_usd.push_back(evaluate_policy_episode(agent.actor, eval_office));
  std::uint64_t done = 0;
  while (done < days) {
    const std::uint64_t chunk = std::min(eval_stride, days - done);
    train_online(agent, buffer, env, chunk, hook);
    done += chunk;
    curve.day.push_back(done);
    curve.daily_cost_usd.push_back(evaluate_policy_episode(agent.actor, eval_office));
  }
  return curve;
}

}  // namespace officedr

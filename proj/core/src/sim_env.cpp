#include "officedr/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace officedr {

namespace {

void require_size(std::span<const double> v, std::size_t hours, const char* what) {
  if (v.size() != hours) {
    throw ValidationError(std::string(what) + ": expected " + std::to_string(hours) + " hourly values, got " +
                          std::to_string(v.size()));
  }
}

template <typename Delta>
Hourly clipped_response(const BaselineProfile& profile, std::span<const double> points, Delta delta) {
  require_size(points, profile.hours(), "price signal");
  Hourly d(profile.hours());
  for (std::size_t t = 0; t < d.size(); ++t) {
    d[t] = std::clamp(profile.baseline[t] - delta(points[t]), profile.floor[t], profile.ceiling[t]);
  }
  return d;
}

}  // namespace

GridPriceVector GridPriceVector::time_of_use() {
  return {{0.09, 0.09, 0.09, 0.39, 0.39, 0.39, 0.09, 0.09, 0.09, 0.09}};
}

void GridPriceVector::validate(std::size_t hours) const {
  require_size(prices, hours, "grid prices");
  for (double g : prices) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("grid prices must be finite and non-negative");
  }
}

void PriceSignal::validate(std::size_t hours) const {
  require_size(points, hours, "price signal");
  for (double p : points) {
    if (!(p >= kMinPoints && p <= kMaxPoints)) {
      throw ValidationError("price signal value " + std::to_string(p) + " outside [0, 10]");
    }
  }
}

void BaselineProfile::validate() const {
  if (baseline.empty()) throw ValidationError("baseline profile is empty");
  if (floor.size() != baseline.size() || ceiling.size() != baseline.size()) {
    throw ValidationError("baseline, floor and ceiling lengths differ");
  }
  for (std::size_t t = 0; t < baseline.size(); ++t) {
    if (!(0.0 <= floor[t] && floor[t] <= baseline[t] && baseline[t] <= ceiling[t])) {
      throw ValidationError("baseline profile violates 0 <= floor <= baseline <= ceiling at hour " +
                            std::to_string(t));
    }
  }
}

std::string_view to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Linear: return "linear";
    case ResponseKind::Sinusoidal: return "sinusoidal";
    case ResponseKind::ThresholdExp: return "threshold_exp";
    case ResponseKind::CurtailShift: return "curtail_shift";
  }
  return "unknown";
}

ResponseKind response_kind_from_string(std::string_view name) {
  for (auto k : {ResponseKind::Linear, ResponseKind::Sinusoidal, ResponseKind::ThresholdExp,
                 ResponseKind::CurtailShift}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown response kind '" + std::string(name) + "'");
}

void PersonModel::validate() const {
  profile.validate();
  const int hours = static_cast<int>(profile.hours());
  std::visit(
      [hours](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LinearResponse> || std::is_same_v<T, SinusoidalResponse>) {
          if (!(r.multiplier > 0.0)) throw ValidationError("response multiplier must be positive");
        } else if constexpr (std::is_same_v<T, ThresholdExpResponse>) {
          if (!std::isfinite(r.threshold)) throw ValidationError("threshold must be finite");
        } else {
          const double sum = r.fixed_fraction + r.curtail_fraction + r.shift_fraction;
          if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("curtail/shift fractions must sum to 1");
          if (r.fixed_fraction < 0 || r.curtail_fraction < 0 || r.shift_fraction < 0) {
            throw ValidationError("curtail/shift fractions must be non-negative");
          }
          if (r.curtail_hours < 1 || r.curtail_hours > hours) {
            throw ValidationError("curtail window must lie in 1.." + std::to_string(hours));
          }
          if (r.shift_window < 0 || r.shift_window > hours - 1) {
            throw ValidationError("shift window must lie in 0.." + std::to_string(hours - 1));
          }
        }
      },
      response);
}

Hourly respond_linear(const BaselineProfile& profile, std::span<const double> points, double multiplier) {
  return clipped_response(profile, points, [multiplier](double p) { return p * multiplier; });
}

Hourly respond_sinusoidal(const BaselineProfile& profile, std::span<const double> points, double multiplier) {
  return clipped_response(profile, points, [multiplier](double p) { return std::sin(p) * multiplier; });
}

Hourly respond_threshold_exp(const BaselineProfile& profile, std::span<const double> points, double threshold) {
  return clipped_response(profile, points, [threshold](double p) { return p > threshold ? std::exp(p) : 0.0; });
}

Hourly CurtailShiftBreakdown::total() const {
  Hourly d(fixed.size());
  for (std::size_t t = 0; t < d.size(); ++t) d[t] = fixed[t] + curtailable[t] + shiftable[t];
  return d;
}

CurtailShiftBreakdown curtail_shift_breakdown(const BaselineProfile& profile, const CurtailShiftResponse& params,
                                              std::span<const double> points) {
  const std::size_t hours = profile.hours();
  require_size(points, hours, "price signal");

  CurtailShiftBreakdown out{Hourly(hours), Hourly(hours), Hourly(hours, 0.0)};
  for (std::size_t t = 0; t < hours; ++t) {
    out.fixed[t] = profile.baseline[t] * params.fixed_fraction;
    out.curtailable[t] = profile.baseline[t] * params.curtail_fraction;
  }

  // Highest points first; equal points rank the earlier hour higher.
  std::vector<std::size_t> order(hours);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] > points[b]; });
  const auto curtailed = std::min<std::size_t>(static_cast<std::size_t>(params.curtail_hours), hours);
  for (std::size_t k = 0; k < curtailed; ++k) out.curtailable[order[k]] = 0.0;

  const auto window = static_cast<std::size_t>(std::max(params.shift_window, 0));
  for (std::size_t t = 0; t < hours; ++t) {
    const std::size_t lo = t >= window ? t - window : 0;
    const std::size_t hi = std::min(hours - 1, t + window);
    std::size_t dest = lo;
    for (std::size_t u = lo + 1; u <= hi; ++u) {
      if (points[u] < points[dest]) dest = u;
    }
    out.shiftable[dest] += profile.baseline[t] * params.shift_fraction;
  }
  return out;
}

Hourly respond_curtail_shift(const PersonModel& person, std::span<const double> points) {
  const auto* params = std::get_if<CurtailShiftResponse>(&person.response);
  if (params == nullptr) throw ValidationError("respond_curtail_shift: person is not a curtail-and-shift worker");
  return curtail_shift_breakdown(person.profile, *params, points).total();
}

Hourly respond(const PersonModel& person, std::span<const double> points) {
  return std::visit(
      [&](const auto& r) -> Hourly {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LinearResponse>) {
          return respond_linear(person.profile, points, r.multiplier);
        } else if constexpr (std::is_same_v<T, SinusoidalResponse>) {
          return respond_sinusoidal(person.profile, points, r.multiplier);
        } else if constexpr (std::is_same_v<T, ThresholdExpResponse>) {
          return respond_threshold_exp(person.profile, points, r.threshold);
        } else {
          return curtail_shift_breakdown(person.profile, r, points).total();
        }
      },
      person.response);
}

void OfficeConfig::validate() const {
  if (persons.empty()) throw ValidationError("office has no persons");
  grid.validate(grid.prices.size());
  if (grid.prices.empty()) throw ValidationError("grid price vector is empty");
  for (const auto& p : persons) {
    p.validate();
    if (p.profile.hours() != hours()) throw ValidationError("person profile length differs from grid length");
  }
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be non-negative");
  if (!(d_hat >= 0.0)) throw ValidationError("d_hat must be non-negative");
  if (episode_length < 1) throw ValidationError("episode_length must be at least 1");
}

Hourly aggregate_demand(const OfficeConfig& office, std::span<const double> points) {
  Hourly total(office.hours(), 0.0);
  for (const auto& person : office.persons) {
    const Hourly d = respond(person, points);
    for (std::size_t t = 0; t < total.size(); ++t) total[t] += d[t];
  }
  return total;
}

double demand_cost(std::span<const double> demand, std::span<const double> grid) {
  if (demand.size() != grid.size()) throw ValidationError("demand and grid lengths differ");
  double cost = 0.0;
  for (std::size_t t = 0; t < demand.size(); ++t) cost += demand[t] * grid[t];
  return cost;
}

double compute_reward(std::span<const double> demand, const GridPriceVector& grid, double d_hat, double lambda) {
  const double cost = demand_cost(demand, grid.prices);
  if (!(cost > 0.0)) {
    throw DomainError("non-positive daily cost " + std::to_string(cost) + "; demand is corrupted");
  }
  const double penalty = cost < d_hat ? lambda : 0.0;
  return -std::log(cost) - penalty;
}

EnvState env_reset(const OfficeConfig& office, std::uint64_t /*seed*/) {
  // Persons respond deterministically, so the seed only labels the episode.
  EnvState state;
  state.day_index = 0;
  state.prev_aggregate_demand = aggregate_demand(office, Hourly(office.hours(), 0.0));
  return state;
}

StepResult env_step(const OfficeConfig& office, const EnvState& state, const PriceSignal& action) {
  action.validate(office.hours());
  StepResult r;
  r.demand = aggregate_demand(office, action.points);
  r.daily_cost_usd = demand_cost(r.demand, office.grid.prices);
  r.reward = compute_reward(r.demand, office.grid, office.d_hat, office.lambda);
  r.next.day_index = state.day_index + 1;
  r.next.prev_aggregate_demand = r.demand;
  r.done = (state.day_index + 1 == office.episode_length);
  r.next_observation = encode_observation(r.next, office);
  return r;
}

std::vector<double> encode_observation(const EnvState& state, const OfficeConfig& office) {
  std::vector<double> obs(office.hours(), 0.0);
  const auto& d = state.prev_aggregate_demand;
  const double peak = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  if (peak > 0.0) {
    for (std::size_t t = 0; t < obs.size(); ++t) obs[t] = d[t] / peak;
  }
  return obs;
}

OfficeEnv::OfficeEnv(OfficeConfig office, std::uint64_t seed) : office_(std::move(office)), seed_(seed) {
  office_.validate();
  reset();
}

const std::vector<double>& OfficeEnv::reset() {
  state_ = env_reset(office_, seed_);
  observation_ = encode_observation(state_, office_);
  return observation_;
}

StepResult OfficeEnv::step(const PriceSignal& action) {
  StepResult r = env_step(office_, state_, action);
  ++step_count_;
  // The returned transition keeps the terminal observation; the env itself
  // starts the next episode from the reset state.
  state_ = r.done ? env_reset(office_, seed_) : r.next;
  observation_ = encode_observation(state_, office_);
  return r;
}

}  // namespace officedr

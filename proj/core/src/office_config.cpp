#include "officedr/office_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace officedr {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 4> kVariantKeys{"linear", "sinusoidal", "threshold_exp", "curtail_shift"};

std::array<int, 4> apportion(int persons, const std::array<double, 4>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::array<int, 4> counts{};
  std::array<double, 4> remainder{};
  int assigned = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double exact = persons * weights[k] / total;
    counts[k] = static_cast<int>(std::floor(exact));
    remainder[k] = exact - counts[k];
    assigned += counts[k];
  }
  while (assigned < persons) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 4; ++k) {
      if (remainder[k] > remainder[best]) best = k;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

}  // namespace

void OfficeSpec::validate() const {
  if (persons < 1) throw ConfigError("office must have at least one person");
  double wsum = 0.0;
  for (double w : variant_weights) {
    if (!(w >= 0.0)) throw ConfigError("variant weights must be non-negative");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw ConfigError("variant weights sum to zero");
  if (!(multiplier_range[0] > 0.0 && multiplier_range[0] <= multiplier_range[1])) {
    throw ConfigError("multiplier range must satisfy 0 < lo <= hi");
  }
  if (!(baseline_range[0] > 0.0 && baseline_range[0] <= baseline_range[1])) {
    throw ConfigError("baseline range must satisfy 0 < lo <= hi");
  }
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
    throw ConfigError("fractions must sum to 1");
  }
  if (grid.empty()) throw ConfigError("grid must not be empty");
  const int hours = static_cast<int>(grid.size());
  if (curtail_hours < 1 || curtail_hours > hours) throw ConfigError("curtail_hours out of range");
  if (shift_window < 0 || shift_window > hours - 1) throw ConfigError("shift_window out of range");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(d_hat_value >= 0.0)) throw ConfigError("d_hat value must be non-negative");
  if (episode_length < 1) throw ConfigError("episode_length must be at least 1");
}

BaselineProfile synthetic_profile(Rng& rng, std::size_t hours, double lo, double hi) {
  BaselineProfile p;
  p.baseline.resize(hours);
  for (auto& b : p.baseline) b = rng.uniform(lo, hi);
  const auto [mn, mx] = std::minmax_element(p.baseline.begin(), p.baseline.end());
  p.floor.assign(hours, 0.5 * *mn);
  p.ceiling.assign(hours, 1.9 * *mx);
  return p;
}

double flat_signal_cost(const OfficeConfig& office) {
  return demand_cost(aggregate_demand(office, Hourly(office.hours(), 0.0)), office.grid.prices);
}

OfficeConfig build_office(const OfficeSpec& spec) {
  spec.validate();
  OfficeConfig office;
  office.grid.prices = spec.grid;
  office.lambda = spec.lambda;
  office.episode_length = spec.episode_length;
  office.rng_seed = spec.seed;

  Rng rng(spec.seed);
  const auto counts = apportion(spec.persons, spec.variant_weights);
  for (std::size_t k = 0; k < 4; ++k) {
    for (int n = 0; n < counts[k]; ++n) {
      PersonModel person;
      person.profile = synthetic_profile(rng, spec.grid.size(), spec.baseline_range[0], spec.baseline_range[1]);
      switch (static_cast<ResponseKind>(k)) {
        case ResponseKind::Linear:
          person.response = LinearResponse{rng.uniform(spec.multiplier_range[0], spec.multiplier_range[1])};
          break;
        case ResponseKind::Sinusoidal:
          person.response = SinusoidalResponse{rng.uniform(spec.multiplier_range[0], spec.multiplier_range[1])};
          break;
        case ResponseKind::ThresholdExp:
          person.response = ThresholdExpResponse{spec.threshold};
          break;
        case ResponseKind::CurtailShift:
          person.response = CurtailShiftResponse{spec.fractions[0], spec.fractions[1], spec.fractions[2],
                                                 spec.curtail_hours, spec.shift_window};
          break;
      }
      office.persons.push_back(std::move(person));
    }
  }

  office.d_hat = spec.d_hat_mode == DHatMode::FlatFraction ? spec.d_hat_value * flat_signal_cost(office)
                                                           : spec.d_hat_value;
  office.validate();
  return office;
}

OfficeSpec evaluation_office_spec() {
  OfficeSpec spec;
  spec.persons = 500;
  spec.variant_weights = {0.0, 0.0, 0.0, 1.0};
  spec.seed = 20210901;
  return spec;
}

std::string office_spec_to_json(const OfficeSpec& spec) {
  json j;
  j["persons"] = spec.persons;
  json mix;
  for (std::size_t k = 0; k < 4; ++k) mix[kVariantKeys[k]] = spec.variant_weights[k];
  j["variant_weights"] = mix;
  j["multiplier_range"] = spec.multiplier_range;
  j["threshold"] = spec.threshold;
  j["fractions"] = spec.fractions;
  j["curtail_hours"] = spec.curtail_hours;
  j["shift_window"] = spec.shift_window;
  j["baseline_range"] = spec.baseline_range;
  j["grid"] = spec.grid;
  j["lambda"] = spec.lambda;
  j["d_hat"] = {{"mode", spec.d_hat_mode == DHatMode::FlatFraction ? "flat_fraction" : "absolute"},
                {"value", spec.d_hat_value}};
  j["episode_length"] = spec.episode_length;
  j["seed"] = spec.seed;
  return j.dump(2);
}

OfficeSpec office_spec_from_json(const std::string& text) {
  OfficeSpec spec;
  try {
    const json j = json::parse(text);
    spec.persons = j.value("persons", spec.persons);
    if (j.contains("variant_weights")) {
      const auto& mix = j.at("variant_weights");
      for (std::size_t k = 0; k < 4; ++k) spec.variant_weights[k] = mix.value(kVariantKeys[k], 0.0);
    }
    spec.multiplier_range = j.value("multiplier_range", spec.multiplier_range);
    spec.threshold = j.value("threshold", spec.threshold);
    spec.fractions = j.value("fractions", spec.fractions);
    spec.curtail_hours = j.value("curtail_hours", spec.curtail_hours);
    spec.shift_window = j.value("shift_window", spec.shift_window);
    spec.baseline_range = j.value("baseline_range", spec.baseline_range);
    spec.grid = j.value("grid", spec.grid);
    spec.lambda = j.value("lambda", spec.lambda);
    if (j.contains("d_hat")) {
      const auto& dh = j.at("d_hat");
      const std::string mode = dh.value("mode", std::string("flat_fraction"));
      if (mode == "flat_fraction") {
        spec.d_hat_mode = DHatMode::FlatFraction;
      } else if (mode == "absolute") {
        spec.d_hat_mode = DHatMode::Absolute;
      } else {
        throw ConfigError("unknown d_hat mode '" + mode + "'");
      }
      spec.d_hat_value = dh.value("value", spec.d_hat_value);
    }
    spec.episode_length = j.value("episode_length", spec.episode_length);
    spec.seed = j.value("seed", spec.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("office config: ") + e.what());
  }
  spec.validate();
  return spec;
}

OfficeSpec load_office_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open office config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return office_spec_from_json(ss.str());
}

void save_office_spec(const OfficeSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write office config " + path.string());
  out << office_spec_to_json(spec) << '\n';
}

}  // namespace officedr

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "officedr/sim_env.hpp"

namespace officedr {

/// How the penalty floor d̂ is fixed for a generated office.
enum class DHatMode : std::uint8_t {
  FlatFraction,  // d̂ = value × (office cost under an all-zero signal)
  Absolute,      // d̂ = value dollars
};

/// Serializable recipe for an office. Persons are drawn from a seeded
/// synthetic generator: hourly baselines uniform in `baseline_range`, clip
/// floor 0.5·min(b) and ceiling 1.9·max(b) per person.
struct OfficeSpec {
  int persons = 500;
  /// Relative weights in ResponseKind order (linear, sinusoidal,
  /// threshold_exp, curtail_shift).
  std::array<double, 4> variant_weights{0.0, 0.0, 0.0, 1.0};
  std::array<double, 2> multiplier_range{0.5, 4.0};
  double threshold = 5.0;
  std::array<double, 3> fractions{0.4, 0.3, 0.3};
  int curtail_hours = 3;
  int shift_window = 3;
  std::array<double, 2> baseline_range{5.0, 15.0};
  Hourly grid = GridPriceVector::time_of_use().prices;
  double lambda = 10.0;
  DHatMode d_hat_mode = DHatMode::FlatFraction;
  double d_hat_value = 0.5;
  int episode_length = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Allocates persons to variants by largest remainder (ties to the earlier
/// variant) and draws each person's profile.
OfficeConfig build_office(const OfficeSpec& spec);

/// Draws one synthetic baseline profile of `hours` entries.
BaselineProfile synthetic_profile(Rng& rng, std::size_t hours, double lo, double hi);

/// All-zero-signal office cost; anchors the flat-fraction d̂ mode.
double flat_signal_cost(const OfficeConfig& office);

/// Frozen curtail-and-shift office used for every evaluation run.
OfficeSpec evaluation_office_spec();

std::string office_spec_to_json(const OfficeSpec& spec);
OfficeSpec office_spec_from_json(const std::string& text);
OfficeSpec load_office_spec(const std::filesystem::path& path);
void save_office_spec(const OfficeSpec& spec, const std::filesystem::path& path);

}  // namespace officedr

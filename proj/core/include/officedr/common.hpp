#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace officedr {

/// Number of work hours in one simulated office day.
inline constexpr std::size_t kHours = 10;

/// One value per work hour. Environment-level code requires exactly kHours
/// entries; the response functions accept any length so that toy offices
/// with shorter days can be enumerated exhaustively.
using Hourly = std::vector<double>;

// Error taxonomy. The CLI maps ConfigError to exit code 2 and
// MissingPrerequisite to exit code 3.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingPrerequisite : public std::runtime_error {
 public:
  MissingPrerequisite(const std::string& what, std::string producer)
      : std::runtime_error(what), producer_(std::move(producer)) {}
  /// CLI subcommand that produces the missing artifact.
  const std::string& producer() const noexcept { return producer_; }

 private:
  std::string producer_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeded random stream. Both draws are stateless transforms of the engine
/// output, so serializing the engine captures the full stream state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller, one engine pair per draw.
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::uint64_t next_u64() { return engine_(); }

  /// Text form of the engine state (std::mt19937_64 stream format).
  std::string serialize() const;
  static Rng deserialize(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent child seed; used to give trials, variants and
/// workers disjoint streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::span<const std::byte> bytes);
std::uint64_t fnv1a64(const std::string& text);

}  // namespace officedr

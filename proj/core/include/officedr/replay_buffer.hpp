#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "officedr/common.hpp"

namespace officedr {

enum class SourceTag : std::uint8_t { Offline = 0, Online = 1, Planning = 2 };

const char* to_string(SourceTag tag);

struct Transition {
  std::vector<double> obs;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
  SourceTag source = SourceTag::Online;
};

/// Column-per-sample view of a sampled minibatch.
struct Batch {
  Eigen::MatrixXd obs;       // obs_dim × n
  Eigen::MatrixXd action;    // action_dim × n
  Eigen::VectorXd reward;    // n
  Eigen::MatrixXd next_obs;  // obs_dim × n
  Eigen::VectorXd done;      // n, 1.0 when terminal

  Eigen::Index size() const { return reward.size(); }
};

/// Fixed-capacity FIFO ring of transitions stored in flat arrays. Source
/// tags are metadata only; sampling ignores them.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim);

  void push(const Transition& t);

  /// Uniform sampling with replacement over the current contents.
  Batch sample(std::size_t n, Rng& rng) const;

  Transition at(std::size_t i) const;  // i-th oldest record

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t count(SourceTag tag) const { return counts_[static_cast<std::size_t>(tag)]; }
  /// Fraction of the current contents carrying `tag`.
  double fraction(SourceTag tag) const;

  friend bool operator==(const ReplayBuffer& a, const ReplayBuffer& b);
  friend void save_replay_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path);
  friend ReplayBuffer load_replay_buffer(const std::filesystem::path& path);

 private:
  std::size_t slot_of(std::size_t i) const;

  std::size_t capacity_;
  std::size_t obs_dim_;
  std::size_t action_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next write slot
  std::vector<double> obs_, action_, reward_, next_obs_;
  std::vector<std::uint8_t> done_, tag_;
  std::array<std::size_t, 3> counts_{};
};

void save_replay_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path);
ReplayBuffer load_replay_buffer(const std::filesystem::path& path);

}  // namespace officedr

#include "officedr/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "officedr/binary_io.hpp"

namespace officedr {

const char* to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::Offline: return "offline";
    case SourceTag::Online: return "online";
    case SourceTag::Planning: return "planning";
  }
  return "unknown";
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (capacity == 0) throw ValidationError("replay capacity must be positive");
}

std::size_t ReplayBuffer::slot_of(std::size_t i) const {
  // Oldest record sits at head_ once the ring has wrapped.
  return size_ < capacity_ ? i : (head_ + i) % capacity_;
}

void ReplayBuffer::push(const Transition& t) {
  if (t.obs.size() != obs_dim_ || t.next_obs.size() != obs_dim_) {
    throw ValidationError("transition observation dimension mismatch");
  }
  if (t.action.size() != action_dim_) throw ValidationError("transition action dimension mismatch");
  if (!std::isfinite(t.reward)) throw ValidationError("transition reward is not finite");

  const std::size_t slot = head_;
  if (size_ < capacity_) {
    obs_.insert(obs_.end(), t.obs.begin(), t.obs.end());
    action_.insert(action_.end(), t.action.begin(), t.action.end());
    next_obs_.insert(next_obs_.end(), t.next_obs.begin(), t.next_obs.end());
    reward_.push_back(t.reward);
    done_.push_back(t.done ? 1 : 0);
    tag_.push_back(static_cast<std::uint8_t>(t.source));
    ++size_;
  } else {
    --counts_[tag_[slot]];
    std::copy(t.obs.begin(), t.obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(slot * obs_dim_));
    std::copy(t.action.begin(), t.action.end(), action_.begin() + static_cast<std::ptrdiff_t>(slot * action_dim_));
    std::copy(t.next_obs.begin(), t.next_obs.end(), next_obs_.begin() + static_cast<std::ptrdiff_t>(slot * obs_dim_));
    reward_[slot] = t.reward;
    done_[slot] = t.done ? 1 : 0;
    tag_[slot] = static_cast<std::uint8_t>(t.source);
  }
  ++counts_[static_cast<std::size_t>(t.source)];
  head_ = (head_ + 1) % capacity_;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw ValidationError("cannot sample from an empty replay buffer");
  Batch b;
  const auto cols = static_cast<Eigen::Index>(n);
  b.obs.resize(static_cast<Eigen::Index>(obs_dim_), cols);
  b.next_obs.resize(static_cast<Eigen::Index>(obs_dim_), cols);
  b.action.resize(static_cast<Eigen::Index>(action_dim_), cols);
  b.reward.resize(cols);
  b.done.resize(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const std::size_t s = rng.index(size_);
    std::copy_n(obs_.data() + s * obs_dim_, obs_dim_, b.obs.col(c).data());
    std::copy_n(next_obs_.data() + s * obs_dim_, obs_dim_, b.next_obs.col(c).data());
    std::copy_n(action_.data() + s * action_dim_, action_dim_, b.action.col(c).data());
    b.reward[c] = reward_[s];
    b.done[c] = done_[s] ? 1.0 : 0.0;
  }
  return b;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  const std::size_t s = slot_of(i);
  Transition t;
  t.obs.assign(obs_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_),
               obs_.begin() + static_cast<std::ptrdiff_t>((s + 1) * obs_dim_));
  t.next_obs.assign(next_obs_.begin() + static_cast<std::ptrdiff_t>(s * obs_dim_),
                    next_obs_.begin() + static_cast<std::ptrdiff_t>((s + 1) * obs_dim_));
  t.action.assign(action_.begin() + static_cast<std::ptrdiff_t>(s * action_dim_),
                  action_.begin() + static_cast<std::ptrdiff_t>((s + 1) * action_dim_));
  t.reward = reward_[s];
  t.done = done_[s] != 0;
  t.source = static_cast<SourceTag>(tag_[s]);
  return t;
}

double ReplayBuffer::fraction(SourceTag tag) const {
  return size_ == 0 ? 0.0 : static_cast<double>(count(tag)) / static_cast<double>(size_);
}

bool operator==(const ReplayBuffer& a, const ReplayBuffer& b) {
  return a.capacity_ == b.capacity_ && a.obs_dim_ == b.obs_dim_ && a.action_dim_ == b.action_dim_ &&
         a.size_ == b.size_ && a.head_ == b.head_ && a.obs_ == b.obs_ && a.action_ == b.action_ &&
         a.reward_ == b.reward_ && a.next_obs_ == b.next_obs_ && a.done_ == b.done_ && a.tag_ == b.tag_ &&
         a.counts_ == b.counts_;
}

void save_replay_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  // Raw ring layout, so a reloaded buffer samples the same slots.
  bin::write_magic(out, "ODRB");
  bin::write<std::uint32_t>(out, 1);
  bin::write<std::uint64_t>(out, buffer.capacity_);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(buffer.obs_dim_));
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(buffer.action_dim_));
  bin::write<std::uint64_t>(out, buffer.size_);
  bin::write<std::uint64_t>(out, buffer.head_);
  bin::write_doubles(out, buffer.obs_);
  bin::write_doubles(out, buffer.action_);
  bin::write_doubles(out, buffer.reward_);
  bin::write_doubles(out, buffer.next_obs_);
  out.write(reinterpret_cast<const char*>(buffer.done_.data()), static_cast<std::streamsize>(buffer.done_.size()));
  out.write(reinterpret_cast<const char*>(buffer.tag_.data()), static_cast<std::streamsize>(buffer.tag_.size()));
  if (!out) throw IoError("write failed");
}

ReplayBuffer load_replay_buffer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  bin::expect_magic(in, "ODRB", "replay buffer");
  if (bin::read<std::uint32_t>(in) != 1) throw IoError("unsupported replay buffer version");
  const auto capacity = bin::read<std::uint64_t>(in);
  const auto obs_dim = bin::read<std::uint32_t>(in);
  const auto action_dim = bin::read<std::uint32_t>(in);
  ReplayBuffer b(capacity, obs_dim, action_dim);
  b.size_ = bin::read<std::uint64_t>(in);
  b.head_ = bin::read<std::uint64_t>(in);
  if (b.size_ > capacity || b.head_ >= capacity) throw IoError("corrupt replay buffer header");
  b.obs_.resize(b.size_ * obs_dim);
  b.action_.resize(b.size_ * action_dim);
  b.reward_.resize(b.size_);
  b.next_obs_.resize(b.size_ * obs_dim);
  b.done_.resize(b.size_);
  b.tag_.resize(b.size_);
  bin::read_doubles(in, b.obs_);
  bin::read_doubles(in, b.action_);
  bin::read_doubles(in, b.reward_);
  bin::read_doubles(in, b.next_obs_);
  in.read(reinterpret_cast<char*>(b.done_.data()), static_cast<std::streamsize>(b.size_));
  in.read(reinterpret_cast<char*>(b.tag_.data()), static_cast<std::streamsize>(b.size_));
  if (!in) throw IoError("unexpected end of file");
  for (auto tag : b.tag_) {
    if (tag > 2) throw IoError("unknown source tag");
    ++b.counts_[tag];
  }
  return b;
}

}  // namespace officedr

#include "officedr/planning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "officedr/binary_io.hpp"

namespace officedr {

namespace {

constexpr std::uint32_t kPlanningVersion = 1;

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[rng.index(k)]);
}

std::vector<const PlanningSample*> gather(const PlanningDataset& data, std::span<const std::size_t> idx) {
  std::vector<const PlanningSample*> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(&data.samples.at(i));
  return out;
}

PriceSignal uniform_action(Rng& rng) {
  PriceSignal a;
  a.points.resize(kHours);
  for (auto& p : a.points) p = rng.uniform(PriceSignal::kMinPoints, PriceSignal::kMaxPoints);
  return a;
}

std::vector<double> observation_from_demand(const Hourly& demand) {
  EnvState s;
  s.prev_aggregate_demand = demand;
  return encode_observation(s, OfficeConfig{});
}

}  // namespace

PlanningDataset collect_planning_data(const OfficeConfig& office, std::size_t n, std::uint64_t seed) {
  OfficeEnv env(office, seed);
  Rng rng(derive_seed(seed, 1));
  PlanningDataset data;
  data.samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    PlanningSample s;
    s.obs = env.observation();
    const PriceSignal a = uniform_action(rng);
    const StepResult r = env.step(a);
    s.action = a.points;
    s.demand = r.demand;
    data.samples.push_back(std::move(s));
  }
  return data;
}

void save_planning_data(const PlanningDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write planning data " + path.string());
  bin::write_magic(out, "ODPD");
  bin::write<std::uint32_t>(out, kPlanningVersion);
  bin::write<std::uint64_t>(out, data.size());
  const std::uint32_t obs_dim = data.samples.empty() ? kObservationDim : data.samples[0].obs.size();
  const std::uint32_t act_dim = data.samples.empty() ? kHours : data.samples[0].action.size();
  bin::write<std::uint32_t>(out, obs_dim);
  bin::write<std::uint32_t>(out, act_dim);
  for (const auto& s : data.samples) {
    if (s.obs.size() != obs_dim || s.action.size() != act_dim || s.demand.size() != act_dim) {
      throw ValidationError("planning sample dimension mismatch");
    }
    bin::write_doubles(out, s.obs);
    bin::write_doubles(out, s.action);
    bin::write_doubles(out, s.demand);
  }
  if (!out) throw IoError("failed writing planning data");
}

PlanningDataset load_planning_data(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingPrerequisite("planning data not found: " + path.string(), "collect-planning");
  bin::expect_magic(in, "ODPD", "planning data");
  if (bin::read<std::uint32_t>(in) != kPlanningVersion) throw IoError("unsupported planning data version");
  const auto n = bin::read<std::uint64_t>(in);
  const auto obs_dim = bin::read<std::uint32_t>(in);
  const auto act_dim = bin::read<std::uint32_t>(in);
  if (obs_dim == 0 || obs_dim > 4096 || act_dim == 0 || act_dim > 4096) throw IoError("implausible dimensions");
  PlanningDataset data;
  for (std::uint64_t k = 0; k < n; ++k) {
    PlanningSample s;
    s.obs.resize(obs_dim);
    s.action.resize(act_dim);
    s.demand.resize(act_dim);
    bin::read_doubles(in, s.obs);
    bin::read_doubles(in, s.action);
    bin::read_doubles(in, s.demand);
    data.samples.push_back(std::move(s));
  }
  return data;
}

Eigen::MatrixXd PlanningModel::encode_inputs(const std::vector<const PlanningSample*>& samples) const {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(net.input_dim(), n);
  const double center = 0.5 * (action_low + action_high);
  const double half = 0.5 * (action_high - action_low);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& s = *samples[static_cast<std::size_t>(c)];
    Eigen::Index r = 0;
    for (double o : s.obs) x(r++, c) = o;
    for (double a : s.action) x(r++, c) = (a - center) / half;
  }
  return x;
}

Eigen::MatrixXd PlanningModel::encode_targets(const std::vector<const PlanningSample*>& samples) const {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd y(target_mean.size(), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& d = samples[static_cast<std::size_t>(c)]->demand;
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      y(r, c) = (d[static_cast<std::size_t>(r)] - target_mean(r)) / target_std(r);
    }
  }
  return y;
}

Hourly PlanningModel::predict(std::span<const double> obs, std::span<const double> action) const {
  PlanningSample s;
  s.obs.assign(obs.begin(), obs.end());
  s.action.assign(action.begin(), action.end());
  if (static_cast<int>(s.obs.size() + s.action.size()) != net.input_dim()) {
    throw ValidationError("planning model input dimension mismatch");
  }
  const Eigen::MatrixXd y = net.forward(encode_inputs({&s}));
  Hourly d(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    d[static_cast<std::size_t>(r)] = std::max(kPredictionFloor, y(r, 0) * target_std(r) + target_mean(r));
  }
  return d;
}

void save_planning_model(const PlanningModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write planning model " + path.string());
  bin::write_magic(out, "ODPM");
  bin::write<std::uint32_t>(out, kPlanningVersion);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(m.target_mean.size()));
  bin::write_doubles(out, {m.target_mean.data(), static_cast<std::size_t>(m.target_mean.size())});
  bin::write_doubles(out, {m.target_std.data(), static_cast<std::size_t>(m.target_std.size())});
  bin::write<double>(out, m.action_low);
  bin::write<double>(out, m.action_high);
  bin::write<double>(out, m.best_loss);
  bin::write<std::int32_t>(out, m.best_epoch);
  bin::write<double>(out, m.first_epoch_loss);
  write_net(out, m.net);
  if (!out) throw IoError("failed writing planning model");
}

PlanningModel load_planning_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingPrerequisite("planning model not found: " + path.string(), "train-planning");
  bin::expect_magic(in, "ODPM", "planning model");
  if (bin::read<std::uint32_t>(in) != kPlanningVersion) throw IoError("unsupported planning model version");
  const auto out_dim = bin::read<std::uint32_t>(in);
  if (out_dim == 0 || out_dim > 4096) throw IoError("implausible planning model output dimension");
  PlanningModel m;
  m.target_mean.resize(out_dim);
  m.target_std.resize(out_dim);
  bin::read_doubles(in, {m.target_mean.data(), out_dim});
  bin::read_doubles(in, {m.target_std.data(), out_dim});
  m.action_low = bin::read<double>(in);
  m.action_high = bin::read<double>(in);
  m.best_loss = bin::read<double>(in);
  m.best_epoch = bin::read<std::int32_t>(in);
  m.first_epoch_loss = bin::read<double>(in);
  m.net = read_net(in);
  if (m.net.output_dim() != static_cast<int>(out_dim)) throw IoError("planning model metadata does not match net");
  return m;
}

double planning_mse(const PlanningModel& model, const PlanningDataset& data,
                    const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw ValidationError("planning_mse needs at least one sample");
  const auto batch = gather(data, indices);
  return MeanSquaredError().value(model.net.forward(model.encode_inputs(batch)), model.encode_targets(batch));
}

PlanningTrainResult train_planning_model(const PlanningDataset& data, const PlanningTrainOptions& opt) {
  if (data.size() <= opt.holdout) {
    throw ConfigError("planning data has " + std::to_string(data.size()) + " samples; need more than the holdout of " +
                      std::to_string(opt.holdout));
  }
  if (opt.epochs < 1 || opt.batch_size == 0 || opt.holdout == 0) {
    throw ConfigError("planning training needs epochs >= 1, batch_size >= 1 and holdout >= 1");
  }
  Rng rng(opt.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);

  PlanningTrainResult result;
  result.holdout_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(opt.holdout));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(opt.holdout), order.end());

  const auto& first = data.samples.front();
  const int in_dim = static_cast<int>(first.obs.size() + first.action.size());
  const int out_dim = static_cast<int>(first.demand.size());

  PlanningModel model;
  model.net = DenseNet::mlp(in_dim, opt.hidden, out_dim, derive_seed(opt.seed, 1));
  model.target_mean = Eigen::VectorXd::Zero(out_dim);
  model.target_std = Eigen::VectorXd::Zero(out_dim);
  for (auto i : train) {
    for (int r = 0; r < out_dim; ++r) model.target_mean(r) += data.samples[i].demand[static_cast<std::size_t>(r)];
  }
  model.target_mean /= static_cast<double>(train.size());
  for (auto i : train) {
    for (int r = 0; r < out_dim; ++r) {
      const double e = data.samples[i].demand[static_cast<std::size_t>(r)] - model.target_mean(r);
      model.target_std(r) += e * e;
    }
  }
  for (int r = 0; r < out_dim; ++r) {
    const double sd = std::sqrt(model.target_std(r) / static_cast<double>(train.size()));
    model.target_std(r) = sd > 1e-12 ? sd : 1.0;
  }

  const auto holdout = gather(data, result.holdout_indices);
  const Eigen::MatrixXd hx = model.encode_inputs(holdout);
  const Eigen::MatrixXd hy = model.encode_targets(holdout);

  AdamConfig ac;
  ac.lr = opt.lr;
  ac.weight_decay = opt.l2;
  AdamState adam = AdamState::for_net(model.net, ac);
  const MeanSquaredError mse;

  DenseNet best = model.net;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    shuffle(train, rng);
    for (std::size_t start = 0; start < train.size(); start += opt.batch_size) {
      const std::size_t len = std::min(opt.batch_size, train.size() - start);
      const auto batch = gather(data, std::span<const std::size_t>(train).subspan(start, len));
      const auto lg = net_gradients(model.net, mse, model.encode_inputs(batch), model.encode_targets(batch));
      adam_step(model.net, lg.grads, adam);
    }
    const double loss = mse.value(model.net.forward(hx), hy);
    result.holdout_loss.push_back(loss);
    if (epoch == 1) model.first_epoch_loss = loss;
    if (loss < best_loss) {
      best_loss = loss;
      best_epoch = epoch;
      best = model.net;
    }
  }
  model.net = std::move(best);
  model.best_loss = best_loss;
  model.best_epoch = best_epoch;
  result.model = std::move(model);
  return result;
}

PlanningStepResult planning_step(const PlanningModel& model, std::span<const double> obs, const PriceSignal& action,
                                 const RewardParams& params) {
  action.validate(params.grid.prices.size());
  PlanningStepResult r;
  r.demand = model.predict(obs, action.points);
  r.reward = compute_reward(r.demand, params);
  r.next_obs = observation_from_demand(r.demand);
  return r;
}

double planning_reward_gap(const PlanningModel& model, const PlanningDataset& data,
                           const std::vector<std::size_t>& indices, const RewardParams& params) {
  if (indices.empty()) throw ValidationError("planning_reward_gap needs at least one sample");
  double total = 0.0;
  for (auto i : indices) {
    const auto& s = data.samples.at(i);
    const double predicted = planning_step(model, s.obs, PriceSignal{s.action}, params).reward;
    total += std::abs(predicted - compute_reward(s.demand, params));
  }
  return total / static_cast<double>(indices.size());
}

double MixSchedule::value() const { return m0 * std::pow(beta, static_cast<double>(i)); }

std::uint64_t MixSchedule::planning_trajectories() const {
  const double v = value();
  return v > 0.0 ? static_cast<std::uint64_t>(std::floor(v)) : 0;
}

std::vector<DaggerIterationStats> dagger_train(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env,
                                               const PlanningModel& model, MixSchedule& schedule,
                                               const DaggerOptions& opt, const DaggerHook& hook) {
  if (opt.horizon < 1 || opt.updates_per_step < 0) throw ConfigError("dagger horizon must be >= 1");
  const RewardParams params = env.office().reward_params();
  std::vector<DaggerIterationStats> stats;
  stats.reserve(opt.iterations);
  for (std::uint64_t it = 1; it <= opt.iterations; ++it) {
    DaggerIterationStats s;
    s.iteration = it;
    s.exponent = schedule.i;
    s.mix = schedule.value();
    s.planning_trajectories = schedule.planning_trajectories();

    const std::vector<double> start = env.observation();
    for (std::uint64_t j = 0; j < s.planning_trajectories; ++j) {
      std::vector<double> obs = start;
      for (int t = 0; t < opt.horizon; ++t) {
        const PriceSignal a = sample_action(agent.actor, obs, agent.rng, false);
        PlanningStepResult p = planning_step(model, obs, a, params);
        Transition tr{obs, a.points, p.reward, p.next_obs, t + 1 == opt.horizon, SourceTag::Planning};
        buffer.push(tr);
        obs = std::move(p.next_obs);
        ++s.planning_steps;
      }
    }

    double cost = 0.0;
    for (int t = 0; t < opt.horizon; ++t) {
      Transition tr;
      tr.obs = env.observation();
      const PriceSignal a = sample_action(agent.actor, tr.obs, agent.rng, false);
      const StepResult r = env.step(a);
      tr.action = a.points;
      tr.reward = r.reward;
      tr.next_obs = r.next_observation;
      tr.done = r.done;
      tr.source = SourceTag::Online;
      buffer.push(tr);
      ++agent.env_steps;
      ++s.real_steps;
      cost += r.daily_cost_usd;
    }
    s.mean_real_daily_cost_usd = cost / opt.horizon;

    const std::uint64_t updates = (s.planning_steps + s.real_steps) * static_cast<std::uint64_t>(opt.updates_per_step);
    for (std::uint64_t u = 0; u < updates; ++u) sac_update(agent, buffer);

    s.buffer_planning = buffer.count(SourceTag::Planning);
    s.buffer_online = buffer.count(SourceTag::Online);
    s.buffer_offline = buffer.count(SourceTag::Offline);
    s.env_step_count = env.step_count();
    s.agent_env_steps = agent.env_steps;
    schedule.advance();
    if (hook) hook(s, agent);
    stats.push_back(s);
  }
  return stats;
}

TwoStageResult two_stage_train(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env, const TwoStageOptions& opt,
                               const OnlineHook& online_hook, const DaggerHook& dagger_hook) {
  TwoStageResult result;
  result.warmup_data.samples.reserve(opt.warmup_steps);
  for (std::uint64_t k = 0; k < opt.warmup_steps; ++k) {
    Transition tr;
    tr.obs = env.observation();
    const PriceSignal a = sample_action(agent.actor, tr.obs, agent.rng, false);
    const StepResult r = env.step(a);
    tr.action = a.points;
    tr.reward = r.reward;
    tr.next_obs = r.next_observation;
    tr.done = r.done;
    tr.source = SourceTag::Online;
    buffer.push(tr);
    ++agent.env_steps;
    result.warmup_data.samples.push_back({tr.obs, tr.action, r.demand});

    OnlineStepRecord rec;
    rec.env_step = agent.env_steps;
    rec.daily_cost_usd = r.daily_cost_usd;
    rec.reward = r.reward;
    for (int u = 0; u < agent.config.updates_per_env_step; ++u) rec.update = sac_update(agent, buffer);
    if (online_hook) online_hook(rec, agent);
  }
  result.model = train_planning_model(result.warmup_data, opt.planning).model;
  MixSchedule schedule{opt.m0, opt.beta, 0};
  result.iterations = dagger_train(agent, buffer, env, result.model, schedule, opt.dagger, dagger_hook);
  return result;
}

}  // namespace officedr

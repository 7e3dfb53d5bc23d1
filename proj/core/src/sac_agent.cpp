#include "officedr/sac_agent.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "officedr/binary_io.hpp"

namespace officedr {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

// log(1 - tanh(u)^2) without cancellation for large |u|.
Eigen::ArrayXXd log_one_minus_tanh_sq(const Eigen::ArrayXXd& u) {
  const Eigen::ArrayXXd neg2u = -2.0 * u;
  // softplus(x) = max(x, 0) + log1p(exp(-|x|))
  const Eigen::ArrayXXd softplus = neg2u.max(0.0) + (-neg2u.abs()).exp().log1p();
  return 2.0 * (std::numbers::ln2 - u - softplus);
}

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (buffer_capacity < 1) throw ConfigError("buffer_capacity must be positive");
  if (updates_per_env_step < 0) throw ConfigError("updates_per_env_step must be non-negative");
  if (obs_dim < 1 || action_dim < 1) throw ConfigError("observation and action dims must be positive");
  if (!(action_low < action_high)) throw ConfigError("action bounds are empty");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be positive");
  }
}

Eigen::VectorXd squashed_gaussian_log_prob(const Eigen::MatrixXd& pre_tanh, const Eigen::MatrixXd& mean,
                                           const Eigen::MatrixXd& log_std, double half_range) {
  const Eigen::ArrayXXd z = (pre_tanh - mean).array() / log_std.array().exp();
  const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd per_dim =
      -0.5 * z.square() - log_std.array() - log_sqrt_2pi - log_one_minus_tanh_sq(pre_tanh.array()) -
      std::log(half_range);
  return per_dim.colwise().sum().transpose();
}

PolicySample Actor::sample(const Eigen::MatrixXd& obs, Rng* rng, DenseNet::Trace* trace) const {
  const Eigen::MatrixXd head = trace ? net.forward(obs, *trace) : net.forward(obs);
  const Eigen::Index dim = head.rows() / 2;
  const Eigen::Index n = head.cols();

  PolicySample s;
  s.mean = head.topRows(dim);
  const Eigen::MatrixXd raw_log_std = head.bottomRows(dim);
  s.log_std = raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.log_std_clamped = (raw_log_std.array() < kLogStdMin) || (raw_log_std.array() > kLogStdMax);
  s.std = s.log_std.array().exp();

  s.noise = Eigen::MatrixXd::Zero(dim, n);
  if (rng != nullptr) {
    // Column-major fill: sample by sample, dimension by dimension.
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) s.noise(r, c) = rng->normal();
    }
  }
  s.pre_tanh = s.mean + (s.std.array() * s.noise.array()).matrix();
  s.squashed = s.pre_tanh.array().tanh();
  s.action = (center() + half_range() * s.squashed.array()).cwiseMax(action_low).cwiseMin(action_high);
  s.log_prob = squashed_gaussian_log_prob(s.pre_tanh, s.mean, s.log_std, half_range());
  return s;
}

SacAgent SacAgent::create(const SacConfig& config) {
  config.validate();
  SacAgent a;
  a.config = config;
  a.rng = Rng(derive_seed(config.seed, 0));
  a.actor.net = DenseNet::mlp(config.obs_dim, config.hidden, 2 * config.action_dim, derive_seed(config.seed, 1));
  a.actor.action_low = config.action_low;
  a.actor.action_high = config.action_high;
  const int critic_in = config.obs_dim + config.action_dim;
  a.critics.q1 = DenseNet::mlp(critic_in, config.hidden, 1, derive_seed(config.seed, 2));
  a.critics.q2 = DenseNet::mlp(critic_in, config.hidden, 1, derive_seed(config.seed, 3));
  a.critics.target1 = a.critics.q1;
  a.critics.target2 = a.critics.q2;
  const AdamConfig adam{config.lr, 0.9, 0.999, 1e-8, 0.0};
  a.actor_adam = AdamState::for_net(a.actor.net, adam);
  a.critic1_adam = AdamState::for_net(a.critics.q1, adam);
  a.critic2_adam = AdamState::for_net(a.critics.q2, adam);
  return a;
}

Eigen::MatrixXd SacAgent::normalize_actions(const Eigen::MatrixXd& actions) const {
  return (actions.array() - actor.center()) / actor.half_range();
}

PriceSignal sample_action(const Actor& actor, std::span<const double> obs, Rng& rng, bool deterministic) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(obs.size()), 1);
  for (std::size_t i = 0; i < obs.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = obs[i];
  const PolicySample s = actor.sample(x, deterministic ? nullptr : &rng);
  PriceSignal p;
  p.points.assign(s.action.data(), s.action.data() + s.action.size());
  return p;
}

Eigen::VectorXd critic_targets(const Batch& batch, const CriticPair& critics, const Actor& actor, double gamma,
                               double alpha, Rng& rng) {
  const PolicySample next = actor.sample(batch.next_obs, &rng);
  const Eigen::MatrixXd input = stack_rows(batch.next_obs, next.squashed);
  const Eigen::RowVectorXd q1 = critics.target1.forward(input);
  const Eigen::RowVectorXd q2 = critics.target2.forward(input);
  const Eigen::VectorXd soft_value = q1.cwiseMin(q2).transpose() - alpha * next.log_prob;
  const Eigen::VectorXd not_done = (1.0 - batch.done.array()).matrix();
  return batch.reward + gamma * not_done.cwiseProduct(soft_value);
}

UpdateReport sac_update(SacAgent& agent, const ReplayBuffer& buffer) {
  UpdateReport report;
  const auto batch_size = static_cast<std::size_t>(agent.config.batch_size);
  if (buffer.size() < batch_size) return report;  // warming up

  const SacConfig& cfg = agent.config;
  const Batch batch = buffer.sample(batch_size, agent.rng);
  const auto n = static_cast<double>(batch.size());

  // Critics regress on the soft Bellman target.
  const Eigen::VectorXd y = critic_targets(batch, agent.critics, agent.actor, cfg.gamma, cfg.alpha, agent.rng);
  const Eigen::MatrixXd critic_in = stack_rows(batch.obs, agent.normalize_actions(batch.action));
  const Eigen::MatrixXd y_row = y.transpose();
  const MeanSquaredError mse;
  auto c1 = net_gradients(agent.critics.q1, mse, critic_in, y_row);
  auto c2 = net_gradients(agent.critics.q2, mse, critic_in, y_row);
  adam_step(agent.critics.q1, c1.grads, agent.critic1_adam);
  adam_step(agent.critics.q2, c2.grads, agent.critic2_adam);
  report.critic1_loss = c1.loss;
  report.critic2_loss = c2.loss;

  // Actor minimizes mean(α·log π(a|s) - min Q(s, a)) with a reparameterized.
  DenseNet::Trace actor_trace;
  const PolicySample pi = agent.actor.sample(batch.obs, &agent.rng, &actor_trace);
  const Eigen::MatrixXd q_in = stack_rows(batch.obs, pi.squashed);
  DenseNet::Trace t1, t2;
  const Eigen::RowVectorXd q1 = agent.critics.q1.forward(q_in, t1);
  const Eigen::RowVectorXd q2 = agent.critics.q2.forward(q_in, t2);
  const Eigen::RowVectorXd pick1 = (q1.array() <= q2.array()).cast<double>();
  const Eigen::RowVectorXd q_min = q1.cwiseMin(q2);
  const Eigen::MatrixXd dq_dinput = agent.critics.q1.backward(t1, pick1).input +
                                    agent.critics.q2.backward(t2, (1.0 - pick1.array()).matrix()).input;
  const Eigen::Index dim = pi.mean.rows();
  const Eigen::ArrayXXd dq_dy = dq_dinput.bottomRows(dim).array();

  const Eigen::ArrayXXd y_sq = pi.squashed.array();
  const Eigen::ArrayXXd dy_du = 1.0 - y_sq.square();
  const Eigen::ArrayXXd sigma_xi = pi.std.array() * pi.noise.array();
  // d log π / d mean = 2y ; d log π / d log σ = -1 + 2y·σξ
  const Eigen::ArrayXXd dlogp_dmean = 2.0 * y_sq;
  const Eigen::ArrayXXd dlogp_dlogstd = -1.0 + 2.0 * y_sq * sigma_xi;
  const Eigen::ArrayXXd dq_du = dq_dy * dy_du;

  Eigen::MatrixXd head_grad(2 * dim, batch.size());
  head_grad.topRows(dim) = ((cfg.alpha * dlogp_dmean - dq_du) / n).matrix();
  Eigen::ArrayXXd logstd_grad = (cfg.alpha * dlogp_dlogstd - dq_du * sigma_xi) / n;
  logstd_grad = pi.log_std_clamped.select(0.0, logstd_grad);
  head_grad.bottomRows(dim) = logstd_grad.matrix();

  const double actor_loss = (cfg.alpha * pi.log_prob.transpose() - q_min).mean();
  if (!std::isfinite(actor_loss)) throw DivergenceError("actor loss is not finite; training diverged");
  const Gradients actor_grads = agent.actor.net.backward(actor_trace, head_grad);
  adam_step(agent.actor.net, actor_grads, agent.actor_adam);
  report.actor_loss = actor_loss;
  report.entropy = -pi.log_prob.mean();

  polyak_update(agent.critics.target1, agent.critics.q1, cfg.tau);
  polyak_update(agent.critics.target2, agent.critics.q2, cfg.tau);
  ++agent.update_steps;
  report.status = UpdateReport::Status::Updated;
  return report;
}

ReplayBuffer make_replay_buffer(const SacConfig& config) {
  return ReplayBuffer(config.buffer_capacity, static_cast<std::size_t>(config.obs_dim),
                      static_cast<std::size_t>(config.action_dim));
}

void train_online(SacAgent& agent, ReplayBuffer& buffer, OfficeEnv& env, std::uint64_t total_env_steps,
                  const OnlineHook& hook) {
  for (std::uint64_t k = 0; k < total_env_steps; ++k) {
    Transition t;
    t.obs = env.observation();
    const PriceSignal action = sample_action(agent.actor, t.obs, agent.rng, false);
    const StepResult r = env.step(action);
    t.action = action.points;
    t.reward = r.reward;
    t.next_obs = r.next_observation;
    t.done = r.done;
    t.source = SourceTag::Online;
    buffer.push(t);
    ++agent.env_steps;

    OnlineStepRecord rec;
    rec.env_step = agent.env_steps;
    rec.daily_cost_usd = r.daily_cost_usd;
    rec.reward = r.reward;
    for (int u = 0; u < agent.config.updates_per_env_step; ++u) rec.update = sac_update(agent, buffer);
    if (hook) hook(rec, agent);
  }
}

void checkpoint_save(const SacAgent& agent, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  const SacConfig& c = agent.config;
  bin::write_magic(out, "ODCK");
  bin::write<std::uint32_t>(out, kCheckpointVersion);
  bin::write<double>(out, c.gamma);
  bin::write<double>(out, c.alpha);
  bin::write<double>(out, c.tau);
  bin::write<double>(out, c.lr);
  bin::write<std::int32_t>(out, c.batch_size);
  bin::write<std::uint64_t>(out, c.buffer_capacity);
  bin::write<std::int32_t>(out, c.updates_per_env_step);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(c.hidden.size()));
  for (int h : c.hidden) bin::write<std::int32_t>(out, h);
  bin::write<std::int32_t>(out, c.obs_dim);
  bin::write<std::int32_t>(out, c.action_dim);
  bin::write<double>(out, c.action_low);
  bin::write<double>(out, c.action_high);
  bin::write<std::uint64_t>(out, c.seed);
  bin::write<std::uint64_t>(out, agent.env_steps);
  bin::write<std::uint64_t>(out, agent.update_steps);
  bin::write_string(out, agent.rng.serialize());
  write_net(out, agent.actor.net);
  write_net(out, agent.critics.q1);
  write_net(out, agent.critics.q2);
  write_net(out, agent.critics.target1);
  write_net(out, agent.critics.target2);
  write_adam(out, agent.actor_adam);
  write_adam(out, agent.critic1_adam);
  write_adam(out, agent.critic2_adam);
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

SacAgent checkpoint_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingPrerequisite("checkpoint not found: " + path.string(), "pretrain");
  bin::expect_magic(in, "ODCK", "checkpoint");
  const auto version = bin::read<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  SacAgent a;
  SacConfig& c = a.config;
  c.gamma = bin::read<double>(in);
  c.alpha = bin::read<double>(in);
  c.tau = bin::read<double>(in);
  c.lr = bin::read<double>(in);
  c.batch_size = bin::read<std::int32_t>(in);
  c.buffer_capacity = bin::read<std::uint64_t>(in);
  c.updates_per_env_step = bin::read<std::int32_t>(in);
  const auto layers = bin::read<std::uint32_t>(in);
  if (layers > 64) throw IoError("implausible hidden layer count");
  c.hidden.resize(layers);
  for (auto& h : c.hidden) h = bin::read<std::int32_t>(in);
  c.obs_dim = bin::read<std::int32_t>(in);
  c.action_dim = bin::read<std::int32_t>(in);
  c.action_low = bin::read<double>(in);
  c.action_high = bin::read<double>(in);
  c.seed = bin::read<std::uint64_t>(in);
  c.validate();
  a.env_steps = bin::read<std::uint64_t>(in);
  a.update_steps = bin::read<std::uint64_t>(in);
  a.rng = Rng::deserialize(bin::read_string(in));
  a.actor.net = read_net(in);
  a.actor.action_low = c.action_low;
  a.actor.action_high = c.action_high;
  a.critics.q1 = read_net(in);
  a.critics.q2 = read_net(in);
  a.critics.target1 = read_net(in);
  a.critics.target2 = read_net(in);
  a.actor_adam = read_adam(in);
  a.critic1_adam = read_adam(in);
  a.critic2_adam = read_adam(in);
  return a;
}

}  // namespace officedr

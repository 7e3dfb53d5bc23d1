#include "officedr/offline_pretrain.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "officedr/office_config.hpp"

namespace officedr {

using nlohmann::json;

void OfflineDatasetSpec::validate() const {
  for (auto c : counts) {
    if (c == 0) throw ConfigError("offline dataset counts must be positive");
  }
  if (!(multiplier_range[0] > 0.0 && multiplier_range[0] <= multiplier_range[1])) {
    throw ConfigError("multiplier range must satisfy 0 < lo <= hi");
  }
  if (!(threshold_range[0] >= PriceSignal::kMinPoints && threshold_range[0] <= threshold_range[1] &&
        threshold_range[1] <= PriceSignal::kMaxPoints)) {
    throw ConfigError("threshold range must lie inside [0, 10] with lo <= hi");
  }
  if (!(baseline_range[0] > 0.0 && baseline_range[0] <= baseline_range[1])) {
    throw ConfigError("baseline range must satisfy 0 < lo <= hi");
  }
  if (persons_per_office < 1) throw ConfigError("persons_per_office must be at least 1");
  if (episode_length < 1) throw ConfigError("episode_length must be at least 1");
  if (!(lambda >= 0.0) || !(d_hat_fraction >= 0.0)) throw ConfigError("lambda and d_hat_fraction must be >= 0");
}

std::string offline_spec_to_json(const OfflineDatasetSpec& s) {
  json j;
  j["counts"] = {{"linear", s.counts[0]}, {"sinusoidal", s.counts[1]}, {"threshold_exp", s.counts[2]}};
  j["multiplier_range"] = s.multiplier_range;
  j["threshold_range"] = s.threshold_range;
  j["persons_per_office"] = s.persons_per_office;
  j["episode_length"] = s.episode_length;
  j["baseline_range"] = s.baseline_range;
  j["lambda"] = s.lambda;
  j["d_hat_fraction"] = s.d_hat_fraction;
  j["behavior"] = "uniform_random";
  j["seed"] = s.seed;
  return j.dump(2);
}

OfflineDatasetSpec offline_spec_from_json(const std::string& text) {
  OfflineDatasetSpec s;
  try {
    const json j = json::parse(text);
    if (j.contains("counts")) {
      const auto& c = j.at("counts");
      s.counts = {c.value("linear", s.counts[0]), c.value("sinusoidal", s.counts[1]),
                  c.value("threshold_exp", s.counts[2])};
    }
    if (j.contains("multiplier_range")) s.multiplier_range = j.at("multiplier_range").get<std::array<double, 2>>();
    if (j.contains("threshold_range")) s.threshold_range = j.at("threshold_range").get<std::array<double, 2>>();
    s.persons_per_office = j.value("persons_per_office", s.persons_per_office);
    s.episode_length = j.value("episode_length", s.episode_length);
    if (j.contains("baseline_range")) s.baseline_range = j.at("baseline_range").get<std::array<double, 2>>();
    s.lambda = j.value("lambda", s.lambda);
    s.d_hat_fraction = j.value("d_hat_fraction", s.d_hat_fraction);
    if (j.value("behavior", std::string("uniform_random")) != "uniform_random") {
      throw ConfigError("unknown behavior policy");
    }
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid offline dataset spec: ") + e.what());
  }
  s.validate();
  return s;
}

OfflineDatasetSpec load_offline_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read offline dataset spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return offline_spec_from_json(ss.str());
}

OfficeConfig randomized_office(const OfflineDatasetSpec& spec, ResponseKind variant, Rng& rng) {
  if (variant == ResponseKind::CurtailShift) throw ValidationError("offline offices use deterministic-function persons");
  OfficeSpec os;
  os.persons = spec.persons_per_office;
  os.variant_weights = {0.0, 0.0, 0.0, 0.0};
  os.variant_weights[static_cast<std::size_t>(variant)] = 1.0;
  const double m = rng.uniform(spec.multiplier_range[0], spec.multiplier_range[1]);
  os.multiplier_range = {m, m};
  os.threshold = rng.uniform(spec.threshold_range[0], spec.threshold_range[1]);
  os.baseline_range = spec.baseline_range;
  os.lambda = spec.lambda;
  os.d_hat_mode = DHatMode::FlatFraction;
  os.d_hat_value = spec.d_hat_fraction;
  os.episode_length = spec.episode_length;
  os.seed = rng.next_u64();
  return build_office(os);
}

DatasetHeader generate_offline_dataset(const OfflineDatasetSpec& spec, const std::filesystem::path& out) {
  spec.validate();
  const Hourly grid = GridPriceVector::time_of_use().prices;
  DatasetWriter writer(out, kObservationDim, kHours, grid);
  for (std::size_t v = 0; v < 3; ++v) {
    const auto variant = static_cast<ResponseKind>(v);
    Rng rng(derive_seed(spec.seed, v));
    std::uint64_t written = 0;
    while (written < spec.counts[v]) {
      const OfficeConfig office = randomized_office(spec, variant, rng);
      OfficeEnv env(office);
      for (int d = 0; d < office.episode_length && written < spec.counts[v]; ++d) {
        PriceSignal action;
        action.points.resize(kHours);
        for (auto& p : action.points) p = rng.uniform(PriceSignal::kMinPoints, PriceSignal::kMaxPoints);
        DatasetRecord rec;
        rec.transition.obs = env.observation();
        const StepResult r = env.step(action);
        rec.transition.action = action.points;
        rec.transition.reward = r.reward;
        rec.transition.next_obs = r.next_observation;
        rec.transition.done = r.done;
        rec.transition.source = SourceTag::Offline;
        rec.variant = variant;
        rec.demand = r.demand;
        rec.d_hat = office.d_hat;
        rec.lambda = office.lambda;
        writer.write(rec);
        ++written;
      }
    }
  }
  writer.close();
  return writer.header();
}

ReplayBuffer load_offline_buffer(const std::filesystem::path& dataset, const SacConfig& config) {
  DatasetReader reader(dataset);
  const DatasetHeader& h = reader.header();
  if (static_cast<int>(h.obs_dim) != config.obs_dim || static_cast<int>(h.action_dim) != config.action_dim) {
    throw ValidationError("dataset dimensions (" + std::to_string(h.obs_dim) + ", " +
                          std::to_string(h.action_dim) + ") differ from agent (" + std::to_string(config.obs_dim) +
                          ", " + std::to_string(config.action_dim) + ")");
  }
  if (h.total == 0) throw ValidationError("dataset is empty");
  ReplayBuffer buffer(h.total, h.obs_dim, h.action_dim);
  DatasetRecord rec;
  while (reader.next(rec)) {
    rec.transition.source = SourceTag::Offline;
    buffer.push(rec.transition);
  }
  return buffer;
}

std::filesystem::path pretrain_checkpoint_path(const std::filesystem::path& dir, int epoch) {
  std::ostringstream name;
  name << "pretrain_epoch_" << std::setw(4) << std::setfill('0') << epoch << ".ckpt";
  return dir / name.str();
}

PretrainResult pretrain(SacAgent& agent, const ReplayBuffer& buffer, const PretrainOptions& options) {
  if (options.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (buffer.size() == 0) throw ValidationError("pretraining dataset is empty");
  if (static_cast<int>(buffer.obs_dim()) != agent.config.obs_dim ||
      static_cast<int>(buffer.action_dim()) != agent.config.action_dim) {
    throw ValidationError("dataset dimensions differ from the agent's observation/action space");
  }
  PretrainResult result;
  result.updates_per_epoch = buffer.size() / static_cast<std::size_t>(agent.config.batch_size);
  const bool save = options.checkpoint_every > 0 && !options.out_dir.empty();
  if (save) std::filesystem::create_directories(options.out_dir);
  for (int e = 1; e <= options.epochs; ++e) {
    for (std::uint64_t u = 0; u < result.updates_per_epoch; ++u) {
      sac_update(agent, buffer);
      ++result.updates;
    }
    if (save && (e % options.checkpoint_every == 0 || e == options.epochs)) {
      const auto path = pretrain_checkpoint_path(options.out_dir, e);
      checkpoint_save(agent, path);
      result.checkpoints.push_back(path);
    }
  }
  return result;
}

PretrainResult pretrain(SacAgent& agent, const std::filesystem::path& dataset, const PretrainOptions& options) {
  return pretrain(agent, load_offline_buffer(dataset, agent.config), options);
}

std::vector<CostCurve> ablation_series(const std::vector<std::filesystem::path>& checkpoints,
                                       const OfficeConfig& train_office, const OfficeConfig& eval_office,
                                       const AblationOptions& options) {
  std::vector<CostCurve> curves;
  for (const auto& path : checkpoints) {
    SacAgent agent = checkpoint_load(path);
    agent.rng = Rng(derive_seed(options.seed, 1));
    ReplayBuffer buffer = make_replay_buffer(agent.config);
    OfficeEnv env(train_office, options.seed);
    CostCurve curve = train_online_with_eval(agent, buffer, env, eval_office, options.days, options.eval_stride);
    curve.label = path.stem().string();
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace officedr

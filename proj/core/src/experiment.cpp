#include "officedr/experiment.hpp"

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace officedr {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kScenarioNames{
    "online-sac", "offline-online-sac", "dagger-sac", "offline-dagger-sac", "two-stage-dagger", "tou", "flat"};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

double static_cost(const PriceSignal& signal, const OfficeConfig& office) {
  return evaluate_controller(as_controller(StaticController{signal, StaticLabel::TOU}), office,
                             office.episode_length, 0)
      .mean_daily_usd;
}

json plan_json(const ExperimentPlan& p, bool with_out_dir) {
  json j;
  j["scenario"] = std::string(to_string(p.scenario));
  j["trials"] = p.trials;
  j["days"] = p.days;
  j["eval_stride"] = p.eval_stride;
  j["seed_base"] = p.seed_base;
  j["seeds"] = p.seeds;
  j["office"] = json::parse(office_spec_to_json(p.office));
  j["sac"] = json::parse(sac_config_to_json(p.sac));
  j["checkpoint"] = p.checkpoint.generic_string();
  j["planning_model"] = p.planning_model.generic_string();
  j["dagger"] = {{"m0", p.dagger.m0},
                 {"beta", p.dagger.beta},
                 {"horizon", p.dagger.horizon},
                 {"updates_per_step", p.dagger.updates_per_step}};
  j["warmup_steps"] = p.warmup_steps;
  j["planning_epochs"] = p.planning_epochs;
  j["planning_offset_days"] = p.planning_offset_days;
  j["confirmation_window"] = p.confirmation_window;
  if (with_out_dir) j["out_dir"] = p.out_dir.generic_string();
  return j;
}

}  // namespace

std::string_view to_string(Scenario s) { return kScenarioNames.at(static_cast<std::size_t>(s)); }

Scenario scenario_from_string(std::string_view name) {
  for (std::size_t k = 0; k < kScenarioNames.size(); ++k) {
    if (kScenarioNames[k] == name) return static_cast<Scenario>(k);
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

bool is_social_game(Scenario s) { return s != Scenario::Flat; }

bool uses_planning_model(Scenario s) { return s == Scenario::DaggerSac || s == Scenario::OfflineDaggerSac; }

bool uses_pretrained_checkpoint(Scenario s) {
  return s == Scenario::OfflineOnlineSac || s == Scenario::OfflineDaggerSac;
}

std::int64_t to_cents(double usd) {
  if (!std::isfinite(usd)) throw ValidationError("money amount is not finite");
  return static_cast<std::int64_t>(std::llround(usd * 100.0));
}

std::string format_cents(std::int64_t cents) {
  const bool neg = cents < 0;
  const std::uint64_t a = neg ? static_cast<std::uint64_t>(-(cents + 1)) + 1 : static_cast<std::uint64_t>(cents);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%" PRIu64 ".%02" PRIu64, neg ? "-" : "", a / 100, a % 100);
  return buf;
}

AnnualCost annualize(std::int64_t daily_cents, Scenario scenario) {
  AnnualCost c;
  c.energy_cents = daily_cents * kBusinessDays;
  c.overhead_cents = is_social_game(scenario) ? kSocialGameOverheadCents : 0;
  c.total_cents = c.energy_cents + c.overhead_cents;
  return c;
}

std::uint64_t data_cost(const CostCurve& curve, double baseline_daily_usd, std::size_t window) {
  if (window == 0) throw ValidationError("confirmation window must be positive");
  if (curve.day.size() != curve.daily_cost_usd.size()) throw ValidationError("curve columns differ in length");
  std::size_t run = 0;
  for (std::size_t k = 0; k < curve.daily_cost_usd.size(); ++k) {
    run = curve.daily_cost_usd[k] < baseline_daily_usd ? run + 1 : 0;
    if (run == window) return curve.day[k + 1 - window];
  }
  return kInfiniteDataCost;
}

std::vector<double> planning_offset(const std::vector<double>& daily_usd, double tou_daily_usd,
                                    std::uint64_t offset_days) {
  std::vector<double> out(offset_days, tou_daily_usd);
  out.insert(out.end(), daily_usd.begin(), daily_usd.end());
  return out;
}

CostCurve planning_offset(const CostCurve& curve, double tou_daily_usd, std::uint64_t stride,
                          std::uint64_t offset_days) {
  if (stride == 0) throw ValidationError("stride must be positive");
  CostCurve out;
  out.label = curve.label;
  for (std::uint64_t d = 0; d < offset_days; d += stride) {
    out.day.push_back(d);
    out.daily_cost_usd.push_back(tou_daily_usd);
  }
  for (std::size_t k = 0; k < curve.day.size(); ++k) {
    out.day.push_back(curve.day[k] + offset_days);
    out.daily_cost_usd.push_back(curve.daily_cost_usd[k]);
  }
  return out;
}

double carbon_estimate(double energy_kwh, double intensity, double retained) {
  if (!(energy_kwh >= 0.0) || !(intensity >= 0.0) || !(retained >= 0.0 && retained <= 1.0)) {
    throw ValidationError("carbon_estimate needs energy, intensity >= 0 and retained in [0, 1]");
  }
  return std::round(energy_kwh * intensity * (1.0 - retained) * 1e6) / 1e6;
}

std::vector<std::uint64_t> ExperimentPlan::trial_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int k = 0; k < trials; ++k) out.push_back(derive_seed(seed_base, static_cast<std::uint64_t>(k)));
  return out;
}

void ExperimentPlan::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (days < 1) throw ConfigError("days must be at least 1");
  if (eval_stride < 1) throw ConfigError("eval_stride must be at least 1");
  if (!seeds.empty()) {
    if (seeds.size() != static_cast<std::size_t>(trials)) throw ConfigError("seeds must list one seed per trial");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw ConfigError("trial seeds must be distinct");
    }
  }
  if (confirmation_window < 1) throw ConfigError("confirmation_window must be at least 1");
  office.validate();
  sac.validate();
  if (dagger.horizon < 1 || dagger.updates_per_step < 0 || !(dagger.m0 >= 0.0) || !(dagger.beta >= 0.0)) {
    throw ConfigError("dagger settings need horizon >= 1, updates_per_step >= 0, m0 >= 0, beta >= 0");
  }
  if (uses_pretrained_checkpoint(scenario) && checkpoint.empty()) {
    throw MissingPrerequisite("scenario " + std::string(to_string(scenario)) + " needs a pretrained checkpoint",
                              "pretrain");
  }
  if (uses_planning_model(scenario) && planning_model.empty()) {
    throw MissingPrerequisite("scenario " + std::string(to_string(scenario)) + " needs a planning model",
                              "train-planning");
  }
  if (scenario == Scenario::TwoStageDagger) {
    if (warmup_steps > days) throw ConfigError("warmup_steps exceeds days");
    if (warmup_steps <= 256) throw ConfigError("warmup_steps must exceed the 256-sample holdout");
    if (planning_epochs < 1) throw ConfigError("planning_epochs must be at least 1");
  }
}

std::string sac_config_to_json(const SacConfig& c) {
  json j;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["tau"] = c.tau;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["buffer_capacity"] = c.buffer_capacity;
  j["updates_per_env_step"] = c.updates_per_env_step;
  j["hidden"] = c.hidden;
  j["seed"] = c.seed;
  return j.dump(2);
}

SacConfig sac_config_from_json(const std::string& text) {
  SacConfig c;
  try {
    const json j = json::parse(text);
    c.gamma = j.value("gamma", c.gamma);
    c.alpha = j.value("alpha", c.alpha);
    c.tau = j.value("tau", c.tau);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.updates_per_env_step = j.value("updates_per_env_step", c.updates_per_env_step);
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid sac config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string plan_to_json(const ExperimentPlan& plan) { return plan_json(plan, true).dump(2); }

std::uint64_t plan_hash(const ExperimentPlan& plan) { return fnv1a64(plan_json(plan, false).dump()); }

ExperimentPlan plan_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentPlan p;
  try {
    const json j = json::parse(text);
    if (j.contains("scenario")) p.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    p.trials = j.value("trials", p.trials);
    p.days = j.value("days", p.days);
    p.eval_stride = j.value("eval_stride", p.eval_stride);
    p.seed_base = j.value("seed_base", p.seed_base);
    if (j.contains("seeds")) p.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("office")) {
      const auto& o = j.at("office");
      p.office = o.is_string() ? load_office_spec(resolve(base_dir, o.get<std::string>()))
                               : office_spec_from_json(o.dump());
    }
    if (j.contains("sac")) p.sac = sac_config_from_json(j.at("sac").dump());
    p.checkpoint = resolve(base_dir, j.value("checkpoint", std::string()));
    p.planning_model = resolve(base_dir, j.value("planning_model", std::string()));
    if (j.contains("dagger")) {
      const auto& d = j.at("dagger");
      p.dagger.m0 = d.value("m0", p.dagger.m0);
      p.dagger.beta = d.value("beta", p.dagger.beta);
      p.dagger.horizon = d.value("horizon", p.dagger.horizon);
      p.dagger.updates_per_step = d.value("updates_per_step", p.dagger.updates_per_step);
    }
    p.warmup_steps = j.value("warmup_steps", p.warmup_steps);
    p.planning_epochs = j.value("planning_epochs", p.planning_epochs);
    p.planning_offset_days = j.value("planning_offset_days", p.planning_offset_days);
    p.confirmation_window = j.value("confirmation_window", p.confirmation_window);
    if (j.contains("out_dir")) p.out_dir = resolve(base_dir, j.at("out_dir").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment plan: ") + e.what());
  }
  return p;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  return plan_from_json(read_text(path), path.parent_path());
}

AggregateCurve aggregate_curves(const std::vector<CostCurve>& trials) {
  if (trials.empty()) throw ValidationError("nothing to aggregate");
  AggregateCurve agg;
  agg.label = trials.front().label;
  agg.day = trials.front().day;
  const std::size_t n = trials.size();
  for (const auto& t : trials) {
    if (t.day != agg.day) throw ValidationError("trial curves use different evaluation days");
  }
  for (std::size_t k = 0; k < agg.day.size(); ++k) {
    double mean = 0.0;
    for (const auto& t : trials) mean += t.daily_cost_usd[k];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& t : trials) ss += (t.daily_cost_usd[k] - mean) * (t.daily_cost_usd[k] - mean);
    agg.mean.push_back(mean);
    agg.sem.push_back(n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0);
  }
  return agg;
}

std::string metrics_csv_header() {
  return "step,trial,controller,daily_cost_usd,reward,critic_loss,actor_loss,entropy\n";
}

TrialResult run_trial(const ExperimentPlan& plan, std::uint64_t seed, int trial, std::ostream* metrics) {
  const OfficeConfig office = build_office(plan.office);
  TrialResult result;
  result.seed = seed;
  CostCurve& curve = result.curve;
  curve.label = std::string(to_string(plan.scenario));

  if (plan.scenario == Scenario::Tou || plan.scenario == Scenario::Flat) {
    const double c = static_cost(plan.scenario == Scenario::Tou ? tou_signal() : flat_signal(), office);
    for (std::uint64_t d = 0; d <= plan.days; d += plan.eval_stride) {
      curve.day.push_back(d);
      curve.daily_cost_usd.push_back(c);
    }
    return result;
  }

  SacAgent agent = [&] {
    if (uses_pretrained_checkpoint(plan.scenario)) {
      SacAgent a = checkpoint_load(plan.checkpoint);
      a.rng = Rng(derive_seed(seed, 1));
      return a;
    }
    SacConfig c = plan.sac;
    c.seed = derive_seed(seed, 0);
    return SacAgent::create(c);
  }();
  ReplayBuffer buffer = make_replay_buffer(agent.config);
  OfficeEnv env(office, derive_seed(seed, 2));

  const std::uint64_t start = agent.env_steps;
  std::uint64_t next_eval = 0;
  auto maybe_eval = [&](const SacAgent& a) {
    const std::uint64_t consumed = a.env_steps - start;
    if (consumed >= next_eval) {
      curve.day.push_back(consumed);
      curve.daily_cost_usd.push_back(evaluate_policy_episode(a.actor, office));
      next_eval = consumed - consumed % plan.eval_stride + plan.eval_stride;
    }
  };
  maybe_eval(agent);
  const OnlineHook online_hook = [&](const OnlineStepRecord& rec, const SacAgent& a) {
    if (metrics) {
      const bool updated = rec.update.status == UpdateReport::Status::Updated;
      *metrics << rec.env_step << ',' << trial << ',' << curve.label << ',' << fmt("%.9f", rec.daily_cost_usd) << ','
               << fmt("%.9f", rec.reward) << ','
               << (updated ? fmt("%.9g", 0.5 * (rec.update.critic1_loss + rec.update.critic2_loss)) : "") << ','
               << (updated ? fmt("%.9g", rec.update.actor_loss) : "") << ','
               << (updated ? fmt("%.9g", rec.update.entropy) : "") << '\n';
    }
    maybe_eval(a);
  };
  const DaggerHook dagger_hook = [&](const DaggerIterationStats& st, const SacAgent& a) {
    if (metrics) {
      *metrics << st.agent_env_steps << ',' << trial << ',' << curve.label << ','
               << fmt("%.9f", st.mean_real_daily_cost_usd) << ",,,,\n";
    }
    maybe_eval(a);
  };
  DaggerOptions dopt;
  dopt.horizon = plan.dagger.horizon;
  dopt.updates_per_step = plan.dagger.updates_per_step;

  switch (plan.scenario) {
    case Scenario::OnlineSac:
    case Scenario::OfflineOnlineSac:
      train_online(agent, buffer, env, plan.days, online_hook);
      break;
    case Scenario::DaggerSac:
    case Scenario::OfflineDaggerSac: {
      const PlanningModel model = load_planning_model(plan.planning_model);
      MixSchedule schedule{plan.dagger.m0, plan.dagger.beta, 0};
      dopt.iterations = plan.days / static_cast<std::uint64_t>(plan.dagger.horizon);
      dagger_train(agent, buffer, env, model, schedule, dopt, dagger_hook);
      const double tou = static_cost(tou_signal(), office);
      curve = planning_offset(curve, tou, plan.eval_stride, plan.planning_offset_days);
      break;
    }
    case Scenario::TwoStageDagger: {
      TwoStageOptions opt;
      opt.warmup_steps = plan.warmup_steps;
      opt.planning.epochs = plan.planning_epochs;
      opt.planning.seed = derive_seed(seed, 3);
      opt.m0 = plan.dagger.m0;
      opt.beta = plan.dagger.beta;
      opt.dagger = dopt;
      opt.dagger.iterations = (plan.days - plan.warmup_steps) / static_cast<std::uint64_t>(plan.dagger.horizon);
      two_stage_train(agent, buffer, env, opt, online_hook, dagger_hook);
      break;
    }
    default:
      break;
  }
  result.agent = std::move(agent);
  return result;
}

std::string curve_csv(const CostCurve& curve, Scenario scenario, std::uint64_t hash) {
  std::string s = "# officedr-curve v1 plan_hash=" + hex64(hash) + " scenario=" + std::string(to_string(scenario)) +
                  "\nday,daily_cost_usd,annual_cost_usd\n";
  for (std::size_t k = 0; k < curve.day.size(); ++k) {
    s += std::to_string(curve.day[k]) + "," + fmt("%.9f", curve.daily_cost_usd[k]) + "," +
         format_cents(annualize(to_cents(curve.daily_cost_usd[k]), scenario).total_cents) + "\n";
  }
  return s;
}

std::string aggregate_csv(const AggregateCurve& curve, Scenario scenario, std::uint64_t hash) {
  std::string s = "# officedr-aggregate v1 plan_hash=" + hex64(hash) +
                  " scenario=" + std::string(to_string(scenario)) + "\nday,mean_daily_usd,sem_daily_usd\n";
  for (std::size_t k = 0; k < curve.day.size(); ++k) {
    s += std::to_string(curve.day[k]) + "," + fmt("%.9f", curve.mean[k]) + "," + fmt("%.9f", curve.sem[k]) + "\n";
  }
  return s;
}

AggregateCurve read_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingPrerequisite("aggregate CSV not found: " + path.string(), "train");
  AggregateCurve c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("scenario=");
      if (pos != std::string::npos) c.label = line.substr(pos + 9, line.find(' ', pos) - pos - 9);
      continue;
    }
    if (line.rfind("day,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string a, b, d;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, d, ',')) {
      throw IoError("malformed aggregate row in " + path.string());
    }
    try {
      c.day.push_back(std::stoull(a));
      c.mean.push_back(std::stod(b));
      c.sem.push_back(std::stod(d));
    } catch (const std::exception&) {
      throw IoError("malformed aggregate row in " + path.string());
    }
  }
  if (c.label.empty()) c.label = path.stem().string();
  return c;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream* metrics) {
  plan.validate();
  const std::uint64_t hash = plan_hash(plan);
  std::filesystem::create_directories(plan.out_dir);
  ExperimentResult result;
  std::vector<CostCurve> curves;
  const auto seeds = plan.trial_seeds();
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    TrialResult t = run_trial(plan, seeds[k], static_cast<int>(k), metrics);
    const auto csv = plan.out_dir / ("trial_" + std::to_string(k) + ".csv");
    write_text(csv, curve_csv(t.curve, plan.scenario, hash));
    result.files.push_back(csv);
    if (t.agent) {
      const auto ckpt = plan.out_dir / ("trial_" + std::to_string(k) + ".ckpt");
      checkpoint_save(*t.agent, ckpt);
      result.files.push_back(ckpt);
    }
    curves.push_back(t.curve);
    result.trials.push_back(std::move(t));
  }
  result.aggregate = aggregate_curves(curves);
  const auto agg = plan.out_dir / "aggregate.csv";
  write_text(agg, aggregate_csv(result.aggregate, plan.scenario, hash));
  result.files.push_back(agg);

  result.tou_daily_usd = static_cost(tou_signal(), build_office(plan.office));
  CostCurve mean_curve{result.aggregate.label, result.aggregate.day, result.aggregate.mean};
  result.data_cost_days = data_cost(mean_curve, result.tou_daily_usd, plan.confirmation_window);
  return result;
}

std::string emit_plot_data(const std::vector<AggregateCurve>& curves) {
  std::string s = "# officedr-plot v1\nseries,day,mean_daily_usd,sem_daily_usd\n";
  for (const auto& c : curves) {
    for (std::size_t k = 0; k < c.day.size(); ++k) {
      s += c.label + "," + std::to_string(c.day[k]) + "," + fmt("%.9f", c.mean[k]) + "," + fmt("%.9f", c.sem[k]) +
           "\n";
    }
  }
  return s;
}

ReportInput report_input(const std::vector<AggregateCurve>& curves, const OfficeConfig& office) {
  ReportInput in;
  in.curves = curves;
  in.tou_daily_usd = static_cost(tou_signal(), office);
  in.flat_daily_usd = static_cost(flat_signal(), office);
  const Hourly tou = aggregate_demand(office, tou_signal().points);
  const Hourly flat = aggregate_demand(office, flat_signal().points);
  in.tou_retained_energy =
      std::accumulate(tou.begin(), tou.end(), 0.0) / std::accumulate(flat.begin(), flat.end(), 0.0);
  return in;
}

std::string build_report(const ReportInput& in) {
  std::ostringstream r;
  auto annual = [](double daily, Scenario s) { return format_cents(annualize(to_cents(daily), s).total_cents); };
  r << "officedr report\n\n";
  r << "baseline tou   daily $" << fmt("%.2f", in.tou_daily_usd) << "  annual $" << annual(in.tou_daily_usd, Scenario::Tou)
    << " (includes $10000.00 social game overhead)\n";
  r << "baseline flat  daily $" << fmt("%.2f", in.flat_daily_usd) << "  annual $"
    << annual(in.flat_daily_usd, Scenario::Flat) << " (no overhead)\n\n";
  for (const auto& c : in.curves) {
    if (c.mean.empty()) continue;
    Scenario s = Scenario::OnlineSac;
    try {
      s = scenario_from_string(c.label);
    } catch (const ConfigError&) {
    }
    const std::uint64_t dc = data_cost(CostCurve{c.label, c.day, c.mean}, in.tou_daily_usd, in.confirmation_window);
    r << "series " << c.label << "  final daily $" << fmt("%.2f", c.mean.back()) << " ± "
      << fmt("%.2f", c.sem.back()) << "  annual $" << annual(c.mean.back(), s) << "  data cost vs tou: "
      << (dc == kInfiniteDataCost ? std::string("never") : std::to_string(dc) + " days") << "\n";
  }
  r << "\ncarbon (" << fmt("%.2f", kCarbonIntensityLbsPerKwh) << " lbs CO2/kWh)\n";
  r << "  tou retains " << fmt("%.4f", in.tou_retained_energy) << " of flat energy on this office; per 3000 kWh saves "
    << fmt("%.6f", carbon_estimate(3000.0, kCarbonIntensityLbsPerKwh, std::clamp(in.tou_retained_energy, 0.0, 1.0)))
    << " lbs\n";
  r << "  3000 kWh at 0.75 retained: " << fmt("%.6f", carbon_estimate(3000.0, kCarbonIntensityLbsPerKwh, 0.75))
    << " lbs saved\n";
  r << "  3000 kWh at 0.55 retained: " << fmt("%.6f", carbon_estimate(3000.0, kCarbonIntensityLbsPerKwh, 0.55))
    << " lbs saved\n";
  r << "  note: a figure of \"2 tons\" saved for the 3000 kWh / 0.75 case is inconsistent with 0.52 lbs/kWh; "
       "the formula gives 390 lbs (0.195 short tons) and that value is reported.\n";
  return r.str();
}

}  // namespace officedr

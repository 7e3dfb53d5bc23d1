// officedr command-line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 missing prerequisite,
// 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "officedr/baselines.hpp"
#include "officedr/experiment.hpp"
#include "officedr/offline_pretrain.hpp"
#include "officedr/office_config.hpp"
#include "officedr/planning.hpp"

using namespace officedr;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OfficeSpec office_or_default(const std::string& path) {
  return path.empty() ? evaluation_office_spec() : load_office_spec(path);
}

SacConfig sac_or_default(const std::string& path) {
  return path.empty() ? SacConfig{} : sac_config_from_json(slurp(path));
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::string days_text(std::uint64_t d) { return d == kInfiniteDataCost ? "never" : std::to_string(d); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"office demand-response pricing laboratory"};
  app.require_subcommand(1);

  // generate-dataset
  auto* gen = app.add_subcommand("generate-dataset", "write the offline deterministic-function dataset");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "offline dataset spec (JSON); defaults when omitted");
  gen->add_option("--out", gen_out, "output dataset path")->required();

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "pretrain SAC on an offline dataset");
  std::string pre_dataset, pre_out, pre_sac;
  int pre_epochs = 15, pre_every = 1;
  std::uint64_t pre_seed = 0;
  pre->add_option("--dataset", pre_dataset)->required();
  pre->add_option("--epochs", pre_epochs);
  pre->add_option("--checkpoint-every", pre_every);
  pre->add_option("--out-dir", pre_out)->required();
  pre->add_option("--sac", pre_sac, "SAC config (JSON)");
  pre->add_option("--seed", pre_seed);

  // collect-planning
  auto* col = app.add_subcommand("collect-planning", "sample random transitions for the planning model");
  std::string col_office, col_out;
  std::size_t col_n = 1000;
  std::uint64_t col_seed = 0;
  col->add_option("--office", col_office, "office spec (JSON); evaluation office when omitted");
  col->add_option("--n", col_n);
  col->add_option("--seed", col_seed);
  col->add_option("--out", col_out)->required();

  // train-planning
  auto* tp = app.add_subcommand("train-planning", "fit the planning model");
  std::string tp_data, tp_out;
  PlanningTrainOptions tp_opt;
  tp->add_option("--data", tp_data)->required();
  tp->add_option("--epochs", tp_opt.epochs);
  tp->add_option("--lr", tp_opt.lr);
  tp->add_option("--l2", tp_opt.l2);
  tp->add_option("--holdout", tp_opt.holdout);
  tp->add_option("--batch", tp_opt.batch_size);
  tp->add_option("--seed", tp_opt.seed);
  tp->add_option("--out", tp_out)->required();

  // train
  auto* tr = app.add_subcommand("train", "run an experiment plan");
  std::string tr_plan, tr_out, tr_metrics;
  std::uint64_t tr_seed_base = 0, tr_days = 0;
  int tr_trials = 0;
  tr->add_option("--plan", tr_plan)->required();
  auto* tr_seed_opt = tr->add_option("--seed-base", tr_seed_base);
  tr->add_option("--out", tr_out);
  tr->add_option("--trials", tr_trials);
  tr->add_option("--days", tr_days);
  tr->add_option("--metrics", tr_metrics, "per-day metrics CSV");

  // dagger
  auto* dg = app.add_subcommand("dagger", "planning-model data mixing on one agent");
  std::string dg_ckpt, dg_model, dg_schedule = "10,0.99", dg_office, dg_sac, dg_out;
  DaggerOptions dg_opt;
  std::uint64_t dg_seed = 0;
  dg->add_option("--checkpoint", dg_ckpt, "start from a pretrained checkpoint");
  dg->add_option("--planning-model", dg_model)->required();
  dg->add_option("--schedule", dg_schedule, "M0,beta");
  dg->add_option("--iterations", dg_opt.iterations);
  dg->add_option("--horizon", dg_opt.horizon);
  dg->add_option("--office", dg_office);
  dg->add_option("--sac", dg_sac);
  dg->add_option("--seed", dg_seed);
  dg->add_option("--out", dg_out)->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "evaluate a controller on an office");
  std::string ev_controller, ev_office;
  int ev_days = 10;
  std::uint64_t ev_seed = 0;
  ev->add_option("--controller", ev_controller, "tou | flat | checkpoint:<path>")->required();
  ev->add_option("--days", ev_days);
  ev->add_option("--office", ev_office);
  ev->add_option("--seed", ev_seed);

  // oracle
  auto* orc = app.add_subcommand("oracle", "grid-search optimal price signal");
  std::string orc_office;
  double orc_res = kDefaultOracleResolution;
  orc->add_option("--office", orc_office)->required();
  orc->add_option("--resolution", orc_res);

  // report
  auto* rep = app.add_subcommand("report", "summarize aggregate CSVs");
  std::vector<std::string> rep_inputs;
  std::string rep_office, rep_out, rep_plot;
  std::size_t rep_window = 10;
  rep->add_option("--inputs", rep_inputs, "aggregate CSV files")->required();
  rep->add_option("--office", rep_office);
  rep->add_option("--window", rep_window, "data-cost confirmation window");
  rep->add_option("--out", rep_out, "report text file (stdout when omitted)");
  rep->add_option("--plot-data", rep_plot, "long-format plot CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      const OfflineDatasetSpec spec = gen_spec.empty() ? OfflineDatasetSpec{} : load_offline_spec(gen_spec);
      const DatasetHeader h = generate_offline_dataset(spec, gen_out);
      std::printf("wrote %llu records (linear %llu, sinusoidal %llu, threshold_exp %llu) to %s\n",
                  static_cast<unsigned long long>(h.total), static_cast<unsigned long long>(h.variant_counts[0]),
                  static_cast<unsigned long long>(h.variant_counts[1]),
                  static_cast<unsigned long long>(h.variant_counts[2]), gen_out.c_str());
    } else if (*pre) {
      SacConfig c = sac_or_default(pre_sac);
      c.seed = pre_seed;
      SacAgent agent = SacAgent::create(c);
      const PretrainResult r = pretrain(agent, fs::path(pre_dataset), {pre_epochs, pre_every, pre_out});
      checkpoint_save(agent, fs::path(pre_out) / "pretrain_final.ckpt");
      std::printf("%llu updates (%llu per epoch), %zu checkpoints in %s\n",
                  static_cast<unsigned long long>(r.updates), static_cast<unsigned long long>(r.updates_per_epoch),
                  r.checkpoints.size(), pre_out.c_str());
    } else if (*col) {
      const PlanningDataset d = collect_planning_data(build_office(office_or_default(col_office)), col_n, col_seed);
      save_planning_data(d, col_out);
      std::printf("wrote %zu planning samples to %s\n", d.size(), col_out.c_str());
    } else if (*tp) {
      const PlanningTrainResult r = train_planning_model(load_planning_data(tp_data), tp_opt);
      save_planning_model(r.model, tp_out);
      std::printf("best holdout mse %.6g at epoch %d (epoch 1: %.6g); saved %s\n", r.model.best_loss,
                  r.model.best_epoch, r.model.first_epoch_loss, tp_out.c_str());
    } else if (*tr) {
      ExperimentPlan plan = load_plan(tr_plan);
      if (tr_seed_opt->count() > 0) plan.seed_base = tr_seed_base;
      if (!tr_out.empty()) plan.out_dir = tr_out;
      if (tr_trials > 0) plan.trials = tr_trials;
      if (tr_days > 0) plan.days = tr_days;
      std::ofstream metrics;
      if (!tr_metrics.empty()) {
        metrics.open(tr_metrics, std::ios::binary | std::ios::trunc);
        if (!metrics) throw IoError("cannot write " + tr_metrics);
        metrics << metrics_csv_header();
      }
      const ExperimentResult r = run_experiment(plan, tr_metrics.empty() ? nullptr : &metrics);
      std::printf("%s: %d trials, final mean daily $%.2f, tou $%.2f, data cost %s days; outputs in %s\n",
                  std::string(to_string(plan.scenario)).c_str(), plan.trials, r.aggregate.mean.back(),
                  r.tou_daily_usd, days_text(r.data_cost_days).c_str(), plan.out_dir.string().c_str());
    } else if (*dg) {
      const auto comma = dg_schedule.find(',');
      if (comma == std::string::npos) throw ConfigError("--schedule expects M0,beta");
      MixSchedule schedule{std::stod(dg_schedule.substr(0, comma)), std::stod(dg_schedule.substr(comma + 1)), 0};
      SacAgent agent = [&] {
        if (!dg_ckpt.empty()) return checkpoint_load(dg_ckpt);
        SacConfig c = sac_or_default(dg_sac);
        c.seed = dg_seed;
        return SacAgent::create(c);
      }();
      const PlanningModel model = load_planning_model(dg_model);
      ReplayBuffer buffer = make_replay_buffer(agent.config);
      OfficeEnv env(build_office(office_or_default(dg_office)), dg_seed);
      fs::create_directories(dg_out);
      std::ofstream csv(fs::path(dg_out) / "dagger_stats.csv", std::ios::binary | std::ios::trunc);
      csv << "iteration,exponent,mix,planning_trajectories,planning_steps,real_steps,buffer_planning,buffer_online,"
             "buffer_offline,env_steps,mean_real_daily_cost_usd\n";
      dagger_train(agent, buffer, env, model, schedule, dg_opt, [&](const DaggerIterationStats& s, const SacAgent&) {
        char line[256];
        std::snprintf(line, sizeof line, "%llu,%llu,%.17g,%llu,%llu,%llu,%zu,%zu,%zu,%llu,%.9f\n",
                      static_cast<unsigned long long>(s.iteration), static_cast<unsigned long long>(s.exponent), s.mix,
                      static_cast<unsigned long long>(s.planning_trajectories),
                      static_cast<unsigned long long>(s.planning_steps), static_cast<unsigned long long>(s.real_steps),
                      s.buffer_planning, s.buffer_online, s.buffer_offline,
                      static_cast<unsigned long long>(s.env_step_count), s.mean_real_daily_cost_usd);
        csv << line;
      });
      checkpoint_save(agent, fs::path(dg_out) / "dagger_final.ckpt");
      std::printf("dagger: %llu iterations, %llu real steps; outputs in %s\n",
                  static_cast<unsigned long long>(dg_opt.iterations),
                  static_cast<unsigned long long>(env.step_count()), dg_out.c_str());
    } else if (*ev) {
      const OfficeConfig office = build_office(office_or_default(ev_office));
      std::optional<SacAgent> agent;
      Controller controller;
      Scenario scenario = Scenario::OnlineSac;
      if (ev_controller == "tou") {
        controller = as_controller(tou_controller());
        scenario = Scenario::Tou;
      } else if (ev_controller == "flat") {
        controller = as_controller(flat_controller());
        scenario = Scenario::Flat;
      } else if (ev_controller.rfind("checkpoint:", 0) == 0) {
        agent = checkpoint_load(ev_controller.substr(11));
        controller = policy_controller(agent->actor);
      } else {
        throw ConfigError("unknown controller '" + ev_controller + "'");
      }
      const CostStats s = evaluate_controller(controller, office, ev_days, ev_seed);
      const AnnualCost a = annualize(to_cents(s.mean_daily_usd), scenario);
      std::printf("mean daily $%.4f  total $%.4f over %d days  annual $%s (energy $%s + overhead $%s)\n",
                  s.mean_daily_usd, s.total_usd, ev_days, format_cents(a.total_cents).c_str(),
                  format_cents(a.energy_cents).c_str(), format_cents(a.overhead_cents).c_str());
    } else if (*orc) {
      const OfficeConfig office = build_office(load_office_spec(orc_office));
      bool deterministic = true;
      for (const auto& p : office.persons) deterministic = deterministic && p.is_deterministic_function();
      const OracleResult r =
          deterministic ? oracle_deterministic(office, orc_res) : oracle_exhaustive(office, orc_res);
      std::printf("signal");
      for (double p : r.signal.points) std::printf(" %.4f", p);
      std::printf("\ndaily $%.6f%s\n", r.daily_cost_usd, r.floor_binding ? " (d_hat floor binding)" : "");
    } else if (*rep) {
      std::vector<AggregateCurve> curves;
      for (const auto& p : rep_inputs) curves.push_back(read_aggregate_csv(p));
      ReportInput in = report_input(curves, build_office(office_or_default(rep_office)));
      in.confirmation_window = rep_window;
      const std::string text = build_report(in);
      if (rep_out.empty()) {
        std::cout << text;
      } else {
        write_file(rep_out, text);
      }
      if (!rep_plot.empty()) write_file(rep_plot, emit_plot_data(curves));
    }
  } catch (const MissingPrerequisite& e) {
    std::fprintf(stderr, "error: %s (run `officedr %s` first)\n", e.what(), e.producer().c_str());
    return kExitMissing;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

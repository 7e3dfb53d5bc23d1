#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "officedr/experiment.hpp"

using namespace officedr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("officedr_" + name);
  fs::remove_all(d);
  return d;
}

ExperimentPlan small_plan(Scenario s, const fs::path& out) {
  ExperimentPlan p;
  p.scenario = s;
  p.trials = 2;
  p.days = 40;
  p.eval_stride = 20;
  p.seed_base = 3;
  p.office.persons = 6;
  p.sac.hidden = {8, 8};
  p.sac.batch_size = 8;
  p.sac.buffer_capacity = 1000;
  p.out_dir = out;
  return p;
}

CostCurve curve_of(std::vector<std::uint64_t> day, std::vector<double> cost) {
  return CostCurve{"c", std::move(day), std::move(cost)};
}

}  // namespace

TEST(Scenario, NamesRoundTrip) {
  for (Scenario s : {Scenario::OnlineSac, Scenario::OfflineOnlineSac, Scenario::DaggerSac, Scenario::OfflineDaggerSac,
                     Scenario::TwoStageDagger, Scenario::Tou, Scenario::Flat}) {
    EXPECT_EQ(scenario_from_string(to_string(s)), s);
    EXPECT_EQ(is_social_game(s), s != Scenario::Flat);
  }
  EXPECT_THROW(scenario_from_string("nope"), ConfigError);
}

TEST(Annualize, SocialGameWorkedExample) {
  const AnnualCost c = annualize(to_cents(80.00), Scenario::OnlineSac);
  EXPECT_EQ(c.total_cents, 3'000'000);
  EXPECT_EQ(c.energy_cents, 2'000'000);
  EXPECT_EQ(c.overhead_cents, 1'000'000);
  EXPECT_EQ(format_cents(c.total_cents), "30000.00");
}

TEST(Annualize, FlatCarriesNoOverhead) {
  EXPECT_EQ(annualize(0, Scenario::Flat).total_cents, 0);
  const AnnualCost c = annualize(to_cents(80.0), Scenario::Flat);
  EXPECT_EQ(c.total_cents, 2'000'000);
  EXPECT_EQ(c.overhead_cents, 0);
  EXPECT_EQ(annualize(to_cents(80.0), Scenario::Tou).overhead_cents, 1'000'000);
}

TEST(Cents, RoundingAndFormatting) {
  EXPECT_EQ(to_cents(0.015), 2);
  EXPECT_EQ(to_cents(12.344), 1234);
  EXPECT_EQ(format_cents(5), "0.05");
  EXPECT_EQ(format_cents(-1234), "-12.34");
}

TEST(DataCost, Fixtures) {
  const std::vector<std::uint64_t> days{0, 2000, 4000, 6000, 8000, 10000, 12000};
  EXPECT_EQ(data_cost(curve_of(days, std::vector<double>(7, 90.0)), 80.0, 2), kInfiniteDataCost);
  EXPECT_EQ(data_cost(curve_of(days, std::vector<double>(7, 70.0)), 80.0, 2), 0u);
  EXPECT_EQ(data_cost(curve_of(days, {95, 90, 85, 82, 79, 78, 77}), 80.0, 2), 8000u);
  // A single dip shorter than the window does not count.
  EXPECT_EQ(data_cost(curve_of(days, {95, 70, 85, 82, 79, 78, 77}), 80.0, 3), 8000u);
  // Ties with the baseline are not strictly below it.
  EXPECT_EQ(data_cost(curve_of(days, std::vector<double>(7, 80.0)), 80.0, 1), kInfiniteDataCost);
}

TEST(PlanningOffset, PrependsTouDays) {
  const std::vector<double> shifted = planning_offset({1.0, 2.0}, 55.5);
  ASSERT_EQ(shifted.size(), 1002u);
  for (std::size_t k = 0; k < 1000; ++k) ASSERT_EQ(shifted[k], 55.5);
  EXPECT_EQ(shifted[1000], 1.0);
  EXPECT_EQ(shifted[1001], 2.0);

  const CostCurve c = planning_offset(curve_of({0, 50}, {3.0, 4.0}), 55.5, 250);
  EXPECT_EQ(c.day, (std::vector<std::uint64_t>{0, 250, 500, 750, 1000, 1050}));
  EXPECT_EQ(c.daily_cost_usd, (std::vector<double>{55.5, 55.5, 55.5, 55.5, 3.0, 4.0}));
}

TEST(Carbon, Formula) {
  EXPECT_EQ(carbon_estimate(3000, 0.52, 0.75), 390.0);
  EXPECT_EQ(carbon_estimate(3000, 0.52, 0.55), 702.0);
  EXPECT_EQ(carbon_estimate(3000, 0.52, 1.0), 0.0);
  EXPECT_THROW(carbon_estimate(3000, 0.52, 1.5), ValidationError);
}

TEST(Aggregate, SemClosedForm) {
  const AggregateCurve a = aggregate_curves({curve_of({0, 10}, {1.0, 4.0}), curve_of({0, 10}, {3.0, 8.0})});
  EXPECT_EQ(a.mean, (std::vector<double>{2.0, 6.0}));
  // sample sd of {1, 3} is √2; SEM = √2 / √2 = 1
  EXPECT_NEAR(a.sem[0], 1.0, 1e-15);
  EXPECT_NEAR(a.sem[1], 2.0, 1e-15);
  const AggregateCurve one = aggregate_curves({curve_of({0, 10}, {1.0, 4.0})});
  EXPECT_EQ(one.mean, (std::vector<double>{1.0, 4.0}));
  EXPECT_EQ(one.sem, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(aggregate_curves({curve_of({0}, {1.0}), curve_of({5}, {1.0})}), ValidationError);
}

TEST(Plan, JsonRoundTripAndHash) {
  ExperimentPlan p = small_plan(Scenario::DaggerSac, "out_a");
  p.planning_model = "/tmp/model.odpm";
  p.dagger.m0 = 7;
  const ExperimentPlan back = plan_from_json(plan_to_json(p));
  EXPECT_EQ(plan_to_json(back), plan_to_json(p));
  EXPECT_EQ(plan_hash(back), plan_hash(p));
  ExperimentPlan moved = p;
  moved.out_dir = "elsewhere";
  EXPECT_EQ(plan_hash(moved), plan_hash(p));
  moved.days = 41;
  EXPECT_NE(plan_hash(moved), plan_hash(p));
  EXPECT_THROW(plan_from_json("{ not json"), ConfigError);
}

TEST(Plan, RelativeArtifactsResolveAgainstPlanDir) {
  const ExperimentPlan p =
      plan_from_json(R"({"scenario": "offline-online-sac", "checkpoint": "ck/a.ckpt"})", "/data/plans");
  EXPECT_EQ(p.checkpoint, fs::path("/data/plans/ck/a.ckpt"));
}

TEST(Plan, ValidationAndPrerequisites) {
  ExperimentPlan p = small_plan(Scenario::OnlineSac, "x");
  p.trials = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = small_plan(Scenario::OnlineSac, "x");
  p.seeds = {1, 1};
  EXPECT_THROW(p.validate(), ConfigError);
  try {
    small_plan(Scenario::OfflineOnlineSac, "x").validate();
    FAIL();
  } catch (const MissingPrerequisite& e) {
    EXPECT_EQ(e.producer(), "pretrain");
  }
  try {
    small_plan(Scenario::DaggerSac, "x").validate();
    FAIL();
  } catch (const MissingPrerequisite& e) {
    EXPECT_EQ(e.producer(), "train-planning");
  }
  ExperimentPlan missing = small_plan(Scenario::OfflineOnlineSac, "x");
  missing.checkpoint = fs::temp_directory_path() / "officedr_absent.ckpt";
  EXPECT_THROW(run_trial(missing, 1), MissingPrerequisite);
}

TEST(RunTrial, TouCurveIsConstant) {
  const TrialResult t = run_trial(small_plan(Scenario::Tou, "x"), 5);
  EXPECT_EQ(t.curve.day, (std::vector<std::uint64_t>{0, 20, 40}));
  for (double c : t.curve.daily_cost_usd) EXPECT_EQ(c, t.curve.daily_cost_usd.front());
  EXPECT_FALSE(t.agent.has_value());
}

TEST(RunTrial, MetricsRowsPerTrainingDay) {
  std::ostringstream m;
  const TrialResult t = run_trial(small_plan(Scenario::OnlineSac, "x"), 5, 1, &m);
  std::istringstream in(m.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind(std::to_string(rows) + ",1,online-sac,", 0), 0u) << line;
  }
  EXPECT_EQ(rows, 40);
  EXPECT_EQ(metrics_csv_header(), "step,trial,controller,daily_cost_usd,reward,critic_loss,actor_loss,entropy\n");
  ASSERT_TRUE(t.agent.has_value());
  EXPECT_EQ(t.agent->env_steps, 40u);
}

TEST(RunExperiment, ByteIdenticalReruns) {
  const auto a = temp_dir("exp_a"), b = temp_dir("exp_b");
  const ExperimentResult ra = run_experiment(small_plan(Scenario::OnlineSac, a));
  const ExperimentResult rb = run_experiment(small_plan(Scenario::OnlineSac, b));
  ASSERT_EQ(ra.files.size(), rb.files.size());
  ASSERT_EQ(ra.files.size(), 5u);  // 2 csv + 2 ckpt + aggregate
  for (std::size_t k = 0; k < ra.files.size(); ++k) {
    EXPECT_EQ(ra.files[k].filename(), rb.files[k].filename());
    EXPECT_EQ(slurp(ra.files[k]), slurp(rb.files[k])) << ra.files[k];
  }
  const AggregateCurve back = read_aggregate_csv(a / "aggregate.csv");
  EXPECT_EQ(back.day, ra.aggregate.day);
  for (std::size_t k = 0; k < back.mean.size(); ++k) EXPECT_NEAR(back.mean[k], ra.aggregate.mean[k], 1e-9);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunExperiment, TrialOrderDoesNotChangePerSeedResults) {
  ExperimentPlan p = small_plan(Scenario::OnlineSac, "x");
  p.seeds = {11, 12};
  const TrialResult first = run_trial(p, 12, 1);
  p.seeds = {12, 11};
  const TrialResult second = run_trial(p, 12, 0);
  EXPECT_EQ(first.curve.daily_cost_usd, second.curve.daily_cost_usd);
  EXPECT_TRUE(*first.agent == *second.agent);
}

TEST(Report, CarbonLinesAndDiscrepancyNote) {
  OfficeSpec spec = evaluation_office_spec();
  spec.persons = 10;
  const ReportInput in =
      report_input({AggregateCurve{"online-sac", {0, 50}, {90.0, 60.0}, {0.0, 0.0}}}, build_office(spec));
  EXPECT_LT(in.tou_daily_usd, in.flat_daily_usd);
  const std::string r = build_report(in);
  EXPECT_NE(r.find("2 tons"), std::string::npos);
  EXPECT_NE(r.find("390"), std::string::npos);
  EXPECT_NE(r.find("702"), std::string::npos);
  EXPECT_NE(r.find("online-sac"), std::string::npos);
}

TEST(PlotData, LongFormat) {
  const std::string s = emit_plot_data({AggregateCurve{"tou", {0}, {1.5}, {0.0}}});
  EXPECT_NE(s.find("series,day,mean_daily_usd,sem_daily_usd\n"), std::string::npos);
  EXPECT_NE(s.find("tou,0,1.500000000,0.000000000\n"), std::string::npos);
}

#include <gtest/gtest.h>

#include <set>

#include "covrank/config.hpp"
#include "covrank/error.hpp"
#include "covrank/evaluation.hpp"

namespace {

using namespace covrank;

RunConfig tiny_config() {
  auto rc = preset_config("desk");
  set_seed(rc, 5);
  rc.generate.bugs = 9;
  rc.generate.projects = 3;
  rc.generate.distractors = 2;
  rc.evaluation.threads = 1;
  return rc;
}

class Evaluation : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    rc_ = new RunConfig(tiny_config());
    datasets_ = new std::vector<ProjectDataset>(synth::generate_benchmark(rc_->generate));
    features_ = new std::vector<ProjectFeatures>(build_features(*datasets_, rc_->engine.features));
  }
  static void TearDownTestSuite() {
    delete rc_;
    delete datasets_;
    delete features_;
  }
  static RunConfig* rc_;
  static std::vector<ProjectDataset>* datasets_;
  static std::vector<ProjectFeatures>* features_;
};

RunConfig* Evaluation::rc_ = nullptr;
std::vector<ProjectDataset>* Evaluation::datasets_ = nullptr;
std::vector<ProjectFeatures>* Evaluation::features_ = nullptr;

TEST_F(Evaluation, LeaveOneOutFolds) {
  const auto folds = leave_one_out_folds(*features_);
  ASSERT_EQ(folds.size(), 9u);
  for (const auto& f : folds) {
    ASSERT_EQ(f.test.size(), 1u);
    EXPECT_EQ(f.train.size(), 2u);
    for (const auto& t : f.train) {
      EXPECT_EQ(t.first, f.test[0].first);
      EXPECT_NE(t.second, f.test[0].second);
    }
  }
}

TEST_F(Evaluation, CrossProjectFolds) {
  const auto folds = cross_project_folds(*features_);
  ASSERT_EQ(folds.size(), 3u);
  for (std::size_t p = 0; p < folds.size(); ++p) {
    EXPECT_EQ(folds[p].test.size(), 3u);
    EXPECT_EQ(folds[p].train.size(), 6u);
    for (const auto& t : folds[p].train) EXPECT_NE(t.first, p);
  }
}

TEST_F(Evaluation, DegenerateSplitsAreErrors) {
  auto single = *features_;
  single[1].bugs.resize(1);
  try {
    leave_one_out_folds(single);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::evaluation);
  }
  std::vector<ProjectFeatures> one = {(*features_)[0]};
  EXPECT_THROW(cross_project_folds(one), Error);
}

TEST_F(Evaluation, LeaveOneOutReport) {
  const auto r = run_leave_one_out(*features_, rc_->engine, rc_->evaluation);
  EXPECT_EQ(r.folds, 9u);
  for (const auto* l : {&*r.statement, &*r.method}) {
    EXPECT_EQ(l->overall.bugs, 9u);
    EXPECT_EQ(l->bugs.size(), 9u);
    EXPECT_EQ(l->projects.size(), 3u);
    for (const auto* m : {&l->overall, &l->ochiai, &l->dstar}) {
      EXPECT_LE(m->top1, m->top3);
      EXPECT_LE(m->top3, m->top5);
      EXPECT_LE(m->top5, m->bugs);
      EXPECT_LE(m->mfr, m->mar + 1e-12);
    }
    EXPECT_LE(l->tie_heavy.bugs, 9u);
    EXPECT_EQ(l->tie_heavy.bugs, l->tie_heavy_bugs);
  }
  const auto j = report_to_json(r);
  EXPECT_EQ(j.at("protocol"), "loo");
  EXPECT_TRUE(j.at("statement").contains("baselines"));
  EXPECT_TRUE(j.at("method").at("tie_heavy").contains("ochiai"));
  EXPECT_FALSE(report_table(r).empty());
}

TEST_F(Evaluation, ThreadCountDoesNotChangeTheReport) {
  auto s1 = rc_->evaluation;
  s1.method = false;
  auto s3 = s1;
  s3.threads = 3;
  EXPECT_EQ(report_to_json(run_cross_project(*features_, rc_->engine, s1)),
            report_to_json(run_cross_project(*features_, rc_->engine, s3)));
}

TEST_F(Evaluation, LevelsCanBeSkipped) {
  auto s = rc_->evaluation;
  s.statement = false;
  const auto r = run_cross_project(*features_, rc_->engine, s);
  EXPECT_FALSE(r.statement);
  EXPECT_TRUE(r.method);
}

TEST(Variants, Incremental) {
  const auto v = incremental_variants();
  ASSERT_EQ(v.size(), 3u);
  EXPECT_FALSE(v[0].toggles.ordering);
  EXPECT_FALSE(v[0].toggles.stat_dep);
  EXPECT_TRUE(v[1].toggles.ordering);
  EXPECT_FALSE(v[1].toggles.stat_dep);
  EXPECT_EQ(v[2].toggles, Toggles{});
}

TEST(Variants, AblationFlags) {
  const auto v = ablation_variants({"ordering", "text_sim"});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].name, "full");
  EXPECT_EQ(v[0].toggles, Toggles{});
  EXPECT_FALSE(v[1].toggles.ordering);
  EXPECT_TRUE(v[1].toggles.text_sim);
  EXPECT_FALSE(v[2].toggles.text_sim);
  try {
    ablation_variants({"bogus"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Variants, AllOnMatchesDefaultPipeline) {
  auto rc = tiny_config();
  rc.generate.bugs = 6;
  rc.generate.projects = 2;
  rc.evaluation.protocol = Protocol::cross;
  rc.evaluation.statement = false;
  const auto data = synth::generate_benchmark(rc.generate);
  const auto reports = ablate(data, rc, ablation_variants({}));
  ASSERT_EQ(reports.size(), 1u);
  auto a = report_to_json(reports[0]);
  auto b = report_to_json(evaluate_datasets(data, rc));
  a.erase("variant");
  b.erase("variant");
  EXPECT_EQ(a, b);
}

}  // namespace

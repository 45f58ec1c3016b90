#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(COVRANK_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.output.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("covrank_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }
  fs::path dir_;
};

TEST_F(Cli, UnknownConfigKeyExitsTwoAndNamesIt) {
  write("bad.json", R"({"model": {"bogus_key": 1}})");
  const auto r = run("generate --config " + path("bad.json") + " --out " + path("d"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("model.bogus_key"), std::string::npos) << r.output;
}

TEST_F(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("generate --preset quick").code, 2);
  EXPECT_EQ(run("generate --seed notanumber").code, 2);
  EXPECT_EQ(run("ingest").code, 2);
}

TEST_F(Cli, MissingDatasetExitsThree) {
  const auto r = run("ingest --in " + path("missing.json"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.output.find("missing.json"), std::string::npos);
}

TEST_F(Cli, InvalidDatasetExitsThree) {
  write("bad.json", R"({"schema": "fl-dataset/v1", "project": "x", "bugs": [{"bug_id": 3}]})");
  EXPECT_EQ(run("ingest --in " + path("bad.json")).code, 3);
}

TEST_F(Cli, TrainingOnNothingExitsFour) {
  write("empty.json", R"({"schema": "fl-dataset/v1", "project": "E", "bugs": []})");
  EXPECT_EQ(run("train --in " + path("empty.json") + " --out " + path("m")).code, 4);
}

TEST_F(Cli, UnsplittableEvaluationExitsFive) {
  ASSERT_EQ(run("generate --bugs 3 --projects 3 --out " + path("d")).code, 0);
  EXPECT_EQ(run("evaluate --in " + path("d")).code, 5);
}

TEST_F(Cli, GenerateIngestOrderScore) {
  ASSERT_EQ(run("generate --seed 4 --bugs 4 --projects 1 --distractors 1 --out " + path("d")).code, 0);
  const auto ing = run("ingest --in " + path("d"));
  ASSERT_EQ(ing.code, 0) << ing.output;
  EXPECT_NE(ing.output.find("bugs 4"), std::string::npos) << ing.output;
  EXPECT_NE(ing.output.find("methods 8"), std::string::npos) << ing.output;

  const auto data = nlohmann::json::parse(slurp(dir_ / "d" / "proj01.json"));
  const std::string bug = data.at("bugs").at(0).at("bug_id");
  const auto ord = run("order --in " + path("d") + " --bug " + bug);
  ASSERT_EQ(ord.code, 0) << ord.output;
  EXPECT_NE(ord.output.find("columns:"), std::string::npos);

  const auto sb = run("score-sbfl --in " + path("d") + " --bug " + bug);
  ASSERT_EQ(sb.code, 0) << sb.output;
  EXPECT_EQ(sb.output.rfind("method_id,stmt_id,line,score,rank\n", 0), 0u);
  EXPECT_EQ(run("score-sbfl --formula tarantula --in " + path("d") + " --bug " + bug).code, 2);
  EXPECT_EQ(run("score-sbfl --in " + path("d") + " --bug nope").code, 3);

  const auto emb = run("embed --kind sd --in " + path("d") + " --bug " + bug);
  ASSERT_EQ(emb.code, 0) << emb.output;
  EXPECT_EQ(emb.output.rfind("token,v0", 0), 0u);
  EXPECT_EQ(run("embed --kind colour --in " + path("d") + " --bug " + bug).code, 2);
}

TEST_F(Cli, TrainLocalizeFeatmapEvaluate) {
  write("small.json", R"({"model": {"epochs": 2, "encoder_epochs": 2}, "evaluation": {"threads": 1}})");
  const std::string cfg = " --config " + path("small.json");
  ASSERT_EQ(run("generate --seed 9 --bugs 6 --projects 2 --distractors 1 --out " + path("d")).code, 0);
  const auto tr = run("train --level both --in " + path("d") + " --out " + path("m") + cfg);
  ASSERT_EQ(tr.code, 0) << tr.output;
  EXPECT_TRUE(fs::exists(dir_ / "m" / "run_config.json"));

  const auto data = nlohmann::json::parse(slurp(dir_ / "d" / "proj01.json"));
  const std::string bug = data.at("bugs").at(0).at("bug_id");
  const auto ls = run("localize --model " + path("m") + " --bug " + bug + " --level stmt");
  ASSERT_EQ(ls.code, 0) << ls.output;
  EXPECT_EQ(ls.output.rfind("rank,method_id,stmt_id,line,score,text\n", 0), 0u);
  const auto lm = run("localize --model " + path("m") + " --bug " + bug + " --level method");
  ASSERT_EQ(lm.code, 0) << lm.output;
  EXPECT_EQ(lm.output.rfind("rank,method_id,score\n", 0), 0u);
  EXPECT_EQ(run("localize --model " + path("m") + " --bug " + bug + " --level both").code, 2);

  const auto fm = run("featmap --model " + path("m") + " --bug " + bug + " --network ss --out " + path("f"));
  ASSERT_EQ(fm.code, 0) << fm.output;
  EXPECT_TRUE(fs::exists(dir_ / "f" / "map_00.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "f" / "matrix.pgm"));

  const auto ev = run("evaluate --protocol cross --level method --in " + path("d") + " --out " + path("e") + cfg);
  ASSERT_EQ(ev.code, 0) << ev.output;
  const auto rep = nlohmann::json::parse(slurp(dir_ / "e" / "report.json"));
  EXPECT_EQ(rep.at("reports").at(0).at("protocol"), "cross");
  EXPECT_FALSE(rep.at("reports").at(0).contains("statement"));
  EXPECT_EQ(run("evaluate --ablate nonsense --in " + path("d") + cfg).code, 2);
}

TEST_F(Cli, PipelineIsReproducible) {
  write("small.json",
        R"({"generate": {"bugs": 6, "projects": 2, "distractors": 1},
            "model": {"epochs": 2, "encoder_epochs": 2}, "evaluation": {"threads": 2}})");
  const std::string cmd = "pipeline --preset desk --seed 7 --config " + path("small.json") + " --out " + path("a");
  auto r = run(cmd);
  ASSERT_EQ(r.code, 0) << r.output;
  fs::rename(dir_ / "a", dir_ / "b");
  r = run(cmd);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a" / "model")) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / "model" / e.path().filename())) << e.path();
  }
  EXPECT_GT(files, 0u);
}

}  // namespace

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "covrank/config.hpp"
#include "covrank/error.hpp"

namespace {

using namespace covrank;
using nlohmann::json;

std::string config_error(const json& j) {
  auto c = default_config();
  try {
    apply_json(c, j);
    validate_config(c);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    return e.what();
  }
  return {};
}

TEST(Config, Defaults) {
  const auto c = default_config();
  EXPECT_EQ(c.engine.filters, 8u);
  EXPECT_EQ(c.engine.core_h, 3u);
  EXPECT_EQ(c.engine.core_w, 3u);
  EXPECT_EQ(c.engine.out_len, 16u);
  EXPECT_DOUBLE_EQ(c.engine.train.lr, 0.003);
  EXPECT_EQ(c.engine.train.batch, 32u);
  EXPECT_EQ(c.engine.train.epochs, 100u);
  EXPECT_EQ(c.engine.train.clip_norm, 0.0);
  validate_config(c);
}

TEST(Config, Presets) {
  const auto desk = preset_config("desk");
  EXPECT_EQ(desk.preset, "desk");
  EXPECT_LT(desk.engine.train.epochs, default_config().engine.train.epochs);
  validate_config(desk);
  const auto thorough = preset_config("thorough");
  EXPECT_EQ(thorough.engine.filters, 9u);
  EXPECT_EQ(thorough.engine.core_h, 5u);
  EXPECT_EQ(thorough.engine.train.epochs, 200u);
  EXPECT_EQ(thorough.engine.train.batch, 64u);
  validate_config(thorough);
  EXPECT_THROW(preset_config("quick"), Error);
}

TEST(Config, UnknownKeysAreNamed) {
  EXPECT_NE(config_error({{"bogus", 1}}).find("'bogus'"), std::string::npos);
  EXPECT_NE(config_error({{"model", {{"lrate", 0.1}}}}).find("'model.lrate'"), std::string::npos);
  EXPECT_NE(config_error({{"features", {{"sgns", {{"dims", 3}}}}}}).find("'features.sgns.dims'"),
            std::string::npos);
}

TEST(Config, BadValuesAreNamed) {
  EXPECT_NE(config_error({{"model", {{"batch", -1}}}}).find("model.batch"), std::string::npos);
  EXPECT_NE(config_error({{"model", {{"batch", 0}}}}).find("model.batch"), std::string::npos);
  EXPECT_NE(config_error({{"model", {{"lr", "fast"}}}}).find("model.lr"), std::string::npos);
  EXPECT_NE(config_error({{"evaluation", {{"protocol", "kfold"}}}}).find("evaluation.protocol"), std::string::npos);
  EXPECT_NE(config_error({{"generate", {{"p_faulty_invoked", 1.5}}}}).find("generate.p_faulty_invoked"),
            std::string::npos);
  EXPECT_NE(config_error(json::array()).find("<root>"), std::string::npos);
}

TEST(Config, OverlayKeepsOtherValues) {
  auto c = preset_config("desk");
  const auto before = c;
  apply_json(c, {{"model", {{"epochs", 3}}}, {"features", {{"toggles", {{"stat_dep", false}}}}}});
  EXPECT_EQ(c.engine.train.epochs, 3u);
  EXPECT_FALSE(c.engine.features.toggles.stat_dep);
  EXPECT_EQ(c.engine.train.batch, before.engine.train.batch);
  EXPECT_EQ(c.engine.out_len, before.engine.out_len);
}

TEST(Config, JsonRoundTrip) {
  for (const auto* name : {"desk", "thorough"}) {
    auto c = preset_config(name);
    set_seed(c, 77);
    const auto j = config_to_json(c);
    EXPECT_EQ(config_to_json(config_from_json(j)), j);
    auto d = default_config();
    apply_json(d, j);
    EXPECT_EQ(config_to_json(d), j);
  }
}

TEST(Config, SeedDerivation) {
  auto a = default_config(), b = default_config();
  set_seed(a, 1);
  set_seed(b, 2);
  EXPECT_EQ(a.seed, 1u);
  EXPECT_NE(a.engine.seed, b.engine.seed);
  EXPECT_NE(a.engine.features.seed, a.engine.seed);
  EXPECT_NE(a.generate.seed, b.generate.seed);
  auto a2 = default_config();
  set_seed(a2, 1);
  EXPECT_EQ(config_to_json(a2), config_to_json(a));
}

TEST(Config, FileOverlay) {
  const auto path = std::filesystem::temp_directory_path() / "covrank_config_test.json";
  {
    std::ofstream(path) << R"({"model": {"filters": 4}})";
  }
  auto c = default_config();
  apply_file(c, path);
  EXPECT_EQ(c.engine.filters, 4u);
  {
    std::ofstream(path) << "{ not json";
  }
  EXPECT_THROW(apply_file(c, path), Error);
  std::filesystem::remove(path);
  try {
    apply_file(c, path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}

TEST(Config, WorkerThreads) {
  auto c = default_config();
  c.evaluation.threads = 3;
  EXPECT_EQ(worker_threads(c), 3u);
  c.evaluation.threads = 0;
  EXPECT_GE(worker_threads(c), 1u);
}

}  // namespace

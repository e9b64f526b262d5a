/*
 * Copyright 2026 The panellime Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "../tools/config.h"
#include "../tools/pipeline.h"
#include "panellime/serialization.h"
#include "test_util.h"

namespace panellime::cli {
namespace {

namespace fs = std::filesystem;

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "panellime");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path sample_config() { return testing::source_dir() / "data" / "freedom_sample.ini"; }

TEST(Config, DefaultsRoundTripThroughIni) {
  PipelineConfig c;
  c.data_path = "/tmp/panel.csv";
  c.schema = {"Country", "Year", "score", {"region"}};
  c.seed = 99;
  c.lime.k_features = 4;
  c.coverage_mode = CoverageMode::positive;
  c.ice_features = {"a", "b"};
  const std::string text = to_ini(c);
  EXPECT_EQ(to_ini(parse_config(text)), text);
}

TEST(Config, ParsesSectionsAndResolvesPaths) {
  const PipelineConfig c = parse_config(
      "; comment\n[data]\npath = panel.csv\nentity = Country\ntime = Year\ntarget = Score\n"
      "[lime]\nk_features = 4   ; inline comment\n[run]\nseed = 12\nout = results\n",
      "/base");
  EXPECT_EQ(c.data_path, fs::path("/base/panel.csv"));
  EXPECT_EQ(c.out_dir, fs::path("/base/results"));
  EXPECT_EQ(c.lime.k_features, 4);
  EXPECT_EQ(c.seed, 12u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("[lime]\nwidth = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[nope]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[lime]\nn_samples = many\n"), ConfigError);
}

TEST(Config, SectionTextTracksOnlyItsSection) {
  PipelineConfig a, b;
  b.pick_budget = 3;
  EXPECT_EQ(section_text(a, "lime"), section_text(b, "lime"));
  EXPECT_NE(section_text(a, "pick"), section_text(b, "pick"));
  b.out_dir = "elsewhere";
  EXPECT_EQ(section_text(a, "run"), section_text(b, "run"));
}

TEST(Cli, InvalidArgumentsExitTwo) {
  EXPECT_EQ(run({"frobnicate"}), kInvalidConfig);
  EXPECT_EQ(run({"train", "--lime-k", "zero"}), kInvalidConfig);
  const auto dir = testing::scratch_dir("cli_bad_config");
  std::ofstream(dir / "bad.ini") << "[lime]\nunknown_key = 1\n";
  EXPECT_EQ(run({"pipeline", "--config", (dir / "bad.ini").string()}), kInvalidConfig);
  EXPECT_EQ(run({"explain", "--config", sample_config().string(), "--samples", "-5", "--out",
                 (dir / "out").string()}),
            kInvalidConfig);
}

TEST(Cli, MissingUpstreamExitsThree) {
  const auto dir = testing::scratch_dir("cli_missing");
  EXPECT_EQ(run({"explain", "--config", sample_config().string(), "--out", dir.string(), "-q"}), kUpstreamMissing);
  EXPECT_EQ(run({"impute", "--config", sample_config().string(), "--data", (dir / "none.csv").string(), "--out",
                 dir.string(), "-q"}),
            kUpstreamMissing);
}

TEST(Cli, SamplePipeline) {
  const auto dir = testing::scratch_dir("cli_sample");
  ASSERT_EQ(run({"pipeline", "--config", sample_config().string(), "--out", dir.string(), "-q"}), kOk);
  for (const char* f : {"imputed.csv", "reformatted.csv", "model.json", "explanations.json", "pick.json", "ice.csv",
                        "slope_rank.csv", "eval_report.json", kManifestFile}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string reformatted = slurp(dir / "reformatted.csv");
  EXPECT_NE(reformatted.find("-0.91"), std::string::npos);
  EXPECT_NE(reformatted.find("1.32"), std::string::npos);

  const Json explanations = read_json_file(dir / "explanations.json");
  bool found = false;
  for (const auto& e : explanations) {
    if (e.at("label").get<std::string>().find("Syria") != std::string::npos) {
      found = true;
      EXPECT_NEAR(e.at("target").get<double>(), -0.91, 1e-9);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, StaleUpstreamExitsThree) {
  const auto dir = testing::scratch_dir("cli_stale");
  const std::string cfg = sample_config().string();
  ASSERT_EQ(run({"impute", "--config", cfg, "--out", dir.string(), "-q"}), kOk);
  ASSERT_EQ(run({"reformat", "--config", cfg, "--out", dir.string(), "-q"}), kOk);
  ASSERT_EQ(run({"train", "--config", cfg, "--out", dir.string(), "-q"}), kOk);
  // Changing an upstream section invalidates everything below it.
  EXPECT_EQ(run({"explain", "--config", cfg, "--out", dir.string(), "--theta", "0.5", "-q"}), kUpstreamMissing);
  EXPECT_EQ(run({"explain", "--config", cfg, "--out", dir.string(), "--seed", "8", "-q"}), kUpstreamMissing);
  // Changing the stage's own section does not.
  EXPECT_EQ(run({"explain", "--config", cfg, "--out", dir.string(), "--lime-k", "2", "-q"}), kOk);
  // A tampered artifact is detected.
  std::ofstream(dir / "model.json", std::ios::app) << " ";
  EXPECT_EQ(run({"explain", "--config", cfg, "--out", dir.string(), "-q"}), kUpstreamMissing);
}

TEST(Cli, RerunIsByteIdentical) {
  const auto a = testing::scratch_dir("cli_det_a");
  const auto b = testing::scratch_dir("cli_det_b");
  ASSERT_EQ(run({"pipeline", "--config", sample_config().string(), "--out", a.string(), "-q"}), kOk);
  ASSERT_EQ(run({"pipeline", "--config", sample_config().string(), "--out", b.string(), "-q"}), kOk);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
  }
}

}  // namespace
}  // namespace panellime::cli

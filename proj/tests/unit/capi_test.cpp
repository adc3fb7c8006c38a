/*
 * Copyright 2026 The coastsurr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "coastsurr/coastsurr.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kConfig = R"({
  "synth": {"n": 16, "k_olus": 4, "decay_cells": 4.0},
  "corpus": {"slr_levels": [1.0, 1.5],
             "splits": [{"name": "train", "count": 6}, {"name": "val", "count": 2},
                        {"name": "test", "count": 2}]},
  "model": {"input_n": 16, "depth_k": 2, "base_channels": 4, "cardinality_g": 2,
            "bottleneck_width": 2, "marx_blocks": 1, "reduction_ratio": 2},
  "train": {"epochs": 2, "batch_size": 2}
})";

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(COASTSURR_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = ::pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CApi : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / "coastsurr_capi");
    fs::remove_all(*dir_);
    fs::create_directories(*dir_);
    std::ofstream(*dir_ / "run.json") << kConfig;
    const std::string opts = json{{"config", (*dir_ / "run.json").string()}}.dump();
    ASSERT_EQ(cs_run_command("synthgen", opts.c_str(), nullptr, nullptr, nullptr), CS_OK) << cs_last_error();
    ASSERT_EQ(cs_run_command("train", opts.c_str(), nullptr, nullptr, nullptr), CS_OK) << cs_last_error();
  }
  static void TearDownTestSuite() { delete dir_; }
  static fs::path dir() { return *dir_; }
  static std::string config() { return (dir() / "run.json").string(); }
  static fs::path* dir_;
};

fs::path* CApi::dir_ = nullptr;

TEST(CApiBasics, VersionNamesAndExitCodes) {
  EXPECT_STREQ(cs_version(), COASTSURR_VERSION_STRING);
  EXPECT_EQ(cs_status_exit_code(CS_OK), 0);
  for (cs_status s : {CS_ERR_INVALID_ARGUMENT, CS_ERR_PARSE, CS_ERR_LENGTH, CS_ERR_CONFIG, CS_ERR_IO,
                      CS_ERR_SHAPE, CS_ERR_CAPACITY, CS_ERR_NOT_FOUND}) {
    EXPECT_EQ(cs_status_exit_code(s), 1) << cs_status_name(s);
  }
  EXPECT_EQ(cs_status_exit_code(CS_ERR_NUMERIC), 2);
  EXPECT_EQ(cs_status_exit_code(CS_ERR_INTERNAL), 2);
  EXPECT_NE(std::string(cs_command_names()).find("serve"), std::string::npos);
}

TEST(CApiBasics, ErrorsMapToStatusCodes) {
  char* out = nullptr;
  EXPECT_EQ(cs_run_command("train", "{nope", nullptr, nullptr, &out), CS_ERR_PARSE);
  EXPECT_EQ(out, nullptr);
  EXPECT_EQ(cs_run_command("bogus", "{}", nullptr, nullptr, &out), CS_ERR_CONFIG);
  EXPECT_NE(std::string(cs_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(cs_run_command("train", R"({"config":"/nonexistent/run.json"})", nullptr, nullptr, &out),
            CS_ERR_NOT_FOUND);
  EXPECT_EQ(cs_run_command(nullptr, "{}", nullptr, nullptr, &out), CS_ERR_INVALID_ARGUMENT);
  cs_model* m = nullptr;
  EXPECT_EQ(cs_model_load("/nonexistent", "/nonexistent", &m), CS_ERR_NOT_FOUND);
  EXPECT_EQ(m, nullptr);
}

TEST(CApiBasics, LastErrorIsPerThread) {
  EXPECT_EQ(cs_run_command("bogus", "{}", nullptr, nullptr, nullptr), CS_ERR_CONFIG);
  std::string other;
  std::thread t([&] { other = cs_last_error(); });
  t.join();
  EXPECT_TRUE(other.empty());
  EXPECT_FALSE(std::string(cs_last_error()).empty());
}

TEST(CApiBasics, EvaluateIdenticalGridsIsPerfect) {
  const int n = 4;
  std::vector<float> truth(2 * n * n, 0.0f);
  truth[3] = 0.7f;
  truth[5] = 1.2f;
  truth[16 + 9] = 0.4f;
  char* report = nullptr;
  ASSERT_EQ(cs_evaluate(truth.data(), truth.data(), 2, n, nullptr, &report), CS_OK) << cs_last_error();
  const json r = json::parse(report);
  cs_free_string(report);
  EXPECT_EQ(r["AMAE"].get<double>(), 0.0);
  EXPECT_EQ(r["DSC"].get<double>(), 1.0);
  EXPECT_EQ(r["Acc[0]"].get<double>(), 100.0);
  EXPECT_EQ(cs_evaluate(truth.data(), truth.data(), 0, n, nullptr, &report), CS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(cs_evaluate(truth.data(), truth.data(), 2, n, R"({"tol":1})", &report), CS_ERR_CONFIG);
}

TEST_F(CApi, ModelPredictAndInfo) {
  cs_model* m = nullptr;
  ASSERT_EQ(cs_model_load((dir() / "checkpoints/primary").c_str(), (dir() / "corpus").c_str(), &m), CS_OK)
      << cs_last_error();
  int n = 0;
  ASSERT_EQ(cs_model_grid_size(m, &n), CS_OK);
  EXPECT_EQ(n, 16);
  char* info = nullptr;
  ASSERT_EQ(cs_model_info(m, &info), CS_OK);
  const json j = json::parse(info);
  cs_free_string(info);
  EXPECT_EQ(j["olu_count"].get<int>(), 4);
  EXPECT_EQ(j["members"].get<int>(), 1);

  std::vector<float> a(256), b(256), heat(256);
  ASSERT_EQ(cs_model_predict(m, "1001_1.5", a.data(), a.size()), CS_OK) << cs_last_error();
  ASSERT_EQ(cs_model_predict(m, "1001_1.5", b.data(), b.size()), CS_OK);
  EXPECT_EQ(a, b);
  EXPECT_EQ(cs_model_predict(m, "1001_1.5", a.data(), 10), CS_ERR_SHAPE);
  EXPECT_EQ(cs_model_predict(m, "100_1.5", a.data(), a.size()), CS_ERR_LENGTH);
  EXPECT_EQ(cs_model_predict(m, "10x1_1.5", a.data(), a.size()), CS_ERR_PARSE);
  EXPECT_EQ(cs_model_uncertainty(m, "1001_1.5", a.data(), b.data(), 256), CS_ERR_CONFIG);
  ASSERT_EQ(cs_model_gradcam(m, "1001_1.5", nullptr, heat.data(), heat.size()), CS_OK) << cs_last_error();
  for (float v : heat) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_EQ(cs_model_gradcam(m, "1001_1.5", "zzz", heat.data(), heat.size()), CS_ERR_NOT_FOUND);

  std::vector<float> bad(256, 0.5f);
  EXPECT_EQ(cs_model_predict_grid(m, bad.data(), 1.0, a.data(), a.size()), CS_ERR_SHAPE);

  int status = 0;
  char* resp = nullptr;
  ASSERT_EQ(cs_model_request(m, R"({"scenario":"101","slr_m":1})", &status, &resp), CS_OK);
  EXPECT_EQ(status, 400);
  EXPECT_NE(std::string(resp).find("expected 4"), std::string::npos);
  cs_free_string(resp);
  cs_model_free(m);
}

TEST_F(CApi, ServerFromOptionsOnAnyPort) {
  const std::string opts = json{{"config", config()}, {"port", 0}}.dump();
  cs_server* s = nullptr;
  ASSERT_EQ(cs_server_start_from_options(opts.c_str(), &s), CS_OK) << cs_last_error();
  EXPECT_GT(cs_server_port(s), 0);
  cs_server_stop(s);
  EXPECT_EQ(cs_server_wait(s), CS_OK);
  cs_server_free(s);
  EXPECT_EQ(cs_server_start_from_options(R"({"colour":"red"})", &s), CS_ERR_CONFIG);
}

TEST_F(CApi, CliTrainTwiceWithSeedSevenIsIdentical) {
  const auto a = dir() / "cli_a";
  const auto b = dir() / "cli_b";
  auto r1 = run_cli("train --config " + config() + " --seed 7 -q -o " + a.string());
  ASSERT_EQ(r1.exit_code, 0) << r1.out;
  auto r2 = run_cli("--config " + config() + " --seed 7 -q train -o " + b.string());
  ASSERT_EQ(r2.exit_code, 0) << r2.out;
  for (const char* f : {"params.cstc", "config.json", "history.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(json::parse(r1.out)["parameter_count"], json::parse(r2.out)["parameter_count"]);
}

TEST_F(CApi, CliEvaluateIdenticalContainersReportsZeroAmae) {
  const auto test = (dir() / "corpus/samples/test").string();
  auto r = run_cli("evaluate -c " + config() + " -q --preds " + test + " --truths " + test + " -o " +
                   (dir() / "eval.json").string());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(json::parse(r.out)["AMAE"].get<double>(), 0.0);
  EXPECT_EQ(json::parse(slurp(dir() / "eval.json"))["AMAE"].get<double>(), 0.0);
}

TEST_F(CApi, CliExitCodes) {
  EXPECT_EQ(run_cli("--version").exit_code, 0);
  EXPECT_EQ(run_cli("").exit_code, 1);
  EXPECT_EQ(run_cli("train --no-such-flag").exit_code, 1);
  EXPECT_EQ(run_cli("train -c /nonexistent.json").exit_code, 1);
  std::ofstream(dir() / "bad.json") << R"({"model": {"depth": 3}})";
  EXPECT_EQ(run_cli("train -c " + (dir() / "bad.json").string()).exit_code, 1);
  EXPECT_EQ(run_cli("infer -c " + config() + " --checkpoint " + (dir() / "missing").string()).exit_code, 1);
  EXPECT_EQ(run_cli("preprocess -c " + config() + " -i " + dir().string() + " --split train").exit_code, 1);
}

}  // namespace

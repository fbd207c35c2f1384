#include "diot/diot.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using json = nlohmann::ordered_json;

namespace {

std::string temp_path(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "diot_capi_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("version and null-argument handling") {
  CHECK(std::string(diot_version()) == "1.0.0");
  CHECK(diot_experiment_create(nullptr, nullptr) == DIOT_ERR_CONFIG);
  diot_experiment* exp = nullptr;
  CHECK(diot_experiment_create("not json", &exp) == DIOT_ERR_CONFIG);
  CHECK(exp == nullptr);
  CHECK(std::string(diot_last_error()).size() > 0);
}

TEST_CASE("experiment lifecycle through opaque handles") {
  const char* spec = R"({
    "kind": "ot1",
    "config": {"n": 16, "l": 2, "seed": 400},
    "trials": 4
  })";
  diot_experiment* exp = nullptr;
  REQUIRE(diot_experiment_create(spec, &exp) == DIOT_OK);
  REQUIRE(exp != nullptr);
  CHECK(diot_experiment_summary(exp) == nullptr);  // not run yet
  CHECK(diot_experiment_run(exp) == DIOT_OK);
  const char* summary = diot_experiment_summary(exp);
  REQUIRE(summary != nullptr);
  auto j = json::parse(summary);
  CHECK(j["success_rate"].get<double>() == 1.0);
  CHECK(j["pass"].get<bool>());
  const char* report = diot_experiment_report(exp);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("\"type\":\"summary\"") != std::string::npos);
  diot_experiment_destroy(exp);
}

TEST_CASE("one-shot run with report file") {
  const auto out = temp_path("report.jsonl");
  const std::string spec = R"({
    "kind": "bounds_check",
    "config": {"seed": 11}
  })";
  CHECK(diot_run_experiment_json(spec.c_str(), out.c_str()) == DIOT_OK);
  std::ifstream in(out);
  CHECK(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(json::parse(first)["type"] == "config");
}

TEST_CASE("bad config surfaces as DIOT_ERR_CONFIG") {
  CHECK(diot_run_experiment_json(R"({"kind": "warp"})", nullptr) == DIOT_ERR_CONFIG);
  CHECK(diot_run_experiment_json(R"({"kind": "ot1", "config": {"n": 2, "l": 5}})", nullptr) ==
        DIOT_ERR_CONFIG);
}

TEST_CASE("transcript replay through the C interface") {
  const auto dir = temp_path("tr");
  std::filesystem::remove_all(dir);
  const std::string spec = std::string(R"({
    "kind": "ot1",
    "config": {"n": 12, "l": 2, "seed": 31},
    "trials": 1,
    "transcripts_dir": ")") + dir + "\"}";
  REQUIRE(diot_run_experiment_json(spec.c_str(), nullptr) == DIOT_OK);

  const std::string path = dir + "/trial_0.json";
  char verdict[256] = {0};
  CHECK(diot_replay_transcript(path.c_str(), verdict, sizeof(verdict)) == DIOT_OK);
  CHECK(std::string(verdict) == "ok");

  // Corrupt the file: format error.
  std::ofstream(path, std::ios::trunc) << "{";
  CHECK(diot_replay_transcript(path.c_str(), verdict, sizeof(verdict)) == DIOT_ERR_CONFIG);
  CHECK(diot_replay_transcript("/nonexistent/x.json", verdict, sizeof(verdict)) ==
        DIOT_ERR_CONFIG);
}

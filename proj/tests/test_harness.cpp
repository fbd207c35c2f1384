#include "diot/harness.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"

using namespace diot;
using namespace diot::harness;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "diot_harness_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("spec parsing and validation") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "ot1",
    "config": {"n": 16, "l": 2, "seed": 9},
    "trials": 3
  })"));
  CHECK(spec.kind == ExperimentKind::Ot1);
  CHECK(spec.config.n == 16);
  CHECK(spec.trials == 3);

  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"trials": 1})")), ConfigError);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"kind": "nope"})")), ConfigError);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"kind": "ot1", "trials": 0})")), ConfigError);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"kind": "ot1", "config": {"n": 4, "l": 9}})")),
                  ConfigError);
}

TEST_CASE("relation enforcement names the violated relation") {
  // gamma too large for the storage relation.
  auto j = json::parse(R"({
    "kind": "ot4",
    "config": {"n": 64, "l": 4, "gamma": 0.5, "enforce_relations": true}
  })");
  try {
    spec_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gamma*n <= n/4 - 2*l - k*n") != std::string::npos);
  }
}

TEST_CASE("ot1 experiment writes a deterministic report and passes") {
  const auto out = temp_dir() / "ot1.jsonl";
  auto spec = spec_from_json(json::parse(R"({
    "kind": "ot1",
    "config": {"n": 24, "l": 3, "seed": 5},
    "trials": 8
  })"));
  spec.out_path = out.string();
  auto r1 = run_experiment(spec);
  CHECK(r1.pass);
  CHECK(r1.summary["success_rate"].get<double>() == 1.0);
  auto r2 = run_experiment(spec);
  CHECK(r1.report == r2.report);  // byte-identical reruns

  std::ifstream in(out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    auto j = json::parse(line);
    CHECK(j.contains("type"));
  }
  CHECK(lines == 1 + 8 + 1);  // header, trials, summary

  // The header echoes the fully resolved config.
  std::ifstream in2(out);
  std::getline(in2, line);
  auto header = json::parse(line);
  for (const char* key : {"n", "l", "gamma", "lambda", "lambda_prime", "kappa", "tau",
                          "n_estimation", "domain_bits", "r", "threshold", "override_prob",
                          "seed", "enforce_relations"})
    CHECK(header["spec"]["config"].contains(key));
}

TEST_CASE("estimate_delta coverage experiment") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "estimate_delta",
    "config": {"n_estimation": 400, "tau": 0.05, "seed": 2},
    "trials": 40,
    "synthetic_failure_rate": 0.2
  })"));
  auto res = run_experiment(spec);
  CHECK(res.pass);
  CHECK(res.summary["coverage"].get<double>() >= res.summary["confidence_target"].get<double>());
}

TEST_CASE("bounds_check experiment is clean") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "bounds_check",
    "config": {"seed": 77}
  })"));
  auto res = run_experiment(spec);
  CHECK(res.pass);
  CHECK(res.summary["chain_rule"]["violations"].get<int>() == 0);
  CHECK(res.summary["splitting"]["violations"].get<int>() == 0);
}

TEST_CASE("ot4 experiment with a cheating device fails honest assertions but reports abort") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "ot4",
    "config": {"n": 192, "l": 2, "domain_bits": 3, "threshold": 0.05, "seed": 3},
    "trials": 4,
    "device": "image_honest_bell_random",
    "min_abort_rate": 0.99
  })"));
  auto res = run_experiment(spec);
  CHECK(res.summary["abort_rate"].get<double>() == 1.0);
  CHECK(res.pass);
}

TEST_CASE("transcript replay round-trips and detects tampering") {
  const auto dir = temp_dir() / "transcripts";
  std::filesystem::remove_all(dir);

  auto spec = spec_from_json(json::parse(R"({
    "kind": "ot1",
    "config": {"n": 16, "l": 3, "seed": 21},
    "trials": 1
  })"));
  spec.transcripts_dir = dir.string();
  REQUIRE(run_experiment(spec).pass);
  const auto path = dir / "trial_0.json";
  REQUIRE(std::filesystem::exists(path));

  auto res = replay_transcript_file(path.string());
  CHECK(res.ok);

  // Flip one a-bit: the recomputed hash outputs must diverge.
  std::ifstream in(path);
  json j;
  in >> j;
  std::string a_hex = j["private"]["sender"]["a"].get<std::string>();
  auto a_bits = diot::bits::from_hex(a_hex);
  a_bits[0] ^= 1;
  j["private"]["sender"]["a"] = diot::bits::to_hex(a_bits);
  auto tampered = replay_transcript_json(j);
  CHECK_FALSE(tampered.ok);
  CHECK(tampered.divergent_field.substr(0, 9) == "outcome.s");

  // Truncated file: parse error.
  const auto broken = dir / "broken.json";
  std::ofstream(broken) << "{\"version\": 1, \"protocol\"";
  CHECK_THROWS_AS(replay_transcript_file(broken.string()), ConfigError);
}

TEST_CASE("ot4 transcript replay") {
  const auto dir = temp_dir() / "transcripts4";
  std::filesystem::remove_all(dir);
  auto spec = spec_from_json(json::parse(R"({
    "kind": "ot4",
    "config": {"n": 96, "l": 2, "domain_bits": 3, "threshold": 0.05, "seed": 8},
    "trials": 1
  })"));
  spec.transcripts_dir = dir.string();
  REQUIRE(run_experiment(spec).pass);
  auto res = replay_transcript_file((dir / "trial_0.json").string());
  CHECK(res.ok);

  // Tamper with a published verdict input: flip one bit of a type-a preimage
  // response. Any flip breaks the image check, so the recomputed failure
  // fraction must diverge.
  std::ifstream in(dir / "trial_0.json");
  json j;
  in >> j;
  bool flipped = false;
  for (auto& rp : j["private"]["receiver"]["rounds"]) {
    if (rp.contains("z_b") && rp["override"].get<bool>() == false) {
      auto z = diot::bits::from_hex(rp["z_b"].get<std::string>());
      z[0] ^= 1;
      rp["z_b"] = diot::bits::to_hex(z);
      flipped = true;
      break;
    }
  }
  REQUIRE(flipped);
  auto tampered = replay_transcript_json(j);
  CHECK_FALSE(tampered.ok);
  CHECK(tampered.divergent_field == "abort_decision.failed_fraction");
}

TEST_CASE("attack experiment kinds run through the harness") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "attack",
    "attack": "unbounded_ot1",
    "config": {"n": 24, "l": 3, "seed": 4},
    "trials": 10
  })"));
  auto res = run_experiment(spec);
  CHECK(res.pass);
  CHECK(res.summary["both_strings"]["value"].get<double>() == 1.0);
  CHECK(res.summary["relations"].contains("storage_relation_ok"));

  auto tv = run_experiment(spec_from_json(json::parse(R"({
    "kind": "attack",
    "attack": "receiver_security_tv",
    "config": {"n": 6, "l": 2, "seed": 4}
  })")));
  CHECK(tv.pass);
  CHECK(tv.summary["ot1_tv"].get<double>() == 0.0);
}

TEST_CASE("honest estimate_delta through the harness reports zero failures") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "estimate_delta",
    "config": {"n_estimation": 60, "tau": 0.05, "domain_bits": 3, "seed": 6},
    "trials": 2
  })"));
  auto res = run_experiment(spec);
  CHECK(res.pass);
  CHECK(res.summary["mean_delta_prime"].get<double>() == 0.0);
}

TEST_CASE("ot4 summary carries the relation diagnostics") {
  auto spec = spec_from_json(json::parse(R"({
    "kind": "ot4",
    "config": {"n": 96, "l": 2, "domain_bits": 3, "threshold": 0.04, "r": 2.0, "seed": 12},
    "trials": 2
  })"));
  auto res = run_experiment(spec);
  CHECK(res.summary["threshold_power_r"].get<double>() == doctest::Approx(0.0016));
  CHECK(res.summary["relations"].contains("storage_relation_ok"));
}

// Command-line front end. Talks to the simulator exclusively through the C
// shared-library interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "diot/diot.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

int status_to_exit_code(diot_status st) {
  switch (st) {
    case DIOT_OK: return 0;
    case DIOT_ERR_ASSERTION: return 1;
    default: return 2;
  }
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string transcripts_dir;
  std::int64_t seed = -1;
  int trials = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config JSON file");
  cmd->add_option("--out", opts.out_path, "report output path (JSON lines)");
  cmd->add_option("--transcripts", opts.transcripts_dir, "directory for per-trial transcripts");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--trials", opts.trials, "override the trial count");
}

int run_kind(const std::string& kind, const CommonOpts& opts) {
  json spec;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) {
      std::cerr << "error: cannot open config file " << opts.config_path << "\n";
      return 2;
    }
    try {
      in >> spec;
    } catch (const std::exception& e) {
      std::cerr << "error: config parse: " << e.what() << "\n";
      return 2;
    }
  }
  spec["kind"] = kind;
  if (!spec.contains("config")) spec["config"] = json::object();
  if (opts.seed >= 0) spec["config"]["seed"] = opts.seed;
  if (opts.trials >= 0) spec["trials"] = opts.trials;
  if (!opts.out_path.empty()) spec["out"] = opts.out_path;
  if (!opts.transcripts_dir.empty()) spec["transcripts_dir"] = opts.transcripts_dir;

  diot_experiment* exp = nullptr;
  diot_status st = diot_experiment_create(spec.dump().c_str(), &exp);
  if (st != DIOT_OK) {
    std::cerr << "error: " << diot_last_error() << "\n";
    return status_to_exit_code(st);
  }
  st = diot_experiment_run(exp);
  if (const char* summary = diot_experiment_summary(exp)) std::cout << summary << "\n";
  if (st != DIOT_OK) std::cerr << "error: " << diot_last_error() << "\n";
  diot_experiment_destroy(exp);
  return status_to_exit_code(st);
}

int run_replay(const std::string& path) {
  char verdict[512] = {0};
  const diot_status st = diot_replay_transcript(path.c_str(), verdict, sizeof(verdict));
  std::cout << (st == DIOT_OK ? "ok" : verdict) << "\n";
  return status_to_exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"device-independent oblivious-transfer experiment runner"};
  app.set_version_flag("--version", std::string(diot_version()));
  app.require_subcommand(0, 1);

  std::string root_replay;
  app.add_option("--replay", root_replay, "replay a transcript file and exit");

  const char* kinds[] = {"ot1", "selftest", "estimate_delta", "ot4", "attack", "bounds_check"};
  const char* blurbs[] = {"direct protocol runs",
                          "single self-test rounds",
                          "failure-rate estimation",
                          "composed device-independent protocol runs",
                          "adversary experiments",
                          "numeric bound suites"};
  CommonOpts opts[6];
  CLI::App* cmds[6];
  for (int i = 0; i < 6; ++i) {
    cmds[i] = app.add_subcommand(kinds[i], blurbs[i]);
    add_common(cmds[i], opts[i]);
  }
  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "verify a persisted transcript");
  replay_cmd->add_option("path", replay_path, "transcript JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (!root_replay.empty()) return run_replay(root_replay);
  if (replay_cmd->parsed()) return run_replay(replay_path);
  for (int i = 0; i < 6; ++i)
    if (cmds[i]->parsed()) return run_kind(kinds[i], opts[i]);

  std::cout << app.help() << "\n";
  return 0;
}

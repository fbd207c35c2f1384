#include "diot/diot.h"

#include <cstring>
#include <functional>
#include <string>

#include "diot/harness.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

diot_status guard(const std::function<diot_status()>& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const diot::harness::ConfigError& e) {
    set_error(e.what());
    return DIOT_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return DIOT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return DIOT_ERR_INTERNAL;
  }
}

}  // namespace

struct diot_experiment {
  diot::harness::ExperimentSpec spec;
  std::string summary;
  std::string report;
  bool ran = false;
};

extern "C" {

const char* diot_version(void) { return "1.0.0"; }

const char* diot_last_error(void) { return g_last_error.c_str(); }

diot_status diot_experiment_create(const char* spec_json, diot_experiment** out) {
  if (!spec_json || !out) {
    set_error("null argument");
    return DIOT_ERR_CONFIG;
  }
  *out = nullptr;
  return guard([&]() -> diot_status {
    diot::harness::json j;
    try {
      j = diot::harness::json::parse(spec_json);
    } catch (const std::exception& e) {
      set_error(std::string("spec parse: ") + e.what());
      return DIOT_ERR_CONFIG;
    }
    auto exp = std::make_unique<diot_experiment>();
    exp->spec = diot::harness::spec_from_json(j);
    *out = exp.release();
    return DIOT_OK;
  });
}

diot_status diot_experiment_run(diot_experiment* exp) {
  if (!exp) {
    set_error("null handle");
    return DIOT_ERR_CONFIG;
  }
  return guard([&]() -> diot_status {
    auto res = diot::harness::run_experiment(exp->spec);
    exp->summary = res.summary.dump();
    exp->report = res.report;
    exp->ran = true;
    if (!res.pass) {
      set_error("experiment assertions failed");
      return DIOT_ERR_ASSERTION;
    }
    return DIOT_OK;
  });
}

const char* diot_experiment_summary(const diot_experiment* exp) {
  return (exp && exp->ran) ? exp->summary.c_str() : nullptr;
}

const char* diot_experiment_report(const diot_experiment* exp) {
  return (exp && exp->ran) ? exp->report.c_str() : nullptr;
}

void diot_experiment_destroy(diot_experiment* exp) { delete exp; }

diot_status diot_run_experiment_json(const char* spec_json, const char* out_path) {
  diot_experiment* exp = nullptr;
  diot_status st = diot_experiment_create(spec_json, &exp);
  if (st != DIOT_OK) return st;
  if (out_path) exp->spec.out_path = out_path;
  st = diot_experiment_run(exp);
  diot_experiment_destroy(exp);
  return st;
}

diot_status diot_replay_transcript(const char* path, char* verdict_buf, size_t buf_len) {
  if (!path) {
    set_error("null path");
    return DIOT_ERR_CONFIG;
  }
  diot_status status = DIOT_OK;
  std::string verdict;
  const diot_status guarded = guard([&]() -> diot_status {
    auto res = diot::harness::replay_transcript_file(path);
    if (res.ok) {
      verdict = res.message;
      return DIOT_OK;
    }
    verdict = "mismatch at " + res.divergent_field + ": " + res.message;
    set_error(verdict);
    return DIOT_ERR_ASSERTION;
  });
  status = guarded;
  if (verdict_buf && buf_len > 0) {
    const std::string& text = verdict.empty() ? g_last_error : verdict;
    std::strncpy(verdict_buf, text.c_str(), buf_len - 1);
    verdict_buf[buf_len - 1] = '\0';
  }
  return status;
}

}  // extern "C"

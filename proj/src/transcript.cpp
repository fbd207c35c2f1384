#include "diot/transcript.hpp"

#include <stdexcept>

#include "diot/protocol.hpp"

namespace diot::proto {

void Transcript::add(std::string step, std::string from, std::string to, int round, json payload) {
  messages.push_back({std::move(step), std::move(from), std::move(to), round, std::move(payload)});
}

json Transcript::to_json() const {
  json j;
  j["version"] = kTranscriptVersion;
  j["protocol"] = protocol;
  j["config"] = config;
  json msgs = json::array();
  for (const auto& m : messages) {
    json jm;
    jm["step"] = m.step;
    jm["from"] = m.from;
    jm["to"] = m.to;
    jm["round"] = m.round;
    jm["payload"] = m.payload;
    msgs.push_back(std::move(jm));
  }
  j["messages"] = std::move(msgs);
  j["private"] = private_data;
  j["leakage"] = leakage;
  j["outcome"] = outcome;
  return j;
}

Transcript Transcript::from_json(const json& j) {
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw std::invalid_argument("transcript: missing version");
  if (j["version"].get<int>() != kTranscriptVersion)
    throw std::invalid_argument("transcript: unsupported version");
  Transcript t;
  t.protocol = j.at("protocol").get<std::string>();
  t.config = j.at("config");
  for (const auto& jm : j.at("messages")) {
    Message m;
    m.step = jm.at("step").get<std::string>();
    m.from = jm.at("from").get<std::string>();
    m.to = jm.at("to").get<std::string>();
    m.round = jm.at("round").get<int>();
    m.payload = jm.at("payload");
    t.messages.push_back(std::move(m));
  }
  t.private_data = j.at("private");
  for (const auto& e : j.at("leakage")) t.leakage.push_back(e);
  t.outcome = j.at("outcome");
  return t;
}

std::string Transcript::dump() const { return to_json().dump(2) + "\n"; }

std::vector<const Message*> Transcript::visible_to(const std::string& party) const {
  std::vector<const Message*> out;
  for (const auto& m : messages)
    if (m.from == party || m.to == party || m.to == "public") out.push_back(&m);
  return out;
}

// --- Config and relation checks ---------------------------------------------

RelationCheck check_parameter_relations(const ProtocolConfig& cfg, int rounds) {
  RelationCheck rc;
  const double n = rounds;
  rc.storage_slack = n / 4.0 - 2.0 * cfg.l - cfg.gamma * n;
  rc.storage_relation_ok = rc.storage_slack > 0.0;
  rc.parameter_slack =
      (0.25 - cfg.lambda - 2.0 * cfg.lambda_prime - cfg.kappa) * n - 2.0 * cfg.l - 1.0 -
      cfg.gamma * n;
  rc.parameter_relation_ok = rc.parameter_slack >= 0.0;
  if (!rc.storage_relation_ok)
    rc.violated = "gamma*n <= n/4 - 2*l - k*n";
  else if (!rc.parameter_relation_ok)
    rc.violated = "gamma*n <= (1/4 - lambda - 2*lambda' - kappa)*n - 2*l - 1";
  return rc;
}

json config_to_json(const ProtocolConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["l"] = cfg.l;
  j["gamma"] = cfg.gamma;
  j["lambda"] = cfg.lambda;
  j["lambda_prime"] = cfg.lambda_prime;
  j["kappa"] = cfg.kappa;
  j["tau"] = cfg.tau;
  j["n_estimation"] = cfg.n_estimation;
  j["domain_bits"] = cfg.domain_bits;
  j["r"] = cfg.r;
  j["threshold"] = cfg.threshold;
  j["override_prob"] = cfg.override_prob;
  j["seed"] = cfg.seed;
  j["enforce_relations"] = cfg.enforce_relations;
  return j;
}

ProtocolConfig config_from_json(const json& j) {
  ProtocolConfig cfg;
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("l")) cfg.l = j["l"].get<int>();
  if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("lambda_prime")) cfg.lambda_prime = j["lambda_prime"].get<double>();
  if (j.contains("kappa")) cfg.kappa = j["kappa"].get<double>();
  if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
  if (j.contains("n_estimation")) cfg.n_estimation = j["n_estimation"].get<int>();
  if (j.contains("domain_bits")) cfg.domain_bits = j["domain_bits"].get<int>();
  if (j.contains("r")) cfg.r = j["r"].get<double>();
  if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
  if (j.contains("override_prob")) cfg.override_prob = j["override_prob"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("enforce_relations")) cfg.enforce_relations = j["enforce_relations"].get<bool>();
  if (cfg.n < 1 || cfg.l < 1 || cfg.l > cfg.n) throw std::invalid_argument("config: need 1 <= l <= n");
  if (cfg.override_prob < 0.0 || cfg.override_prob > 1.0)
    throw std::invalid_argument("config: override_prob outside [0, 1]");
  return cfg;
}

ChallengeType RoundRecord::ct() const {
  if (ct_a != ct_b) throw std::logic_error("RoundRecord::ct: per-side challenge types differ");
  return ct_a;
}

RoundType classify_round(const RoundRecord& record) {
  if (record.ct() == ChallengeType::B && record.theta_a == qsim::Basis::Hadamard &&
      record.theta_b == qsim::Basis::Hadamard)
    return RoundType::Bell;
  return RoundType::Product;
}

}  // namespace diot::proto

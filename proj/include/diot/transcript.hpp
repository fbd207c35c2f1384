#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace diot::proto {

using json = nlohmann::ordered_json;

constexpr int kTranscriptVersion = 1;

// One protocol message. `to` is the addressee ("sender", "receiver",
// "device_a", "device_b", or "public"); a party sees a message when it sent
// it, received it, or the message was public.
struct Message {
  std::string step;
  std::string from;
  std::string to;
  int round = -1;  // -1 for batch messages outside any round
  json payload;
};

struct ProtocolConfig;

struct Transcript {
  std::string protocol;
  json config;
  std::vector<Message> messages;
  json private_data;  // per-party stored values needed for replay
  json outcome;
  std::vector<json> leakage;  // cross-component device traffic; empty when honest

  void add(std::string step, std::string from, std::string to, int round, json payload);

  json to_json() const;
  static Transcript from_json(const json& j);
  std::string dump() const;  // deterministic serialization

  // Messages visible to one party, in order.
  std::vector<const Message*> visible_to(const std::string& party) const;
};

// Full round-trip for the scalar parameter block; every field explicit.
json config_to_json(const ProtocolConfig& cfg);
ProtocolConfig config_from_json(const json& j);

}  // namespace diot::proto

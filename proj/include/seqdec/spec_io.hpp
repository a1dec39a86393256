#pragma once

// Channel spec documents (JSON) and experiment configuration.

#include "seqdec/channels.hpp"
#include "seqdec/decoders.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <variant>

namespace seqdec {

inline constexpr const char* kToolVersion = "seqdec 0.1.0";
inline constexpr const char* kSpecFormat = "seqdec-channel/1";

// Parse or validation failure; line and column are 1-based (0 if unknown)
// and field is a JSON pointer into the document.
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& message, std::string field, int line, int column);
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_, field_;
  int line_, column_;
};

using ChannelModel = std::variant<CqChannel, MacChannel, CmgChannel, IcChannel>;

struct ChannelSpec {
  std::string kind;  // cq | ccq-mac | cmg-mac | ccqq-ic
  std::map<std::string, std::vector<std::string>> alphabets;
  ChannelModel model;

  // Number of rates a simulation takes: 1, 2, 3 or 4.
  int rate_count() const;
};

// Systems whose alphabets the kind requires, and those the states depend on.
std::vector<std::string> spec_systems(const std::string& kind);
std::vector<std::string> spec_state_systems(const std::string& kind);

ChannelSpec parse_channel_spec(const std::string& text);
ChannelSpec load_channel_spec(const std::string& path);
// Canonical form: product distributions, states nested by symbol name.
std::string serialize_channel_spec(const ChannelSpec& spec);
// Exact equality of kinds, alphabets and all model numbers.
bool same_model(const ChannelSpec& a, const ChannelSpec& b);

struct ExperimentConfig {
  int n = 4;
  double delta = 0.1;
  std::optional<double> epsilon;  // theoretical epsilon for tau
  std::vector<double> rates;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  Variant variant = Variant::Sequential;
  int region = 1;
  MessageOrder order;
  std::string out;

  // Throws std::invalid_argument naming the first out-of-range field.
  void validate(int rate_count) const;
};

}  // namespace seqdec

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace securescan {

enum class RuleKind { IpHost, LongHost, BadTld, Keyword, BadExtension, Obfuscation, Substring };

/// One weighted lexical check. Which of the parameter fields matter depends
/// on `kind`.
struct HeuristicRule {
  std::string id;
  std::string description;
  int weight = 1;
  RuleKind kind = RuleKind::Substring;

  std::size_t max_host_length = 75;      // LongHost
  std::size_t max_host_labels = 4;       // LongHost
  std::size_t max_percent_escapes = 3;   // Obfuscation
  std::vector<std::string> patterns;     // TLDs, keywords, extensions or substrings

  bool matches(std::string_view normalized, std::string_view host, std::string_view path) const;
};

class RuleSet {
 public:
  /// Throws InvalidArgument on duplicate ids or weight < 1.
  explicit RuleSet(std::vector<HeuristicRule> rules);

  static RuleSet defaults();

  /// Config entry shape: {"id": ..., "kind": ..., "weight": ..., "patterns": [...], ...}.
  /// "kind" defaults to the id for the built-in rule names.
  static RuleSet from_json(const nlohmann::json& rules);
  nlohmann::json to_json() const;

  const std::vector<HeuristicRule>& rules() const { return rules_; }

 private:
  std::vector<HeuristicRule> rules_;
};

enum class HeuristicDecision { Pass, Reject };

struct HeuristicOutcome {
  std::vector<std::string> triggered;  // sorted by id
  int score = 0;
  HeuristicDecision decision = HeuristicDecision::Pass;
};

inline constexpr int kDefaultRejectThreshold = 3;

/// A URL whose host cannot be isolated rejects with the single rule id
/// "malformed" regardless of the threshold.
HeuristicOutcome evaluate_rules(std::string_view normalized, const RuleSet& rules,
                                int reject_threshold = kDefaultRejectThreshold);

bool is_ipv4_literal(std::string_view host);

}  // namespace securescan

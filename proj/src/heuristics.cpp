#include "securescan/heuristics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include <json.hpp>

#include "securescan/corpus.hpp"
#include "securescan/error.hpp"

namespace securescan {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::size_t count_percent_escapes(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 2 < s.size(); ++i) {
    if (s[i] == '%' && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      ++n;
      i += 2;
    }
  }
  return n;
}

struct KindName {
  RuleKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {RuleKind::IpHost, "ip_host"},         {RuleKind::LongHost, "long_host"},
    {RuleKind::BadTld, "bad_tld"},         {RuleKind::Keyword, "phish_keyword"},
    {RuleKind::BadExtension, "bad_ext"},   {RuleKind::Obfuscation, "obfuscation"},
    {RuleKind::Substring, "substring"},
};

RuleKind kind_from_name(std::string_view name) {
  for (const auto& k : kKindNames)
    if (k.name == name) return k.kind;
  throw Error(ErrorKind::InvalidArgument, "unknown rule kind '" + std::string(name) + "'");
}

std::string_view kind_name(RuleKind kind) {
  for (const auto& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "substring";
}

}  // namespace

bool is_ipv4_literal(std::string_view host) {
  int parts = 0;
  std::size_t start = 0;
  while (true) {
    auto dot = host.find('.', start);
    std::string_view part = host.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (part.empty() || part.size() > 3) return false;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size() || value > 255) return false;
    ++parts;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts == 4;
}

bool HeuristicRule::matches(std::string_view normalized, std::string_view host,
                            std::string_view path) const {
  switch (kind) {
    case RuleKind::IpHost:
      return is_ipv4_literal(host) || (host.size() > 2 && host.front() == '[' && host.back() == ']');
    case RuleKind::LongHost: {
      auto labels = static_cast<std::size_t>(std::count(host.begin(), host.end(), '.')) + 1;
      return host.size() > max_host_length || labels > max_host_labels;
    }
    case RuleKind::BadTld: {
      auto dot = host.rfind('.');
      if (dot == std::string_view::npos) return false;
      std::string_view tld = host.substr(dot + 1);
      return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
        std::string_view want = p;
        if (!want.empty() && want.front() == '.') want.remove_prefix(1);
        return tld == want;
      });
    }
    case RuleKind::Keyword:
      return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
        return host.find(p) != std::string_view::npos || path.find(p) != std::string_view::npos;
      });
    case RuleKind::BadExtension:
      return std::any_of(patterns.begin(), patterns.end(),
                         [&](const std::string& p) { return ends_with(path, p); });
    case RuleKind::Obfuscation:
      return count_percent_escapes(normalized) > max_percent_escapes ||
             normalized.find('@') != std::string_view::npos ||
             path.find("//") != std::string_view::npos;
    case RuleKind::Substring:
      return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
        return normalized.find(p) != std::string_view::npos;
      });
  }
  return false;
}

RuleSet::RuleSet(std::vector<HeuristicRule> rules) : rules_(std::move(rules)) {
  std::set<std::string> ids;
  for (const auto& r : rules_) {
    if (r.id.empty()) throw Error(ErrorKind::InvalidArgument, "rule id must be non-empty");
    if (r.weight < 1) throw Error(ErrorKind::InvalidArgument, "rule '" + r.id + "' weight must be >= 1");
    if (!ids.insert(r.id).second) throw Error(ErrorKind::InvalidArgument, "duplicate rule id '" + r.id + "'");
  }
  std::sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
}

RuleSet RuleSet::defaults() {
  std::vector<HeuristicRule> r(6);
  r[0].id = "ip_host";
  r[0].kind = RuleKind::IpHost;
  r[0].weight = 2;
  r[0].description = "host is an IPv4 dotted quad or bracketed IPv6 literal";

  r[1].id = "long_host";
  r[1].kind = RuleKind::LongHost;
  r[1].description = "hostname longer than 75 chars or more than 4 labels";

  r[2].id = "bad_tld";
  r[2].kind = RuleKind::BadTld;
  r[2].patterns = {"zip", "work", "review"};
  r[2].description = "abused top-level domain";

  r[3].id = "phish_keyword";
  r[3].kind = RuleKind::Keyword;
  r[3].patterns = {"paypal", "login", "verify", "secure", "update", "account", "signin", "bank"};
  r[3].description = "brand or credential keyword in host or path";

  r[4].id = "bad_ext";
  r[4].kind = RuleKind::BadExtension;
  r[4].patterns = {".php", ".asp", ".exe", ".sh"};
  r[4].description = "path ends in a script or executable extension";

  r[5].id = "obfuscation";
  r[5].kind = RuleKind::Obfuscation;
  r[5].description = "more than 3 percent escapes, '@', or '//' inside the path";
  return RuleSet(std::move(r));
}

RuleSet RuleSet::from_json(const nlohmann::json& rules) {
  if (!rules.is_array()) throw Error(ErrorKind::InvalidArgument, "rules must be an array");
  std::vector<HeuristicRule> out;
  for (const auto& entry : rules) {
    HeuristicRule r;
    r.id = entry.at("id").get<std::string>();
    r.kind = kind_from_name(entry.value("kind", r.id));
    r.weight = entry.value("weight", 1);
    r.description = entry.value("description", "");
    r.max_host_length = entry.value("max_host_length", r.max_host_length);
    r.max_host_labels = entry.value("max_host_labels", r.max_host_labels);
    r.max_percent_escapes = entry.value("max_percent_escapes", r.max_percent_escapes);
    if (entry.contains("patterns")) r.patterns = entry.at("patterns").get<std::vector<std::string>>();
    for (auto& p : r.patterns)
      std::transform(p.begin(), p.end(), p.begin(), [](unsigned char c) { return std::tolower(c); });
    out.push_back(std::move(r));
  }
  return RuleSet(std::move(out));
}

nlohmann::json RuleSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rules_) {
    arr.push_back({{"id", r.id},
                   {"kind", kind_name(r.kind)},
                   {"weight", r.weight},
                   {"description", r.description},
                   {"max_host_length", r.max_host_length},
                   {"max_host_labels", r.max_host_labels},
                   {"max_percent_escapes", r.max_percent_escapes},
                   {"patterns", r.patterns}});
  }
  return arr;
}

HeuristicOutcome evaluate_rules(std::string_view normalized, const RuleSet& rules, int reject_threshold) {
  HeuristicOutcome out;
  std::string host;
  try {
    host = extract_host(normalized);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MalformedUrl) throw;
    out.triggered = {"malformed"};
    out.decision = HeuristicDecision::Reject;
    return out;
  }
  std::string_view path = extract_path(normalized);
  for (const auto& rule : rules.rules()) {
    if (rule.matches(normalized, host, path)) {
      out.triggered.push_back(rule.id);
      out.score += rule.weight;
    }
  }
  out.decision = out.score >= reject_threshold ? HeuristicDecision::Reject : HeuristicDecision::Pass;
  return out;
}

}  // namespace securescan

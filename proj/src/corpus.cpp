#include "securescan/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "securescan/error.hpp"

namespace securescan {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  });
}

std::size_t authority_end(std::string_view s) {
  auto p = s.find_first_of("/?#");
  return p == std::string_view::npos ? s.size() : p;
}

bool valid_host_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '%' || c == '~';
}

std::string strip_tracking(std::string_view query, const TrackingDenyList& deny) {
  std::string kept;
  std::size_t start = 0;
  while (start <= query.size()) {
    auto amp = query.find('&', start);
    if (amp == std::string_view::npos) amp = query.size();
    std::string_view param = query.substr(start, amp - start);
    if (!param.empty()) {
      std::string_view key = param.substr(0, param.find('='));
      if (!deny.matches(key)) {
        if (!kept.empty()) kept += '&';
        kept += param;
      }
    }
    start = amp + 1;
  }
  return kept;
}

std::optional<Label> parse_label(std::string_view field) {
  std::string l = lower(trim(field));
  if (l == "0" || l == "benign") return Label::Benign;
  if (l == "1" || l == "malicious") return Label::Malicious;
  return std::nullopt;
}

}  // namespace

bool TrackingDenyList::matches(std::string_view key) const {
  for (const auto& k : keys) {
    if (!k.empty() && k.back() == '*') {
      if (key.substr(0, k.size() - 1) == std::string_view(k).substr(0, k.size() - 1)) return true;
    } else if (key == k) {
      return true;
    }
  }
  return false;
}

std::string extract_host(std::string_view normalized) {
  std::string_view authority = normalized.substr(0, authority_end(normalized));
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);

  std::string_view host;
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) throw Error(ErrorKind::MalformedUrl, "unterminated IPv6 literal");
    host = authority.substr(0, close + 1);
    std::string_view inner = host.substr(1, host.size() - 2);
    bool ok = !inner.empty() && std::all_of(inner.begin(), inner.end(), [](char c) {
      return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.';
    });
    if (!ok) throw Error(ErrorKind::MalformedUrl, "invalid IPv6 literal");
    return std::string(host);
  }
  host = authority;
  if (auto colon = host.rfind(':'); colon != std::string_view::npos) host = host.substr(0, colon);
  if (host.empty()) throw Error(ErrorKind::MalformedUrl, "no host component");
  if (!std::all_of(host.begin(), host.end(), valid_host_char))
    throw Error(ErrorKind::MalformedUrl, "invalid character in host '" + std::string(host) + "'");
  return std::string(host);
}

std::string_view extract_path(std::string_view normalized) {
  auto start = authority_end(normalized);
  if (start >= normalized.size() || normalized[start] != '/') return {};
  auto end = normalized.find_first_of("?#", start);
  if (end == std::string_view::npos) end = normalized.size();
  return normalized.substr(start, end - start);
}

NormalizedUrl normalize_url(std::string_view raw, const TrackingDenyList& deny) {
  std::string_view trimmed = trim(raw);
  if (trimmed.empty()) throw Error(ErrorKind::EmptyInput, "empty URL");

  NormalizedUrl out;
  std::string s = lower(trimmed);
  if (auto sep = s.find("://"); sep != std::string::npos && valid_scheme(std::string_view(s).substr(0, sep))) {
    out.https_present = s.compare(0, sep, "https") == 0;
    s.erase(0, sep + 3);
  }

  std::string fragment;
  if (auto hash = s.find('#'); hash != std::string::npos) {
    fragment = s.substr(hash);
    s.resize(hash);
  }
  if (auto q = s.find('?'); q != std::string::npos) {
    std::string kept = strip_tracking(std::string_view(s).substr(q + 1), deny);
    s.resize(q);
    if (!kept.empty()) s += '?' + kept;
  }
  s += fragment;

  extract_host(s);
  out.text = std::move(s);
  return out;
}

CorpusLoad parse_corpus(std::string_view contents, std::string_view source_name,
                        const TrackingDenyList& deny) {
  CorpusLoad result;
  std::unordered_map<std::string, Label> seen;
  std::size_t row = 0;
  bool first_data_row = true;

  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    auto delim = line.find_last_of(",\t");
    if (delim == std::string_view::npos) {
      throw Error(ErrorKind::ParseError, std::string(source_name) + " row " + std::to_string(row) +
                                             ": expected url,label");
    }
    auto label = parse_label(line.substr(delim + 1));
    if (!label) {
      if (first_data_row) {  // header
        first_data_row = false;
        continue;
      }
      throw Error(ErrorKind::ParseError, std::string(source_name) + " row " + std::to_string(row) +
                                             ": bad label '" + std::string(trim(line.substr(delim + 1))) + "'");
    }
    first_data_row = false;

    NormalizedUrl url;
    try {
      url = normalize_url(line.substr(0, delim), deny);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError,
                  std::string(source_name) + " row " + std::to_string(row) + ": " + e.what());
    }

    auto [it, inserted] = seen.try_emplace(url.text, *label);
    if (!inserted) {
      if (it->second == *label) ++result.duplicates;
      else ++result.label_conflicts;
      continue;
    }
    ++result.class_counts[to_int(*label)];
    result.samples.push_back(
        {std::move(url.text), *label, std::string(source_name) + ":" + std::to_string(row)});
  }
  if (result.samples.empty()) throw Error(ErrorKind::EmptyCorpus, std::string(source_name) + " has no valid rows");
  return result;
}

CorpusLoad load_corpus(const std::filesystem::path& path, const TrackingDenyList& deny) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), path.filename().string(), deny);
}

void write_corpus(const std::filesystem::path& path, const std::vector<LabeledSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write corpus " + path.string());
  out << "url,label\n";
  for (const auto& s : samples) out << s.text << ',' << to_int(s.label) << '\n';
}

std::vector<std::string> default_augment_suffixes() {
  return {"/index.html", "/verify/login", "/account/update", "/secure"};
}

std::vector<std::string> load_suffixes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open suffix file " + path.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "suffix file " + path.string() + " is empty");
  return out;
}

std::vector<LabeledSample> augment(const std::vector<LabeledSample>& samples,
                                   const std::vector<std::string>& suffixes, double rate,
                                   std::uint64_t seed) {
  if (rate < 0.0 || !std::isfinite(rate)) throw Error(ErrorKind::InvalidArgument, "augmentation rate must be >= 0");
  if (suffixes.empty()) throw Error(ErrorKind::InvalidArgument, "augmentation needs at least one suffix");

  std::vector<LabeledSample> out = samples;
  const std::size_t n = samples.size();
  const auto picks = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
  if (n == 0 || picks == 0) return out;
  out.reserve(n + picks);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < picks; ++i) {
    if (i % n == 0) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
    }
    const LabeledSample& parent = samples[order[i % n]];
    const std::string& suffix = suffixes[rng() % suffixes.size()];

    std::string_view text = parent.text;
    auto tail_at = text.find_first_of("?#");
    if (tail_at == std::string_view::npos) tail_at = text.size();
    std::string base(text.substr(0, tail_at));
    std::string_view add = suffix;
    if (!base.empty() && base.back() == '/' && !add.empty() && add.front() == '/') add.remove_prefix(1);
    else if ((base.empty() || base.back() != '/') && (add.empty() || add.front() != '/')) base += '/';
    base += add;
    base += text.substr(tail_at);

    out.push_back({std::move(base), parent.label, "augmented:" + parent.origin});
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    const std::vector<Label>& labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "train_fraction must be in (0,1)");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[to_int(labels[i])].push_back(i);
  if (by_class[0].empty() || by_class[1].empty())
    throw Error(ErrorKind::SingleClass, "stratified split needs both classes");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::lround((1.0 - train_fraction) * static_cast<double>(members.size())));
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

TrainTestSplit stratified_split(const std::vector<LabeledSample>& samples, const SplitSpec& spec) {
  std::vector<Label> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  auto [train_idx, test_idx] = stratified_split_indices(labels, spec.train_fraction, spec.seed);
  TrainTestSplit split;
  split.train.reserve(train_idx.size());
  split.test.reserve(test_idx.size());
  for (auto i : train_idx) split.train.push_back(samples[i]);
  for (auto i : test_idx) split.test.push_back(samples[i]);
  return split;
}

std::vector<int> stratified_folds(const std::vector<Label>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 folds");
  if (labels.size() < static_cast<std::size_t>(k))
    throw Error(ErrorKind::InvalidArgument, "fewer samples than folds");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[to_int(labels[i])].push_back(i);
  if (by_class[0].empty() || by_class[1].empty())
    throw Error(ErrorKind::SingleClass, "stratified folds need both classes");

  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  std::size_t dealt = 0;  // carried across classes so fold sizes stay balanced
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return fold;
}

}  // namespace securescan

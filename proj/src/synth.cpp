#include "securescan/synth.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <string_view>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "securescan/error.hpp"
#include "securescan/intel.hpp"

namespace securescan::synth {
namespace {

constexpr std::array<std::string_view, 64> kWords = {
    "garden",  "river",   "maple",   "harbor",  "orchard", "summit",  "meadow",  "willow",  "copper",  "lantern",
    "falcon",  "prairie", "cedar",   "harvest", "beacon",  "canyon",  "violet",  "granite", "timber",  "pioneer",
    "coastal", "silver",  "autumn",  "forest",  "valley",  "bright",  "northern", "village", "kitchen", "library",
    "museum",  "travel",  "recipe",  "weather", "science", "history", "music",   "gallery", "bakery",  "cycling",
    "atlas",   "quarry",  "thistle", "juniper", "saffron", "pepper",  "harvard", "oxford",  "civic",   "studio",
    "market",  "journal", "tribune", "herald",  "academy", "clinic",  "dental",  "theatre", "pottery", "vintage",
    "hiking",  "anchor",  "compass", "meridian"};

constexpr std::array<std::string_view, 6> kBenignTlds = {"com", "org", "net", "edu", "io", "co.uk"};

constexpr std::array<std::string_view, 24> kBenignPaths = {
    "/about",          "/contact",          "/blog",          "/products",       "/news",          "/events",
    "/docs/intro",     "/team",             "/careers",       "/faq",            "/menu",          "/gallery/photos",
    "/blog/archive",   "/shop/new-arrivals", "/press",        "/support/guides", "/recipes/soups", "/tours/europe",
    "/projects",       "/research/papers",  "/history",       "/store/catalog",  "/community",     "/help/getting-started"};

constexpr std::array<std::string_view, 10> kBenignAmbiguousPaths = {
    "/login",         "/account/settings", "/signin",         "/secure/checkout", "/update/notes",
    "/members/login", "/account",          "/verify-email",   "/bank-holidays",   "/security/update"};

constexpr std::array<std::string_view, 12> kBrands = {"paypal", "apple",  "amazon", "netflix", "chase",     "wellsfargo",
                                                      "office", "dropbox", "icloud", "bankofam", "microsoft", "coinbase"};

constexpr std::array<std::string_view, 12> kLures = {"login",   "verify", "secure",  "update",  "account", "signin",
                                                     "confirm", "unlock", "webscr",  "billing", "auth",    "recover"};

constexpr std::array<std::string_view, 10> kAbuseTlds = {"zip", "work", "review", "xyz", "top", "tk", "ml", "gq", "cf", "click"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  template <typename A>
  std::string_view pick(const A& arr) {
    return arr[below(arr.size())];
  }
  std::string token(std::size_t len, std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789") {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[below(alphabet.size())];
    return s;
  }
  std::string hex_escapes(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += "%" + token(2, "0123456789abcdef");
    return s;
  }
  std::uint8_t byte() { return static_cast<std::uint8_t>(rng_() & 0xff); }

 private:
  std::mt19937_64 rng_;
};

std::string benign_host(Gen& g) {
  std::string host = g.chance(0.4) ? "www." : "";
  host += g.pick(kWords);
  if (g.chance(0.5)) host += g.pick(kWords);
  host += ".";
  host += g.pick(kBenignTlds);
  return host;
}

std::string benign_url(Gen& g, bool ambiguous) {
  std::string url = benign_host(g);
  if (ambiguous) {
    url += g.pick(kBenignAmbiguousPaths);
    if (g.chance(0.3)) url += "?lang=en";
  } else {
    int r = static_cast<int>(g.below(4));
    if (r == 0) url += "/";
    else url += g.pick(kBenignPaths);
    if (r == 2) url += "/" + std::string(g.pick(kWords)) + "-" + std::string(g.pick(kWords));
    if (r == 3 && g.chance(0.5)) url += "/index.html";
  }
  return url;
}

std::string malicious_url(Gen& g, bool ambiguous) {
  std::string url;
  if (ambiguous && g.chance(0.25)) {
    // Lookalike: same shape as a benign account page, restricted to a few of
    // those paths. Lexically indistinguishable from the benign share.
    url = benign_host(g);
    url += kBenignAmbiguousPaths[g.below(4)];
    if (g.chance(0.3)) url += "?lang=en";
    return url;
  }
  if (ambiguous) {
    // Compromised word-domain site hosting a kit under a random directory.
    url = benign_host(g);
    url += "/" + g.token(6 + g.below(5)) + "/" + std::string(g.pick(kLures));
    url += g.chance(0.5) ? "/" + std::string(g.pick(kBrands)) + ".html" : "/" + g.token(8) + ".htm";
    return url;
  }
  switch (g.below(4)) {
    case 0: {  // keyword-stuffed host on an abused TLD
      url = std::string(g.pick(kBrands)) + "-" + std::string(g.pick(kLures)) + "-" + g.token(4);
      if (g.chance(0.5)) url += "." + std::string(g.pick(kLures)) + "-" + std::string(g.pick(kLures));
      url += "." + std::string(g.pick(kAbuseTlds));
      url += "/" + std::string(g.pick(kLures)) + (g.chance(0.5) ? ".php" : "/" + g.token(10));
      break;
    }
    case 1: {  // IP host
      url = std::to_string(1 + g.below(223)) + "." + std::to_string(g.below(256)) + "." +
            std::to_string(g.below(256)) + "." + std::to_string(1 + g.below(254));
      url += "/" + g.token(5) + "/" + std::string(g.pick(kBrands)) + "/" + std::string(g.pick(kLures)) + ".php";
      break;
    }
    case 2: {  // deep random subdomains with encoded path
      url = std::string(g.pick(kBrands)) + "." + g.token(12) + "." + g.token(6) + "." +
            std::string(g.pick(kAbuseTlds));
      url += "/" + g.hex_escapes(4 + g.below(6)) + "/" + g.token(8);
      break;
    }
    default: {  // random host, lure path with encoded redirect
      url = g.token(10 + g.below(8)) + "." + std::string(g.pick(kAbuseTlds));
      url += "/" + std::string(g.pick(kLures)) + "/" + std::string(g.pick(kBrands)) + "?id=" + g.token(16) + "&r=" +
             g.hex_escapes(3);
      break;
    }
  }
  return url;
}

}  // namespace

std::vector<LabeledSample> url_corpus(const UrlCorpusOptions& opts) {
  Gen g(opts.seed);
  std::vector<LabeledSample> out;
  std::unordered_set<std::string> seen;
  const auto n_mal = static_cast<std::size_t>(static_cast<double>(opts.count) * opts.malicious_fraction + 0.5);
  const std::size_t n_ben = opts.count - n_mal;

  auto fill = [&](std::size_t target, Label label) {
    std::size_t made = 0, attempts = 0;
    while (made < target && attempts < target * 50) {
      ++attempts;
      bool amb = g.chance(opts.ambiguous_fraction);
      std::string url = label == Label::Malicious ? malicious_url(g, amb) : benign_url(g, amb);
      if (!seen.insert(url).second) continue;
      out.push_back({std::move(url), label, std::string("synthetic:") + std::to_string(out.size() + 1)});
      ++made;
    }
  };
  fill(n_ben, Label::Benign);
  fill(n_mal, Label::Malicious);

  // Interleave deterministically so file order carries no label signal.
  std::mt19937_64 shuffle_rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(out.begin(), out.end(), shuffle_rng);
  return out;
}

std::vector<FileSample> file_corpus(std::size_t count, std::uint64_t seed) {
  Gen g(seed);
  std::vector<FileSample> out;
  const std::string_view text = "the quick brown fox jumps over the lazy dog config=value path=/usr/lib ";
  for (std::size_t i = 0; i < count; ++i) {
    FileSample s;
    s.label = i % 2 == 0 ? Label::Benign : Label::Malicious;
    const std::size_t size = 512 + g.below(4096);
    const bool blended = g.chance(0.1);
    const double random_share = (s.label == Label::Malicious) != blended ? 0.85 : 0.15;
    s.bytes.reserve(size);
    while (s.bytes.size() < size) {
      if (g.chance(random_share)) {
        for (int k = 0; k < 16 && s.bytes.size() < size; ++k) s.bytes.push_back(g.byte());
      } else {
        auto start = g.below(text.size() - 16);
        for (int k = 0; k < 16 && s.bytes.size() < size; ++k)
          s.bytes.push_back(static_cast<std::uint8_t>(text[start + static_cast<std::size_t>(k)]));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string provider_document(std::string_view id, std::uint32_t malicious, std::uint32_t suspicious,
                              std::uint32_t harmless, std::uint32_t undetected, std::int64_t last_analysis_ts) {
  nlohmann::json doc{{"data",
                      {{"id", id},
                       {"type", "url"},
                       {"attributes",
                        {{"last_analysis_stats",
                          {{"malicious", malicious},
                           {"suspicious", suspicious},
                           {"harmless", harmless},
                           {"undetected", undetected},
                           {"timeout", 0}}},
                         {"tags", malicious > 0 ? nlohmann::json::array({"phishing"}) : nlohmann::json::array()},
                         {"last_analysis_date", last_analysis_ts}}}}}};
  return doc.dump();
}

std::size_t write_intel_fixtures(const std::vector<LabeledSample>& samples, const std::filesystem::path& dir,
                                 const FixtureOptions& opts) {
  std::filesystem::create_directories(dir);
  Gen g(opts.seed);
  std::size_t written = 0;
  for (const auto& s : samples) {
    const std::string id = url_identifier(s.text);
    if (id.size() > 240) continue;  // longer than the fixture provider will look up
    std::uint32_t malicious = 0;
    bool covered = s.label == Label::Malicious && g.chance(opts.malicious_coverage);
    if (covered) {
      malicious = opts.engine_threshold + static_cast<std::uint32_t>(g.below(30));
    } else if (g.chance(opts.absent_share)) {
      continue;
    }
    const auto harmless = static_cast<std::uint32_t>(50 + g.below(20));
    const auto undetected = static_cast<std::uint32_t>(10 + g.below(10));
    std::ofstream out(dir / (id + ".json"), std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write fixture for " + s.text);
    out << provider_document(id, malicious, 0, harmless, undetected, 1700000000 + static_cast<std::int64_t>(g.below(1000000)));
    ++written;
  }
  return written;
}

}  // namespace securescan::synth

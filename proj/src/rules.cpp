#include "phishpond/rules.hpp"

#include <algorithm>
#include <optional>

#include "phishpond/embedded.hpp"
#include "phishpond/error.hpp"
#include "phishpond/text.hpp"

namespace phishpond {

std::string_view to_string(Truth truth) { return truth == Truth::Legit ? "Legit" : "Phish"; }

Truth truth_from_string(std::string_view s) {
  if (s == "Legit") return Truth::Legit;
  if (s == "Phish") return Truth::Phish;
  throw Error(Errc::InvalidData, "unknown label '" + std::string(s) + "'");
}

std::string_view to_string(RuleId id) {
  switch (id) {
    case RuleId::IpHost: return "IpHost";
    case RuleId::BrandInSubdomain: return "BrandInSubdomain";
    case RuleId::BrandHyphen: return "BrandHyphen";
    case RuleId::SecurityKeyword: return "SecurityKeyword";
    case RuleId::MisspelledBrand: return "MisspelledBrand";
    case RuleId::KnownBrandHttps: return "KnownBrandHttps";
    case RuleId::KnownBrand: return "KnownBrand";
  }
  return "Unknown";
}

bool is_phishing_rule(RuleId id) {
  return id != RuleId::KnownBrandHttps && id != RuleId::KnownBrand;
}

std::string_view to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::Phishing: return "Phishing";
    case VerdictLabel::Legitimate: return "Legitimate";
    case VerdictLabel::Suspicious: return "Suspicious";
  }
  return "Unknown";
}

// --- TipCatalog -------------------------------------------------------------

namespace {

std::optional<RuleId> rule_from_key(std::string_view key) {
  if (key == "ip_host") return RuleId::IpHost;
  if (key == "brand_in_subdomain") return RuleId::BrandInSubdomain;
  if (key == "brand_hyphen") return RuleId::BrandHyphen;
  if (key == "security_keyword") return RuleId::SecurityKeyword;
  if (key == "misspelled_brand") return RuleId::MisspelledBrand;
  if (key == "known_brand_https") return RuleId::KnownBrandHttps;
  if (key == "known_brand") return RuleId::KnownBrand;
  return std::nullopt;
}

}  // namespace

TipCatalog TipCatalog::parse(std::string_view content) {
  TipCatalog catalog;
  bool have_generic = false;
  for (const auto& [line, value] : text::content_lines(content)) {
    auto eq = value.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "expected key = tip", line);
    auto key = std::string(text::trim(std::string_view(value).substr(0, eq)));
    auto tip = std::string(text::trim(std::string_view(value).substr(eq + 1)));
    if (tip.empty()) throw Error(Errc::ParseError, "empty tip for " + key, line);
    if (key == "generic_legitimate") {
      catalog.generic_ = tip;
      have_generic = true;
    } else if (auto id = rule_from_key(key)) {
      catalog.tips_[*id] = tip;
    } else {
      throw Error(Errc::ParseError, "unknown tip key '" + key + "'", line);
    }
  }
  if (!have_generic || catalog.tips_.size() != kRulePriority.size())
    throw Error(Errc::InvalidData, "tip catalog is incomplete");
  return catalog;
}

TipCatalog TipCatalog::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

const TipCatalog& TipCatalog::embedded() {
  static const TipCatalog catalog = parse(embedded::tips_txt());
  return catalog;
}

const std::string& TipCatalog::tip(RuleId id) const { return tips_.at(id); }

bool TipCatalog::is_canonical(std::string_view tip) const {
  if (tip == generic_) return true;
  return std::any_of(tips_.begin(), tips_.end(), [&](const auto& kv) { return kv.second == tip; });
}

// --- BrandLexicon -----------------------------------------------------------

BrandLexicon::BrandLexicon(std::vector<BrandEntry> entries, const SuffixList& suffixes) {
  std::set<std::string> seen;
  for (auto& entry : entries) {
    if (entry.brand_name.empty() || entry.brand_name != text::to_lower(entry.brand_name))
      throw Error(Errc::InvalidData, "brand name must be lowercase and non-empty");
    if (!seen.insert(entry.brand_name).second)
      throw Error(Errc::InvalidData, "duplicate brand '" + entry.brand_name + "'");
    Brand brand;
    brand.tokens.insert(entry.brand_name);
    for (const auto& domain : entry.canonical_domains) {
      if (domain.empty() || domain != text::to_lower(domain))
        throw Error(Errc::InvalidData, "canonical domain must be lowercase and non-empty");
      auto labels = text::split(domain, '.');
      if (std::any_of(labels.begin(), labels.end(), [](const auto& l) { return l.empty(); }))
        throw Error(Errc::InvalidData, "malformed canonical domain '" + domain + "'");
      auto reg = registrable_domain(labels, suffixes);
      brand.registrables.insert(reg);
      auto reg_count = static_cast<std::size_t>(std::count(reg.begin(), reg.end(), '.')) + 1;
      auto reg_label_index = labels.size() - reg_count;
      brand.tokens.insert(labels[reg_label_index]);
      for (std::size_t i = 0; i < reg_label_index; ++i) brand.service_labels.insert(labels[i]);
    }
    brand.entry = std::move(entry);
    brands_.push_back(std::move(brand));
  }
}

BrandLexicon BrandLexicon::parse(std::string_view content, const SuffixList& suffixes) {
  std::vector<BrandEntry> entries;
  for (const auto& [line, value] : text::content_lines(content)) {
    auto fields = text::split(value, ',');
    BrandEntry entry;
    entry.brand_name = text::to_lower(text::trim(fields[0]));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto domain = text::to_lower(text::trim(fields[i]));
      if (domain.empty()) throw Error(Errc::ParseError, "empty domain", line);
      entry.canonical_domains.insert(std::move(domain));
    }
    if (entry.brand_name.empty() || entry.canonical_domains.empty())
      throw Error(Errc::ParseError, "expected brand,domain[,domain...]", line);
    entries.push_back(std::move(entry));
  }
  try {
    return BrandLexicon(std::move(entries), suffixes);
  } catch (const Error& e) {
    if (e.code() == Errc::SingleLabelHost) throw Error(Errc::InvalidData, e.what());
    throw;
  }
}

BrandLexicon BrandLexicon::load(const std::filesystem::path& path, const SuffixList& suffixes) {
  return parse(text::read_file(path), suffixes);
}

const BrandLexicon& BrandLexicon::embedded() {
  static const BrandLexicon lexicon = parse(embedded::lexicon_txt());
  return lexicon;
}

bool BrandLexicon::is_brand_label(std::string_view label) const {
  return std::any_of(brands_.begin(), brands_.end(), [&](const Brand& b) {
    return b.tokens.count(std::string(label)) || b.service_labels.count(std::string(label));
  });
}

// --- misspelling ------------------------------------------------------------

std::string homoglyph_fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == 'v' && i + 1 < s.size() && s[i + 1] == 'v') {
      out += 'w';
      ++i;
      continue;
    }
    switch (c) {
      case '1': c = 'l'; break;
      case '0': c = 'o'; break;
      case '3': c = 'e'; break;
      case '5': c = 's'; break;
      default: break;
    }
    out += c;
  }
  return out;
}

int misspell_distance(std::string_view label, std::string_view brand) {
  const auto a = homoglyph_fold(label);
  const auto b = homoglyph_fold(brand);
  const auto n = a.size();
  const auto m = b.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
    }
  }
  return d[n][m];
}

// --- classify ---------------------------------------------------------------

namespace {

using Brand = BrandLexicon::Brand;

bool owns(const Brand& brand, const std::string& reg) { return brand.registrables.count(reg) > 0; }

bool is_security_keyword(std::string_view part) {
  return std::find(kSecurityKeywords.begin(), kSecurityKeywords.end(), part) !=
         kSecurityKeywords.end();
}

std::optional<std::string_view> contained_keyword(std::string_view label) {
  for (auto kw : kSecurityKeywords)
    if (label.find(kw) != std::string_view::npos) return kw;
  return std::nullopt;
}

struct HostView {
  const ParsedUrl& url;
  std::string reg_label;
  // Subdomain labels followed by the registrable label.
  std::vector<std::string> labels;
};

std::optional<std::string> brand_in_subdomain(const HostView& host, const BrandLexicon& lexicon) {
  for (const auto& label : host.url.subdomain_labels)
    for (const auto& brand : lexicon.brands())
      if (!owns(brand, host.url.registrable_domain) && brand.tokens.count(label)) return label;
  return std::nullopt;
}

std::optional<std::string> brand_hyphen(const HostView& host, const BrandLexicon& lexicon) {
  const auto parts = text::split(host.reg_label, '-');
  if (parts.size() < 2) return std::nullopt;
  if (std::any_of(parts.begin(), parts.end(), [](const auto& p) { return is_security_keyword(p); }))
    return std::nullopt;
  for (const auto& brand : lexicon.brands()) {
    if (owns(brand, host.url.registrable_domain)) continue;
    for (const auto& part : parts)
      if (brand.tokens.count(part)) return host.reg_label;
  }
  return std::nullopt;
}

std::optional<std::string> security_keyword(const HostView& host, const BrandLexicon& lexicon) {
  std::optional<std::string_view> keyword;
  for (const auto& label : host.labels)
    if ((keyword = contained_keyword(label))) break;
  if (!keyword) return std::nullopt;
  for (const auto& brand : lexicon.brands()) {
    if (owns(brand, host.url.registrable_domain)) continue;
    for (const auto& label : host.labels)
      for (const auto& part : text::split(label, '-'))
        if (brand.tokens.count(part)) return std::string(*keyword);
  }
  return std::nullopt;
}

std::optional<std::string> misspelled_brand(const HostView& host, const BrandLexicon& lexicon,
                                            const RuleConfig& config) {
  const auto& subdomains = host.url.subdomain_labels;
  for (const auto& label : host.labels) {
    std::vector<std::string> candidates{label};
    if (label.find('-') != std::string::npos)
      for (auto& part : text::split(label, '-')) candidates.push_back(std::move(part));
    const bool is_subdomain =
        std::find(subdomains.begin(), subdomains.end(), label) != subdomains.end();

    for (const auto& candidate : candidates) {
      if (candidate.size() < config.misspell_min_length || lexicon.is_brand_label(candidate))
        continue;
      for (const auto& brand : lexicon.brands()) {
        for (const auto& token : brand.tokens)
          if (misspell_distance(candidate, token) <= config.misspell_threshold)
            return candidate + "~" + token;
        if (is_subdomain && owns(brand, host.url.registrable_domain))
          for (const auto& service : brand.service_labels)
            if (misspell_distance(candidate, service) <= config.misspell_threshold)
              return candidate + "~" + service;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

Verdict classify(const ParsedUrl& url, const BrandLexicon& lexicon, const RuleConfig& config,
                 const TipCatalog& tips) {
  Verdict verdict;
  auto add = [&](RuleId id, std::string evidence) {
    verdict.hits.push_back(RuleHit{id, tips.tip(id), std::move(evidence)});
  };

  if (url.host_kind == HostKind::Ipv4) {
    add(RuleId::IpHost, url.host);
  } else {
    HostView host{url, url.registrable_domain.substr(0, url.registrable_domain.find('.')), {}};
    host.labels = url.subdomain_labels;
    host.labels.push_back(host.reg_label);

    if (auto e = brand_in_subdomain(host, lexicon)) add(RuleId::BrandInSubdomain, *e);
    if (auto e = brand_hyphen(host, lexicon)) add(RuleId::BrandHyphen, *e);
    if (auto e = security_keyword(host, lexicon)) add(RuleId::SecurityKeyword, *e);
    if (auto e = misspelled_brand(host, lexicon, config)) add(RuleId::MisspelledBrand, *e);

    if (verdict.hits.empty()) {
      const bool known = std::any_of(lexicon.brands().begin(), lexicon.brands().end(),
                                     [&](const Brand& b) { return owns(b, url.registrable_domain); });
      if (known)
        add(url.scheme == "https" ? RuleId::KnownBrandHttps : RuleId::KnownBrand,
            url.registrable_domain);
    }
  }

  if (verdict.hits.empty())
    verdict.label = VerdictLabel::Suspicious;
  else if (is_phishing_rule(verdict.hits.front().rule_id))
    verdict.label = VerdictLabel::Phishing;
  else
    verdict.label = VerdictLabel::Legitimate;
  return verdict;
}

std::string tip_for(const WormRound& round, const BrandLexicon& lexicon, const RuleConfig& config,
                    const TipCatalog& tips, const SuffixList& suffixes) {
  if (round.tip) return *round.tip;
  try {
    auto verdict = classify(parse_url(round.url, suffixes), lexicon, config, tips);
    if (!verdict.hits.empty()) return verdict.hits.front().tip;
  } catch (const Error&) {
    // Unparseable rounds fall through to the generic tip.
  }
  return tips.generic_legitimate();
}

}  // namespace phishpond

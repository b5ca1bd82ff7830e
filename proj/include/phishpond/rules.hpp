#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phishpond/url.hpp"
#include "phishpond/worm_round.hpp"

namespace phishpond {

// Declaration order is evaluation priority.
enum class RuleId {
  IpHost,
  BrandInSubdomain,
  BrandHyphen,
  SecurityKeyword,
  MisspelledBrand,
  KnownBrandHttps,
  KnownBrand,
};

inline constexpr std::array<RuleId, 7> kRulePriority = {
    RuleId::IpHost,          RuleId::BrandInSubdomain, RuleId::BrandHyphen,
    RuleId::SecurityKeyword, RuleId::MisspelledBrand,  RuleId::KnownBrandHttps,
    RuleId::KnownBrand};

std::string_view to_string(RuleId id);
bool is_phishing_rule(RuleId id);

// Teacher tips keyed by rule, plus the generic "legitimate pattern" tip.
class TipCatalog {
 public:
  // Lines of "key = tip"; keys are the snake_case rule names and
  // generic_legitimate. Every key must be present.
  static TipCatalog parse(std::string_view content);
  static TipCatalog load(const std::filesystem::path& path);
  static const TipCatalog& embedded();

  const std::string& tip(RuleId id) const;
  const std::string& generic_legitimate() const { return generic_; }
  bool is_canonical(std::string_view tip) const;

 private:
  std::map<RuleId, std::string> tips_;
  std::string generic_;
};

struct BrandEntry {
  std::string brand_name;
  // Registrable domains the brand owns. Hosts below one of them (such as
  // "online.lloydstsb.co.uk") may also be listed; their extra labels become
  // service labels for that brand.
  std::set<std::string> canonical_domains;
};

class BrandLexicon {
 public:
  struct Brand {
    BrandEntry entry;
    std::set<std::string> registrables;
    // brand_name plus the registrable label of every canonical domain.
    std::set<std::string> tokens;
    std::set<std::string> service_labels;
  };

  BrandLexicon() = default;
  explicit BrandLexicon(std::vector<BrandEntry> entries,
                        const SuffixList& suffixes = SuffixList::embedded());

  // "brand,domain[,domain...]" per line; "#" comments.
  static BrandLexicon parse(std::string_view content,
                            const SuffixList& suffixes = SuffixList::embedded());
  static BrandLexicon load(const std::filesystem::path& path,
                           const SuffixList& suffixes = SuffixList::embedded());
  static const BrandLexicon& embedded();

  const std::vector<Brand>& brands() const { return brands_; }
  bool empty() const { return brands_.empty(); }
  // True if label equals any token or service label of any brand.
  bool is_brand_label(std::string_view label) const;

 private:
  std::vector<Brand> brands_;
};

struct RuleHit {
  RuleId rule_id;
  std::string tip;
  std::string evidence;

  friend bool operator==(const RuleHit&, const RuleHit&) = default;
};

enum class VerdictLabel { Phishing, Legitimate, Suspicious };
std::string_view to_string(VerdictLabel label);

struct Verdict {
  VerdictLabel label = VerdictLabel::Suspicious;
  // Highest priority first, at most one hit per rule.
  std::vector<RuleHit> hits;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct RuleConfig {
  int misspell_threshold = 1;
  std::size_t misspell_min_length = 4;
};

inline constexpr std::array<std::string_view, 7> kSecurityKeywords = {
    "security", "secure", "login", "signin", "account", "update", "confirm"};

Verdict classify(const ParsedUrl& url, const BrandLexicon& lexicon,
                 const RuleConfig& config = {},
                 const TipCatalog& tips = TipCatalog::embedded());

// Applies the look-alike fold 1->l, 0->o, 3->e, 5->s, vv->w.
std::string homoglyph_fold(std::string_view s);

// Optimal-string-alignment Damerau-Levenshtein distance between the folded
// forms of label and brand.
int misspell_distance(std::string_view label, std::string_view brand);

// The round's stored tip, else the top rule tip, else the generic tip.
std::string tip_for(const WormRound& round, const BrandLexicon& lexicon,
                    const RuleConfig& config = {},
                    const TipCatalog& tips = TipCatalog::embedded(),
                    const SuffixList& suffixes = SuffixList::embedded());

}  // namespace phishpond

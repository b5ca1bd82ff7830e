#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace phishpond {

enum class HostKind { Ipv4, DomainName };

// Public suffixes ("com", "co.uk") with longest-match lookup.
class SuffixList {
 public:
  // Throws Error(InvalidData) if the set is empty or an entry is malformed.
  using Set = std::set<std::string, std::less<>>;

  explicit SuffixList(Set suffixes);

  // One suffix per line, "#" starts a comment.
  static SuffixList parse(std::string_view content);
  static SuffixList load(const std::filesystem::path& path);
  // The copy compiled in from data/suffixes.txt.
  static const SuffixList& embedded();

  bool contains(std::string_view suffix) const;
  // Number of trailing labels forming the longest matching suffix, 0 if none.
  std::size_t match_length(const std::vector<std::string>& labels) const;
  const Set& entries() const { return suffixes_; }

 private:
  Set suffixes_;
};

struct ParsedUrl {
  std::string raw;
  std::optional<std::string> scheme;
  std::string host;
  HostKind host_kind = HostKind::DomainName;
  std::vector<std::string> host_labels;
  // Empty for Ipv4 hosts.
  std::string registrable_domain;
  std::vector<std::string> subdomain_labels;
  std::optional<std::uint16_t> port;
  std::string path;

  // scheme://host[:port]path, or host[:port]path when no scheme was given.
  std::string serialize() const;

  friend bool operator==(const ParsedUrl&, const ParsedUrl&) = default;
};

// Accepts absolute ("http://host/path") and scheme-less ("www.host.com/") forms.
// Throws Error with EmptyInput, MalformedHost or UnsupportedForm.
ParsedUrl parse_url(std::string_view text, const SuffixList& suffixes = SuffixList::embedded());

// True iff host is four dot-separated decimal octets (1-3 digits, value 0-255).
bool detect_ipv4_host(std::string_view host);

// Longest matching suffix plus one label; the last two labels when nothing
// matches. Throws Error(SingleLabelHost) for a lone unmatched label.
std::string registrable_domain(const std::vector<std::string>& host_labels,
                               const SuffixList& suffixes = SuffixList::embedded());

}  // namespace phishpond

#include "phishpond/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "phishpond/embedded.hpp"
#include "phishpond/error.hpp"
#include "phishpond/text.hpp"

namespace phishpond {

namespace {

constexpr std::size_t kMaxLabelLength = 63;
constexpr std::size_t kMaxHostLength = 253;

bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
}

bool is_scheme(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s.front())))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '.' || c == '-';
  });
}

void validate_suffix(const std::string& entry) {
  if (entry.empty() || entry.front() == '.' || entry.back() == '.')
    throw Error(Errc::InvalidData, "bad suffix entry '" + entry + "'");
  for (const auto& label : text::split(entry, '.')) {
    if (label.empty() || !std::all_of(label.begin(), label.end(), is_label_char))
      throw Error(Errc::InvalidData, "bad suffix entry '" + entry + "'");
  }
}

}  // namespace

SuffixList::SuffixList(Set suffixes) : suffixes_(std::move(suffixes)) {
  if (suffixes_.empty()) throw Error(Errc::InvalidData, "suffix list is empty");
  for (const auto& s : suffixes_) validate_suffix(s);
}

SuffixList SuffixList::parse(std::string_view content) {
  Set entries;
  for (const auto& [line, value] : text::content_lines(content)) {
    auto lowered = text::to_lower(value);
    try {
      validate_suffix(lowered);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, "bad suffix entry '" + value + "'", line);
    }
    entries.insert(std::move(lowered));
  }
  return SuffixList(std::move(entries));
}

SuffixList SuffixList::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

const SuffixList& SuffixList::embedded() {
  static const SuffixList list = parse(embedded::suffixes_txt());
  return list;
}

bool SuffixList::contains(std::string_view suffix) const {
  return suffixes_.find(suffix) != suffixes_.end();
}

std::size_t SuffixList::match_length(const std::vector<std::string>& labels) const {
  // Walk from the leftmost candidate so the first hit is the longest one.
  for (std::size_t start = 0; start < labels.size(); ++start) {
    std::string candidate;
    for (std::size_t i = start; i < labels.size(); ++i) {
      if (i != start) candidate += '.';
      candidate += labels[i];
    }
    if (contains(candidate)) return labels.size() - start;
  }
  return 0;
}

std::string ParsedUrl::serialize() const {
  std::string out;
  if (scheme) out += *scheme + "://";
  out += host;
  if (port) out += ":" + std::to_string(*port);
  out += path;
  return out;
}

bool detect_ipv4_host(std::string_view host) {
  auto parts = text::split(host, '.');
  if (parts.size() != 4) return false;
  for (const auto& part : parts) {
    if (part.empty() || part.size() > 3 || !text::is_digits(part)) return false;
    int value = 0;
    std::from_chars(part.data(), part.data() + part.size(), value);
    if (value > 255) return false;
  }
  return true;
}

std::string registrable_domain(const std::vector<std::string>& host_labels,
                               const SuffixList& suffixes) {
  if (host_labels.empty()) throw Error(Errc::MalformedHost, "no host labels");
  const auto matched = suffixes.match_length(host_labels);
  std::size_t keep;
  if (matched == 0) {
    if (host_labels.size() == 1)
      throw Error(Errc::SingleLabelHost, "'" + host_labels.front() + "' has no known suffix");
    keep = 2;
  } else {
    // A host that is itself a public suffix is returned whole.
    keep = std::min(matched + 1, host_labels.size());
  }
  std::vector<std::string> tail(host_labels.end() - static_cast<std::ptrdiff_t>(keep),
                                host_labels.end());
  return text::join(tail, ".");
}

ParsedUrl parse_url(std::string_view text, const SuffixList& suffixes) {
  ParsedUrl url;
  const auto input = text::trim(text);
  if (input.empty()) throw Error(Errc::EmptyInput, "empty URL");
  url.raw = std::string(text);

  std::string_view rest = input;
  if (auto sep = rest.find("://"); sep != std::string_view::npos) {
    auto scheme = rest.substr(0, sep);
    if (!is_scheme(scheme))
      throw Error(Errc::MalformedHost, "invalid scheme '" + std::string(scheme) + "'");
    url.scheme = text::to_lower(scheme);
    rest.remove_prefix(sep + 3);
  }

  const auto authority_end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, authority_end);
  url.path = authority_end == std::string_view::npos ? std::string{}
                                                     : std::string(rest.substr(authority_end));

  if (authority.find('@') != std::string_view::npos)
    throw Error(Errc::UnsupportedForm, "userinfo is not supported");
  if (authority.find('[') != std::string_view::npos)
    throw Error(Errc::MalformedHost, "IPv6 hosts are not supported");

  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    auto port_text = authority.substr(colon + 1);
    unsigned value = 0;
    if (!text::is_digits(port_text) || port_text.size() > 5 ||
        std::from_chars(port_text.data(), port_text.data() + port_text.size(), value).ec !=
            std::errc{} ||
        value < 1 || value > 65535) {
      throw Error(Errc::MalformedHost, "bad port '" + std::string(port_text) + "'");
    }
    url.port = static_cast<std::uint16_t>(value);
    authority = authority.substr(0, colon);
  }

  if (authority.empty()) throw Error(Errc::MalformedHost, "empty host");
  if (authority.size() > kMaxHostLength) throw Error(Errc::MalformedHost, "host too long");
  url.host = text::to_lower(authority);
  url.host_labels = text::split(url.host, '.');
  for (const auto& label : url.host_labels) {
    if (label.empty()) throw Error(Errc::MalformedHost, "empty label in '" + url.host + "'");
    if (label.size() > kMaxLabelLength)
      throw Error(Errc::MalformedHost, "label too long in '" + url.host + "'");
    if (!std::all_of(label.begin(), label.end(), is_label_char))
      throw Error(Errc::MalformedHost, "illegal character in '" + url.host + "'");
  }

  if (detect_ipv4_host(url.host)) {
    url.host_kind = HostKind::Ipv4;
    return url;
  }
  // A numeric final label can only belong to a (bad) dotted quad.
  if (text::is_digits(url.host_labels.back()))
    throw Error(Errc::MalformedHost, "bad octet in '" + url.host + "'");

  url.host_kind = HostKind::DomainName;
  try {
    url.registrable_domain = registrable_domain(url.host_labels, suffixes);
  } catch (const Error& e) {
    if (e.code() != Errc::SingleLabelHost) throw;
    throw Error(Errc::MalformedHost, "single-label host '" + url.host + "'");
  }
  const auto reg_labels =
      static_cast<std::size_t>(std::count(url.registrable_domain.begin(),
                                          url.registrable_domain.end(), '.')) + 1;
  url.subdomain_labels.assign(url.host_labels.begin(),
                              url.host_labels.end() - static_cast<std::ptrdiff_t>(reg_labels));
  return url;
}

}  // namespace phishpond

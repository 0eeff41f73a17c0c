#include "fpshield/nbs.h"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <mutex>

#include "fpshield/error.h"

namespace fpshield::nbs {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

int rank(AddressClass c) {
  switch (c) {
    case AddressClass::kPublic: return 3;
    case AddressClass::kPrivate:
    case AddressClass::kUniqueLocal:
    case AddressClass::kLinkLocal: return 2;
    case AddressClass::kLoopback: return 1;
    case AddressClass::kUnspecified: return 0;
  }
  return 0;
}

BoundaryDecision decide_on_class(AddressClass origin, AddressClass target,
                                 std::string_view what) {
  BoundaryDecision d;
  d.target_class = target;
  std::string classes = "origin class " + std::string(to_string(origin)) +
                        ", target class " + std::string(to_string(target));
  if (!crosses_boundary(origin, target)) {
    d.kind = DecisionKind::kAllow;
    d.reason = classes + ": no network boundary crossed";
  } else if (target == AddressClass::kUnspecified) {
    d.kind = DecisionKind::kBlock;
    d.reason = classes + ": " + std::string(what) +
               " is the unspecified address, the usual answer of a DNS "
               "filter for a blocked host";
  } else {
    d.kind = DecisionKind::kBlock;
    d.reason = classes + ": " + std::string(what) +
               " lies in a more local network than the page";
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Addresses

std::optional<IpAddress> IpAddress::try_parse(std::string_view text) {
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']')
    text = text.substr(1, text.size() - 2);
  if (text.empty() || text.size() > 45) return std::nullopt;
  std::string s(text);
  IpAddress ip;
  if (s.find(':') == std::string::npos) {
    in_addr a{};
    if (inet_pton(AF_INET, s.c_str(), &a) != 1) return std::nullopt;
    ip.family_ = Family::kV4;
    std::memcpy(ip.bytes_.data(), &a, 4);
  } else {
    in6_addr a{};
    if (inet_pton(AF_INET6, s.c_str(), &a) != 1) return std::nullopt;
    ip.family_ = Family::kV6;
    std::memcpy(ip.bytes_.data(), &a, 16);
  }
  return ip;
}

IpAddress IpAddress::parse(std::string_view text) {
  auto ip = try_parse(text);
  if (!ip) throw InvalidArgument("malformed IP address '" + std::string(text) + "'");
  return *ip;
}

IpAddress IpAddress::v4(uint32_t host_order) {
  IpAddress ip;
  ip.family_ = Family::kV4;
  for (int i = 0; i < 4; ++i)
    ip.bytes_[i] = static_cast<uint8_t>(host_order >> (24 - 8 * i));
  return ip;
}

IpAddress IpAddress::v6(const std::array<uint8_t, 16>& bytes) {
  IpAddress ip;
  ip.family_ = Family::kV6;
  ip.bytes_ = bytes;
  return ip;
}

uint32_t IpAddress::v4_value() const {
  return static_cast<uint32_t>(bytes_[0]) << 24 |
         static_cast<uint32_t>(bytes_[1]) << 16 |
         static_cast<uint32_t>(bytes_[2]) << 8 | bytes_[3];
}

IpAddress IpAddress::unmapped() const {
  if (family_ != Family::kV6) return *this;
  for (int i = 0; i < 10; ++i)
    if (bytes_[i] != 0) return *this;
  if (bytes_[10] != 0xff || bytes_[11] != 0xff) return *this;
  return v4(static_cast<uint32_t>(bytes_[12]) << 24 |
            static_cast<uint32_t>(bytes_[13]) << 16 |
            static_cast<uint32_t>(bytes_[14]) << 8 | bytes_[15]);
}

std::string IpAddress::to_string() const {
  char buf[INET6_ADDRSTRLEN] = {};
  if (family_ == Family::kV4) {
    inet_ntop(AF_INET, bytes_.data(), buf, sizeof(buf));
  } else {
    inet_ntop(AF_INET6, bytes_.data(), buf, sizeof(buf));
  }
  return buf;
}

std::string_view to_string(AddressClass c) {
  switch (c) {
    case AddressClass::kLoopback: return "loopback";
    case AddressClass::kPrivate: return "private";
    case AddressClass::kLinkLocal: return "link_local";
    case AddressClass::kUniqueLocal: return "unique_local";
    case AddressClass::kUnspecified: return "unspecified";
    case AddressClass::kPublic: return "public";
  }
  return "?";
}

std::optional<AddressClass> parse_address_class(std::string_view text) {
  std::string t = lower(text);
  std::replace(t.begin(), t.end(), '-', '_');
  for (auto c : {AddressClass::kLoopback, AddressClass::kPrivate,
                 AddressClass::kLinkLocal, AddressClass::kUniqueLocal,
                 AddressClass::kUnspecified, AddressClass::kPublic})
    if (to_string(c) == t) return c;
  return std::nullopt;
}

AddressClass classify_address(const IpAddress& raw) {
  IpAddress ip = raw.unmapped();
  if (ip.family() == IpAddress::Family::kV4) {
    uint32_t a = ip.v4_value();
    auto in = [a](uint32_t net, int prefix) {
      uint32_t mask = prefix == 0 ? 0 : ~uint32_t{0} << (32 - prefix);
      return (a & mask) == net;
    };
    if (a == 0) return AddressClass::kUnspecified;
    if (in(0x7f000000, 8)) return AddressClass::kLoopback;
    if (in(0x0a000000, 8) || in(0xac100000, 12) || in(0xc0a80000, 16))
      return AddressClass::kPrivate;
    if (in(0xa9fe0000, 16)) return AddressClass::kLinkLocal;
    return AddressClass::kPublic;
  }
  const auto& b = ip.bytes();
  bool all_zero_prefix = std::all_of(b.begin(), b.begin() + 15,
                                     [](uint8_t x) { return x == 0; });
  if (all_zero_prefix && b[15] == 0) return AddressClass::kUnspecified;
  if (all_zero_prefix && b[15] == 1) return AddressClass::kLoopback;
  if (b[0] == 0xfe && (b[1] & 0xc0) == 0x80) return AddressClass::kLinkLocal;
  if ((b[0] & 0xfe) == 0xfc) return AddressClass::kUniqueLocal;
  return AddressClass::kPublic;
}

AddressClass classify_address(std::string_view ip) {
  return classify_address(IpAddress::parse(ip));
}

bool crosses_boundary(AddressClass src, AddressClass dst) {
  if (dst == AddressClass::kUnspecified) return true;
  return rank(dst) < rank(src);
}

// ---------------------------------------------------------------------------
// Decisions

std::string_view to_string(Mode m) {
  return m == Mode::kPreResolve ? "preresolve" : "learn";
}

std::optional<Mode> parse_mode(std::string_view text) {
  std::string t = lower(text);
  if (t == "preresolve" || t == "pre_resolve") return Mode::kPreResolve;
  if (t == "learn" || t == "learnonreply" || t == "learn_on_reply")
    return Mode::kLearnOnReply;
  return std::nullopt;
}

std::string_view to_string(DecisionKind d) {
  switch (d) {
    case DecisionKind::kAllow: return "allow";
    case DecisionKind::kAllowAndLearn: return "allow_and_learn";
    case DecisionKind::kBlock: return "block";
  }
  return "?";
}

void LearnCache::observe_reply(std::string_view hostname, const IpAddress& ip) {
  Entry e{classify_address(ip), Clock::now()};
  std::unique_lock lock(mu_);
  entries_.insert_or_assign(lower(hostname), e);
}

std::optional<LearnCache::Entry> LearnCache::lookup(
    std::string_view hostname) const {
  std::string key = lower(hostname);
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t LearnCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

Target parse_target(std::string_view text) {
  if (text.empty()) throw InvalidArgument("empty target");
  Target t;
  std::string_view host = text;
  std::string_view port;
  if (text.front() == '[') {
    auto close = text.find(']');
    if (close == std::string_view::npos)
      throw InvalidArgument("unterminated IPv6 literal in '" + std::string(text) + "'");
    host = text.substr(1, close - 1);
    auto rest = text.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':')
        throw InvalidArgument("junk after IPv6 literal in '" + std::string(text) + "'");
      port = rest.substr(1);
    }
  } else if (std::count(text.begin(), text.end(), ':') == 1) {
    auto colon = text.find(':');
    host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  if (host.empty()) throw InvalidArgument("target without host: '" + std::string(text) + "'");
  if (!port.empty() || text.back() == ':') {
    int p = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
    if (ec != std::errc() || ptr != port.data() + port.size() || p <= 0 ||
        p > 65535)
      throw InvalidArgument("invalid port in target '" + std::string(text) + "'");
    t.port = static_cast<uint16_t>(p);
  }
  t.host = lower(host);
  t.literal = IpAddress::try_parse(t.host);
  return t;
}

BoundaryDecision decide(Mode mode, AddressClass origin_class,
                        std::string_view target_host,
                        const std::optional<IpAddress>& resolved,
                        const LearnCache& cache) {
  Target target = parse_target(target_host);

  if (target.literal) {
    return decide_on_class(origin_class, classify_address(*target.literal),
                           target.literal->to_string());
  }

  if (mode == Mode::kPreResolve) {
    if (!resolved)
      throw InvalidArgument("pre-resolve mode needs the resolved address of " +
                            target.host);
    return decide_on_class(origin_class, classify_address(*resolved),
                           target.host + " (" + resolved->to_string() + ")");
  }

  if (auto entry = cache.lookup(target.host)) {
    return decide_on_class(origin_class, entry->cls,
                           target.host + " (learned)");
  }
  BoundaryDecision d;
  d.kind = DecisionKind::kAllowAndLearn;
  d.reason = "origin class " + std::string(to_string(origin_class)) +
             ", target class unknown: first request to " + target.host +
             " goes through and its address is learned from the reply";
  return d;
}

}  // namespace fpshield::nbs

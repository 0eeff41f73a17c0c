#ifndef FPSHIELD_NBS_H_
#define FPSHIELD_NBS_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

// Network boundary shield: stops pages from using the browser as a proxy into
// networks closer to the user than the page itself.
namespace fpshield::nbs {

class IpAddress {
 public:
  enum class Family { kV4, kV6 };

  // Accepts dotted quad IPv4 and RFC 4291 IPv6, optionally in brackets.
  // Throws InvalidArgument on anything else.
  static IpAddress parse(std::string_view text);
  static std::optional<IpAddress> try_parse(std::string_view text);
  static IpAddress v4(uint32_t host_order);
  static IpAddress v6(const std::array<uint8_t, 16>& bytes);

  Family family() const { return family_; }
  // Network order; IPv4 uses the first four bytes.
  const std::array<uint8_t, 16>& bytes() const { return bytes_; }
  uint32_t v4_value() const;
  // IPv4-mapped IPv6 (::ffff:a.b.c.d) unwrapped to IPv4.
  IpAddress unmapped() const;
  std::string to_string() const;

  friend bool operator==(const IpAddress&, const IpAddress&) = default;

 private:
  Family family_ = Family::kV4;
  std::array<uint8_t, 16> bytes_{};
};

enum class AddressClass {
  kLoopback,
  kPrivate,
  kLinkLocal,
  kUniqueLocal,
  kUnspecified,
  kPublic,
};

std::string_view to_string(AddressClass c);
std::optional<AddressClass> parse_address_class(std::string_view text);

// Loopback 127/8, ::1; Private 10/8, 172.16/12, 192.168/16; LinkLocal
// 169.254/16, fe80::/10; UniqueLocal fc00::/7; Unspecified 0.0.0.0, ::;
// everything else Public. IPv4-mapped IPv6 addresses classify as their IPv4.
AddressClass classify_address(const IpAddress& ip);
AddressClass classify_address(std::string_view ip);

// Public (3) > Private, UniqueLocal, LinkLocal (2) > Loopback (1). A request
// crosses a boundary when the rank strictly drops from source to target.
// An Unspecified target always crosses; an Unspecified source ranks below
// everything.
bool crosses_boundary(AddressClass src, AddressClass dst);

enum class Mode { kPreResolve, kLearnOnReply };
std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view text);

class LearnCache {
 public:
  using Clock = std::chrono::system_clock;

  struct Entry {
    AddressClass cls = AddressClass::kPublic;
    Clock::time_point learned_at;
  };

  // Last write wins.
  void observe_reply(std::string_view hostname, const IpAddress& ip);
  std::optional<Entry> lookup(std::string_view hostname) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Entry, std::less<>> entries_;
};

enum class DecisionKind { kAllow, kAllowAndLearn, kBlock };
std::string_view to_string(DecisionKind d);

struct BoundaryDecision {
  DecisionKind kind = DecisionKind::kAllow;
  // Class the decision was based on; empty for AllowAndLearn.
  std::optional<AddressClass> target_class;
  std::string reason;
};

struct Target {
  std::string host;  // lower-cased, brackets removed
  std::optional<uint16_t> port;
  std::optional<IpAddress> literal;
};

// host, host:port, [v6]:port, or bare IPv6. Throws InvalidArgument.
Target parse_target(std::string_view text);

// Pure decision. PreResolve needs |resolved| unless the target is an IP
// literal and throws InvalidArgument otherwise. LearnOnReply ignores
// |resolved| and consults |cache|.
BoundaryDecision decide(Mode mode, AddressClass origin_class,
                        std::string_view target_host,
                        const std::optional<IpAddress>& resolved,
                        const LearnCache& cache);

}  // namespace fpshield::nbs

#endif  // FPSHIELD_NBS_H_

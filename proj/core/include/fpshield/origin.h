#ifndef FPSHIELD_ORIGIN_H_
#define FPSHIELD_ORIGIN_H_

#include <compare>
#include <string>
#include <string_view>

namespace fpshield {

// A web origin in serialized form: scheme://host[:port]. Scheme and host are
// lower-cased, default ports (80 for http/ws, 443 for https/wss) are elided,
// and any userinfo, path, query or fragment is dropped. Parsing an already
// normalized origin returns it unchanged.
class Origin {
 public:
  // Throws InvalidArgument if |text| has no scheme, no host, or a bad port.
  static Origin parse(std::string_view text);

  const std::string& value() const { return value_; }
  const std::string& scheme() const { return scheme_; }
  const std::string& host() const { return host_; }
  // 0 when the port is the scheme default or absent.
  int port() const { return port_; }

  friend bool operator==(const Origin& a, const Origin& b) {
    return a.value_ == b.value_;
  }
  friend auto operator<=>(const Origin& a, const Origin& b) {
    return a.value_ <=> b.value_;
  }

 private:
  Origin() = default;

  std::string value_;
  std::string scheme_;
  std::string host_;
  int port_ = 0;
};

}  // namespace fpshield

#endif  // FPSHIELD_ORIGIN_H_

#include "fpshield/origin.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "fpshield/error.h"

namespace fpshield {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

int default_port(std::string_view scheme) {
  if (scheme == "http" || scheme == "ws") return 80;
  if (scheme == "https" || scheme == "wss") return 443;
  if (scheme == "ftp") return 21;
  return 0;
}

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
    return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '-' || c == '.';
  });
}

}  // namespace

Origin Origin::parse(std::string_view text) {
  auto sep = text.find("://");
  if (sep == std::string_view::npos)
    throw InvalidArgument("origin '" + std::string(text) + "' has no scheme");
  std::string scheme = lower(text.substr(0, sep));
  if (!valid_scheme(scheme))
    throw InvalidArgument("origin '" + std::string(text) +
                          "' has an invalid scheme");

  std::string_view rest = text.substr(sep + 3);
  rest = rest.substr(0, rest.find_first_of("/?#"));
  if (auto at = rest.rfind('@'); at != std::string_view::npos)
    rest = rest.substr(at + 1);

  std::string_view host;
  std::string_view port_text;
  if (!rest.empty() && rest.front() == '[') {
    auto close = rest.find(']');
    if (close == std::string_view::npos)
      throw InvalidArgument("origin '" + std::string(text) +
                            "' has an unterminated IPv6 host");
    host = rest.substr(0, close + 1);
    std::string_view after = rest.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':')
        throw InvalidArgument("origin '" + std::string(text) +
                              "' has junk after the host");
      port_text = after.substr(1);
    }
  } else {
    auto colon = rest.rfind(':');
    host = rest.substr(0, colon);
    if (colon != std::string_view::npos) port_text = rest.substr(colon + 1);
  }
  if (host.empty() || host == "[]")
    throw InvalidArgument("origin '" + std::string(text) + "' has no host");

  int port = 0;
  if (!port_text.empty()) {
    auto [ptr, ec] = std::from_chars(port_text.data(),
                                     port_text.data() + port_text.size(), port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
        port <= 0 || port > 65535) {
      throw InvalidArgument("origin '" + std::string(text) +
                            "' has an invalid port");
    }
  }
  if (port == default_port(scheme)) port = 0;

  Origin o;
  o.scheme_ = std::move(scheme);
  o.host_ = lower(host);
  o.port_ = port;
  o.value_ = o.scheme_ + "://" + o.host_;
  if (port != 0) o.value_ += ":" + std::to_string(port);
  return o;
}

}  // namespace fpshield

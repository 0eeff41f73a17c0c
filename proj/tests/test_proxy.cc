#include <gtest/gtest.h>

#include <sstream>

#include "fpshield/error.h"
#include "fpshield/proxy.h"
#include "json.hpp"
#include "stub_server.h"

using namespace fpshield::nbs;
using teststub::roundtrip;
using teststub::get_request;

namespace {

Resolver to_loopback() {
  return [](const std::string&) {
    return std::vector<IpAddress>{IpAddress::parse("127.0.0.1")};
  };
}

std::string status_line(const std::string& reply) {
  return reply.substr(0, reply.find("\r\n"));
}

}  // namespace

TEST(Proxy, PreResolveBlocksWithoutTouchingTheTarget) {
  teststub::StubServer stub;
  std::ostringstream log;
  ProxyConfig cfg;
  cfg.log = &log;
  cfg.resolver = to_loopback();
  ForwardProxy proxy(cfg);
  auto port = proxy.start();
  std::string authority = "127.0.0.1:" + std::to_string(stub.port());
  EXPECT_EQ(status_line(roundtrip(port, get_request(authority))),
            "HTTP/1.1 403 Forbidden");
  std::string named = "intranet.test:" + std::to_string(stub.port());
  auto reply = roundtrip(port, get_request(named));
  EXPECT_EQ(status_line(reply), "HTTP/1.1 403 Forbidden");
  EXPECT_NE(reply.find("X-Boundary-Reason:"), std::string::npos);
  proxy.stop();
  EXPECT_EQ(stub.connections(), 0);

  std::istringstream lines(log.str());
  int n = 0;
  for (std::string l; std::getline(lines, l); ++n) {
    auto j = nlohmann::json::parse(l);
    EXPECT_EQ(j["decision"], "block");
    EXPECT_EQ(j["class"], "loopback");
  }
  EXPECT_EQ(n, 2);
}

TEST(Proxy, SameBoundaryIsRelayed) {
  teststub::StubServer stub;
  ProxyConfig cfg;
  cfg.origin_class = AddressClass::kLoopback;
  ForwardProxy proxy(cfg);
  auto port = proxy.start();
  auto reply = roundtrip(port, get_request("127.0.0.1:" + std::to_string(stub.port())));
  EXPECT_EQ(status_line(reply), "HTTP/1.1 200 OK");
  EXPECT_NE(reply.find("stub!"), std::string::npos);
  proxy.stop();
  EXPECT_EQ(stub.connections(), 1);
}

TEST(Proxy, ConnectTunnel) {
  teststub::StubServer stub;
  ProxyConfig cfg;
  cfg.origin_class = AddressClass::kLoopback;
  ForwardProxy proxy(cfg);
  auto port = proxy.start();
  std::string authority = "127.0.0.1:" + std::to_string(stub.port());
  auto reply = roundtrip(port, "CONNECT " + authority + " HTTP/1.1\r\n\r\n",
                        "GET / HTTP/1.1\r\nHost: x\r\n\r\n");
  EXPECT_EQ(status_line(reply), "HTTP/1.1 200 Connection established");
  EXPECT_NE(reply.find("stub!"), std::string::npos);
  proxy.stop();
}

TEST(Proxy, LearnOnReplyFirstPassesThenBlocks) {
  teststub::StubServer stub;
  std::ostringstream log;
  ProxyConfig cfg;
  cfg.mode = Mode::kLearnOnReply;
  cfg.resolver = to_loopback();
  cfg.log = &log;
  ForwardProxy proxy(cfg);
  auto port = proxy.start();
  std::string named = "rebinder.test:" + std::to_string(stub.port());
  EXPECT_EQ(status_line(roundtrip(port, get_request(named))), "HTTP/1.1 200 OK");
  EXPECT_EQ(stub.connections(), 1);
  ASSERT_TRUE(proxy.cache().lookup("rebinder.test"));
  EXPECT_EQ(status_line(roundtrip(port, get_request(named))),
            "HTTP/1.1 403 Forbidden");
  proxy.stop();
  EXPECT_EQ(stub.connections(), 1);
  EXPECT_NE(log.str().find("\"allow_and_learn\""), std::string::npos);
  EXPECT_NE(log.str().find("\"block\""), std::string::npos);
}

TEST(Proxy, MalformedRequests) {
  ForwardProxy proxy(ProxyConfig{});
  auto port = proxy.start();
  EXPECT_EQ(status_line(roundtrip(port, "HELLO\r\n\r\n")).substr(0, 12), "HTTP/1.1 400");
  EXPECT_EQ(status_line(roundtrip(port, "CONNECT example.org HTTP/1.1\r\n\r\n"))
                .substr(0, 12),
            "HTTP/1.1 400");
  proxy.stop();
}

TEST(Proxy, UnresolvableHostIsBadGateway) {
  ProxyConfig cfg;
  cfg.resolver = [](const std::string&) { return std::vector<IpAddress>{}; };
  ForwardProxy proxy(cfg);
  auto port = proxy.start();
  EXPECT_EQ(status_line(roundtrip(port, get_request("nowhere.test"))).substr(0, 12),
            "HTTP/1.1 502");
  proxy.stop();
}

TEST(Proxy, BindFailureThrows) {
  ProxyConfig cfg;
  cfg.listen_host = "192.0.2.1";  // TEST-NET, not ours
  ForwardProxy proxy(cfg);
  EXPECT_THROW(proxy.start(), fpshield::SystemError);
}

#ifndef FPSHIELD_PROXY_H_
#define FPSHIELD_PROXY_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fpshield/decision_log.h"
#include "fpshield/nbs.h"

namespace fpshield::nbs {

// Resolves a host name to its addresses. Defaults to getaddrinfo.
using Resolver = std::function<std::vector<IpAddress>(const std::string&)>;

std::vector<IpAddress> system_resolve(const std::string& host);

struct ProxyConfig {
  std::string listen_host = "127.0.0.1";
  uint16_t listen_port = 0;  // 0 picks an ephemeral port
  Mode mode = Mode::kPreResolve;
  AddressClass origin_class = AddressClass::kPublic;
  std::ostream* log = nullptr;  // JSONL decisions; null disables logging
  Resolver resolver;            // empty means system_resolve
  int io_timeout_ms = 10000;
};

// HTTP/1.x forward proxy (absolute-form requests and CONNECT tunnels). Every
// request is decided before any upstream connection is opened: in PreResolve
// mode the proxy resolves the host itself and connects only to addresses it
// has checked; in LearnOnReply mode the first request to an unknown host goes
// through and the peer address of the upstream connection is learned.
// One request per client connection.
class ForwardProxy {
 public:
  explicit ForwardProxy(ProxyConfig config);
  ~ForwardProxy();

  ForwardProxy(const ForwardProxy&) = delete;
  ForwardProxy& operator=(const ForwardProxy&) = delete;

  // Binds and starts the accept loop on a background thread. Returns the
  // bound port. Throws SystemError if the address cannot be bound.
  uint16_t start();
  // Stops accepting, waits for in-flight connections, flushes the log.
  void stop();

  uint16_t port() const { return port_; }
  const LearnCache& cache() const { return cache_; }

 private:
  void accept_loop();
  void handle(int client_fd);

  ProxyConfig config_;
  LearnCache cache_;
  std::unique_ptr<DecisionLog> log_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex workers_mu_;
  std::condition_variable workers_cv_;
  int active_workers_ = 0;
};

}  // namespace fpshield::nbs

#endif  // FPSHIELD_PROXY_H_

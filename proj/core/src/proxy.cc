#include "fpshield/proxy.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>

#include "fpshield/error.h"

namespace fpshield::nbs {

namespace {

constexpr std::size_t kMaxHead = 64 * 1024;

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

void set_timeouts(int fd, int ms) {
  timeval tv{ms / 1000, (ms % 1000) * 1000};
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

std::string status_reply(int code, std::string_view text,
                         std::string_view reason) {
  std::string body = std::string(reason) + "\n";
  std::ostringstream out;
  out << "HTTP/1.1 " << code << ' ' << text << "\r\n"
      << "Content-Type: text/plain; charset=utf-8\r\n"
      << "Content-Length: " << body.size() << "\r\n"
      << "Connection: close\r\n";
  if (!reason.empty()) {
    std::string header(reason);
    std::replace(header.begin(), header.end(), '\r', ' ');
    std::replace(header.begin(), header.end(), '\n', ' ');
    out << "X-Boundary-Reason: " << header << "\r\n";
  }
  out << "\r\n" << body;
  return out.str();
}

struct Request {
  std::string method;
  std::string authority;
  std::string path;  // origin-form for plain HTTP
  std::string version;
  std::vector<std::string> headers;  // raw "Name: value" lines
  std::string leftover;              // bytes read past the head
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Reads the request head. Returns nullopt on EOF, timeout or a malformed head.
std::optional<Request> read_request(int fd) {
  std::string buf;
  char chunk[4096];
  std::size_t end = std::string::npos;
  while ((end = buf.find("\r\n\r\n")) == std::string::npos) {
    if (buf.size() > kMaxHead) return std::nullopt;
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buf.append(chunk, static_cast<std::size_t>(n));
  }

  Request req;
  req.leftover = buf.substr(end + 4);
  std::istringstream head(buf.substr(0, end));
  std::string line;
  std::getline(head, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream rl(line);
  std::string target;
  if (!(rl >> req.method >> target >> req.version)) return std::nullopt;
  if (req.version.rfind("HTTP/1.", 0) != 0) return std::nullopt;
  while (std::getline(head, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) req.headers.push_back(line);
  }

  if (req.method == "CONNECT") {
    req.authority = target;
    return req;
  }
  constexpr std::string_view kHttp = "http://";
  if (lower(target).rfind(kHttp, 0) != 0) return std::nullopt;
  std::string rest = target.substr(kHttp.size());
  auto slash = rest.find_first_of("/?#");
  req.authority = rest.substr(0, slash);
  req.path = slash == std::string::npos ? "/" : rest.substr(slash);
  if (req.path.front() != '/') req.path.insert(0, "/");
  if (auto at = req.authority.rfind('@'); at != std::string::npos)
    req.authority.erase(0, at + 1);
  return req;
}

std::optional<IpAddress> peer_address(int fd) {
  sockaddr_storage ss{};
  socklen_t len = sizeof(ss);
  if (getpeername(fd, reinterpret_cast<sockaddr*>(&ss), &len) != 0)
    return std::nullopt;
  if (ss.ss_family == AF_INET) {
    auto* sin = reinterpret_cast<sockaddr_in*>(&ss);
    return IpAddress::v4(ntohl(sin->sin_addr.s_addr));
  }
  if (ss.ss_family == AF_INET6) {
    auto* sin6 = reinterpret_cast<sockaddr_in6*>(&ss);
    std::array<uint8_t, 16> b{};
    std::memcpy(b.data(), &sin6->sin6_addr, 16);
    return IpAddress::v6(b);
  }
  return std::nullopt;
}

Fd connect_to(const IpAddress& ip, uint16_t port, int timeout_ms) {
  sockaddr_storage ss{};
  socklen_t len = 0;
  if (ip.family() == IpAddress::Family::kV4) {
    auto* sin = reinterpret_cast<sockaddr_in*>(&ss);
    sin->sin_family = AF_INET;
    sin->sin_port = htons(port);
    std::memcpy(&sin->sin_addr, ip.bytes().data(), 4);
    len = sizeof(sockaddr_in);
  } else {
    auto* sin6 = reinterpret_cast<sockaddr_in6*>(&ss);
    sin6->sin6_family = AF_INET6;
    sin6->sin6_port = htons(port);
    std::memcpy(&sin6->sin6_addr, ip.bytes().data(), 16);
    len = sizeof(sockaddr_in6);
  }
  Fd fd(::socket(ss.ss_family, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) return fd;
  set_timeouts(fd.get(), timeout_ms);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&ss), len) != 0)
    fd.reset();
  return fd;
}

// Copies bytes both ways until the upstream closes or the link idles out.
void relay(int client, int upstream, int timeout_ms) {
  pollfd fds[2] = {{client, POLLIN, 0}, {upstream, POLLIN, 0}};
  bool client_open = true;
  char buf[16384];
  for (;;) {
    fds[0].events = client_open ? POLLIN : 0;
    int rc = ::poll(fds, 2, timeout_ms);
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) return;
    if (client_open && (fds[0].revents & (POLLIN | POLLHUP | POLLERR))) {
      ssize_t n = ::recv(client, buf, sizeof(buf), 0);
      if (n <= 0) {
        client_open = false;
        ::shutdown(upstream, SHUT_WR);
      } else if (!send_all(upstream, {buf, static_cast<std::size_t>(n)})) {
        return;
      }
    }
    if (fds[1].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t n = ::recv(upstream, buf, sizeof(buf), 0);
      if (n <= 0) return;
      if (!send_all(client, {buf, static_cast<std::size_t>(n)})) return;
    }
  }
}

}  // namespace

std::vector<IpAddress> system_resolve(const std::string& host) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0) return {};
  std::vector<IpAddress> out;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    std::optional<IpAddress> ip;
    if (ai->ai_family == AF_INET) {
      auto* sin = reinterpret_cast<sockaddr_in*>(ai->ai_addr);
      ip = IpAddress::v4(ntohl(sin->sin_addr.s_addr));
    } else if (ai->ai_family == AF_INET6) {
      auto* sin6 = reinterpret_cast<sockaddr_in6*>(ai->ai_addr);
      std::array<uint8_t, 16> b{};
      std::memcpy(b.data(), &sin6->sin6_addr, 16);
      ip = IpAddress::v6(b);
    }
    if (ip && std::find(out.begin(), out.end(), *ip) == out.end())
      out.push_back(*ip);
  }
  freeaddrinfo(res);
  return out;
}

ForwardProxy::ForwardProxy(ProxyConfig config) : config_(std::move(config)) {
  if (!config_.resolver) config_.resolver = system_resolve;
  log_ = std::make_unique<DecisionLog>(config_.log);
}

ForwardProxy::~ForwardProxy() { stop(); }

uint16_t ForwardProxy::start() {
  auto ip = IpAddress::try_parse(config_.listen_host);
  if (!ip)
    throw SystemError("listen address must be an IP literal, got " +
                      config_.listen_host);
  sockaddr_storage ss{};
  socklen_t len = 0;
  if (ip->family() == IpAddress::Family::kV4) {
    auto* sin = reinterpret_cast<sockaddr_in*>(&ss);
    sin->sin_family = AF_INET;
    sin->sin_port = htons(config_.listen_port);
    std::memcpy(&sin->sin_addr, ip->bytes().data(), 4);
    len = sizeof(sockaddr_in);
  } else {
    auto* sin6 = reinterpret_cast<sockaddr_in6*>(&ss);
    sin6->sin6_family = AF_INET6;
    sin6->sin6_port = htons(config_.listen_port);
    std::memcpy(&sin6->sin6_addr, ip->bytes().data(), 16);
    len = sizeof(sockaddr_in6);
  }

  int fd = ::socket(ss.ss_family, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw SystemError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd, reinterpret_cast<sockaddr*>(&ss), len) != 0 ||
      ::listen(fd, 64) != 0) {
    std::string err = std::strerror(errno);
    ::close(fd);
    throw SystemError("cannot listen on " + config_.listen_host + ":" +
                      std::to_string(config_.listen_port) + ": " + err);
  }
  sockaddr_storage bound{};
  socklen_t blen = sizeof(bound);
  getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &blen);
  port_ = ntohs(bound.ss_family == AF_INET
                    ? reinterpret_cast<sockaddr_in*>(&bound)->sin_port
                    : reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
  listen_fd_ = fd;
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  return port_;
}

void ForwardProxy::stop() {
  if (running_.exchange(false) && acceptor_.joinable()) acceptor_.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  std::unique_lock lock(workers_mu_);
  workers_cv_.wait(lock, [this] { return active_workers_ == 0; });
  lock.unlock();
  if (log_) log_->flush();
}

void ForwardProxy::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, 200);
    log_->tick();
    if (rc <= 0 || !(p.revents & POLLIN)) continue;
    int client = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (client < 0) continue;
    {
      std::lock_guard lock(workers_mu_);
      ++active_workers_;
    }
    std::thread([this, client] {
      handle(client);
      std::lock_guard lock(workers_mu_);
      if (--active_workers_ == 0) workers_cv_.notify_all();
    }).detach();
  }
}

void ForwardProxy::handle(int client_fd) {
  Fd client(client_fd);
  set_timeouts(client.get(), config_.io_timeout_ms);

  auto req = read_request(client.get());
  if (!req) {
    send_all(client.get(), status_reply(400, "Bad Request",
                                        "expected an absolute-form HTTP "
                                        "request or CONNECT"));
    return;
  }

  Target target;
  try {
    target = parse_target(req->authority);
  } catch (const Error& e) {
    send_all(client.get(), status_reply(400, "Bad Request", e.what()));
    return;
  }
  const bool tunnel = req->method == "CONNECT";
  if (tunnel && !target.port) {
    send_all(client.get(),
             status_reply(400, "Bad Request", "CONNECT needs host:port"));
    return;
  }
  const uint16_t port = target.port.value_or(80);

  // Decide, and collect the only addresses we are willing to connect to.
  std::vector<IpAddress> candidates;
  BoundaryDecision decision;
  if (target.literal) {
    candidates = {*target.literal};
    decision = decide(config_.mode, config_.origin_class, target.host,
                      target.literal, cache_);
  } else if (config_.mode == Mode::kPreResolve) {
    candidates = config_.resolver(target.host);
    if (candidates.empty()) {
      send_all(client.get(), status_reply(502, "Bad Gateway",
                                          "cannot resolve " + target.host));
      return;
    }
    for (const auto& ip : candidates) {
      BoundaryDecision d = decide(config_.mode, config_.origin_class,
                                  target.host, ip, cache_);
      if (d.kind == DecisionKind::kBlock) {
        decision = d;
        break;
      }
      if (!decision.target_class) decision = d;
    }
  } else {
    decision = decide(config_.mode, config_.origin_class, target.host,
                      std::nullopt, cache_);
  }
  log_->record(config_.origin_class, target.host, decision);

  if (decision.kind == DecisionKind::kBlock) {
    send_all(client.get(), status_reply(403, "Forbidden", decision.reason));
    return;
  }

  if (candidates.empty()) candidates = config_.resolver(target.host);
  Fd upstream;
  for (const auto& ip : candidates) {
    upstream = connect_to(ip, port, config_.io_timeout_ms);
    if (upstream) break;
  }
  if (!upstream) {
    send_all(client.get(),
             status_reply(502, "Bad Gateway",
                          "cannot connect to " + target.host + ":" +
                              std::to_string(port)));
    return;
  }
  if (config_.mode == Mode::kLearnOnReply && !target.literal) {
    if (auto peer = peer_address(upstream.get()))
      cache_.observe_reply(target.host, *peer);
  }

  if (tunnel) {
    if (!send_all(client.get(), "HTTP/1.1 200 Connection established\r\n\r\n"))
      return;
    if (!req->leftover.empty() && !send_all(upstream.get(), req->leftover))
      return;
  } else {
    std::string head = req->method + " " + req->path + " " + req->version + "\r\n";
    for (const auto& h : req->headers) {
      std::string name = lower(h.substr(0, h.find(':')));
      if (name == "proxy-connection" || name == "connection" ||
          name == "keep-alive" || name == "proxy-authorization")
        continue;
      head += h + "\r\n";
    }
    head += "Connection: close\r\n\r\n";
    if (!send_all(upstream.get(), head + req->leftover)) {
      send_all(client.get(), status_reply(502, "Bad Gateway",
                                          "upstream closed the connection"));
      return;
    }
  }
  relay(client.get(), upstream.get(), config_.io_timeout_ms);
}

}  // namespace fpshield::nbs

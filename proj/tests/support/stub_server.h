#ifndef FPSHIELD_TESTS_STUB_SERVER_H_
#define FPSHIELD_TESTS_STUB_SERVER_H_

// Tiny HTTP origin on 127.0.0.1 that counts connections, plus a raw client.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <stdexcept>
#include <string>
#include <thread>

namespace teststub {

class StubServer {
 public:
  StubServer() {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&a), sizeof a) != 0 ||
        ::listen(fd_, 16) != 0)
      throw std::runtime_error("stub: bind failed");
    socklen_t len = sizeof a;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&a), &len);
    port_ = ntohs(a.sin_port);
    thread_ = std::thread([this] { loop(); });
  }
  ~StubServer() {
    stop_ = true;
    thread_.join();
    ::close(fd_);
  }

  uint16_t port() const { return port_; }
  int connections() const { return connections_; }
  long bytes_received() const { return bytes_; }

 private:
  void loop() {
    while (!stop_) {
      pollfd p{fd_, POLLIN, 0};
      if (::poll(&p, 1, 50) <= 0) continue;
      int c = ::accept(fd_, nullptr, nullptr);
      if (c < 0) continue;
      ++connections_;
      std::string head;
      char buf[4096];
      while (head.find("\r\n\r\n") == std::string::npos) {
        pollfd q{c, POLLIN, 0};
        if (::poll(&q, 1, 2000) <= 0) break;
        ssize_t n = ::recv(c, buf, sizeof buf, 0);
        if (n <= 0) break;
        bytes_ += n;
        head.append(buf, static_cast<size_t>(n));
      }
      static const char kReply[] =
          "HTTP/1.1 200 OK\r\nContent-Length: 5\r\nConnection: close\r\n\r\nstub!";
      ::send(c, kReply, sizeof kReply - 1, MSG_NOSIGNAL);
      ::close(c);
    }
  }

  int fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<int> connections_{0};
  std::atomic<long> bytes_{0};
  std::thread thread_;
};

// Connects to 127.0.0.1:port, writes |request|, then reads until the peer
// closes. For CONNECT, |after_tunnel| is sent once the 200 line arrives.
inline std::string roundtrip(uint16_t port, const std::string& request,
                            const std::string& after_tunnel = "") {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(port);
  a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&a), sizeof a) != 0) {
    ::close(fd);
    throw std::runtime_error("client: connect failed");
  }
  ::send(fd, request.data(), request.size(), MSG_NOSIGNAL);
  std::string out;
  bool tunnelled = after_tunnel.empty();
  char buf[4096];
  for (;;) {
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, 5000) <= 0) break;
    ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    out.append(buf, static_cast<size_t>(n));
    if (!tunnelled && out.find("\r\n\r\n") != std::string::npos) {
      tunnelled = true;
      if (out.rfind("HTTP/1.1 200", 0) == 0)
        ::send(fd, after_tunnel.data(), after_tunnel.size(), MSG_NOSIGNAL);
    }
  }
  ::close(fd);
  return out;
}

inline std::string get_request(const std::string& authority) {
  return "GET http://" + authority + "/probe HTTP/1.1\r\nHost: " + authority +
         "\r\nProxy-Connection: keep-alive\r\n\r\n";
}

}  // namespace teststub

#endif  // FPSHIELD_TESTS_STUB_SERVER_H_

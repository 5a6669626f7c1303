#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "bifrost/transport.hpp"

namespace bifrost {

/// Framed transport over a connected TCP socket. Nagle coalescing is
/// disabled so small flights are not delayed. No TLS: the model assumes a
/// secure channel is provided out of band.
class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  ~TcpTransport() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
    }
  }

  /// Connects to host:port, retrying briefly so that the two endpoints of a
  /// session may be started in either order.
  static std::unique_ptr<TcpTransport> connect(const std::string& host, std::uint16_t port,
                                               std::chrono::milliseconds patience = std::chrono::seconds(10)) {
    const auto deadline = std::chrono::steady_clock::now() + patience;
    std::string last_err = "connect failed";
    do {
      addrinfo hints{};
      hints.ai_family = AF_UNSPEC;
      hints.ai_socktype = SOCK_STREAM;
      addrinfo* res = nullptr;
      const std::string portstr = std::to_string(port);
      if (getaddrinfo(host.c_str(), portstr.c_str(), &hints, &res) != 0) {
        last_err = "cannot resolve " + host;
      } else {
        for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
          const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
          if (fd < 0) continue;
          if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            freeaddrinfo(res);
            return std::make_unique<TcpTransport>(fd);
          }
          last_err = std::string("connect: ") + std::strerror(errno);
          ::close(fd);
        }
        freeaddrinfo(res);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    } while (std::chrono::steady_clock::now() < deadline);
    throw TransportError(last_err);
  }

 protected:
  void send_frame(Frame f) override {
    std::vector<unsigned char> buf;
    buf.reserve(kFrameHeaderBytes + f.payload.size());
    buf.push_back(static_cast<unsigned char>(f.type));
    const std::uint64_t len = f.payload.size();
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((len >> (8 * i)) & 0xff));
    buf.insert(buf.end(), f.payload.begin(), f.payload.end());
    std::lock_guard<std::mutex> g(send_mutex_);
    write_all(buf.data(), buf.size());
  }

  Frame recv_frame() override {
    std::lock_guard<std::mutex> g(recv_mutex_);
    unsigned char header[kFrameHeaderBytes];
    read_all(header, sizeof header);
    std::uint64_t len = 0;
    for (int i = 7; i >= 0; --i) len = (len << 8) | header[1 + i];
    Frame f;
    f.type = static_cast<MsgType>(header[0]);
    if (len >= kMaxPayloadBytes) throw TransportError("announced frame payload too large");
    f.payload.resize(len);
    if (len > 0) read_all(f.payload.data(), len);
    return f;
  }

 private:
  void write_all(const unsigned char* p, std::size_t len) {
    while (len > 0) {
      const ssize_t n = ::send(fd_, p, len, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send: ") + std::strerror(errno));
      }
      p += n;
      len -= static_cast<std::size_t>(n);
    }
  }

  void read_all(unsigned char* p, std::size_t len) {
    while (len > 0) {
      const ssize_t n = ::recv(fd_, p, len, 0);
      if (n == 0) throw TransportError("connection closed by peer");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("recv: ") + std::strerror(errno));
      }
      p += n;
      len -= static_cast<std::size_t>(n);
    }
  }

  int fd_ = -1;
  std::mutex send_mutex_;
  std::mutex recv_mutex_;
};

/// Listening socket that accepts exactly one session.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      throw TransportError("bind: " + err);
    }
    if (::listen(fd_, 1) != 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      throw TransportError("listen: " + err);
    }
  }

  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  ~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
  }

  std::uint16_t port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
      throw TransportError(std::string("getsockname: ") + std::strerror(errno));
    return ntohs(addr.sin_port);
  }

  std::unique_ptr<TcpTransport> accept_one() {
    const int conn = ::accept(fd_, nullptr, nullptr);
    if (conn < 0) throw TransportError(std::string("accept: ") + std::strerror(errno));
    return std::make_unique<TcpTransport>(conn);
  }

 private:
  int fd_ = -1;
};

}  // namespace bifrost

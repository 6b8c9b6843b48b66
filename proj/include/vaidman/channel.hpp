#pragma once

// Byte-stream endpoints carrying wire-v1 frames: an in-process queue pair and
// TCP sockets (POSIX). Both move encoded frames, so the in-process path
// exercises the same encoder and decoder as the socket path.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "vaidman/errors.hpp"
#include "vaidman/wire.hpp"

namespace vaidman {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultTimeout{10000};

class Endpoint {
  public:
    virtual ~Endpoint() = default;
    /// Writes one frame. Throws ConnectionClosed if the peer is gone.
    virtual void send_frame(const std::string& frame) = 0;
    /// Reads one complete frame. Throws TimeoutError, ConnectionClosed or FrameError.
    virtual std::string receive_frame(Millis timeout) = 0;
    virtual void close() = 0;

    void send(const WireMessage& m) { send_frame(encode(m)); }
    WireMessage receive(Millis timeout) { return decode(receive_frame(timeout)); }
};

namespace detail {

struct FrameQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> frames;
    bool closed = false;
};

}  // namespace detail

class InProcessEndpoint final : public Endpoint {
  public:
    InProcessEndpoint(std::shared_ptr<detail::FrameQueue> in, std::shared_ptr<detail::FrameQueue> out)
        : in_(std::move(in)), out_(std::move(out)) {}

    ~InProcessEndpoint() override { close(); }

    void send_frame(const std::string& frame) override {
        std::lock_guard lock(out_->mu);
        if (out_->closed) {
            throw ConnectionClosed("peer closed the in-process channel");
        }
        out_->frames.push_back(frame);
        out_->cv.notify_one();
    }

    std::string receive_frame(Millis timeout) override {
        std::unique_lock lock(in_->mu);
        if (!in_->cv.wait_for(lock, timeout, [&] { return !in_->frames.empty() || in_->closed; })) {
            throw TimeoutError("no message within " + std::to_string(timeout.count()) + " ms");
        }
        if (in_->frames.empty()) {
            throw ConnectionClosed("in-process channel closed");
        }
        std::string f = std::move(in_->frames.front());
        in_->frames.pop_front();
        return f;
    }

    void close() override {
        for (auto* q : {in_.get(), out_.get()}) {
            std::lock_guard lock(q->mu);
            q->closed = true;
            q->cv.notify_all();
        }
    }

  private:
    std::shared_ptr<detail::FrameQueue> in_;
    std::shared_ptr<detail::FrameQueue> out_;
};

/// Two connected endpoints; frames sent on one arrive in order on the other.
inline std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> make_in_process_pair() {
    auto ab = std::make_shared<detail::FrameQueue>();
    auto ba = std::make_shared<detail::FrameQueue>();
    return {std::make_unique<InProcessEndpoint>(ba, ab), std::make_unique<InProcessEndpoint>(ab, ba)};
}

class TcpEndpoint final : public Endpoint {
  public:
    explicit TcpEndpoint(int fd) : fd_(fd) {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }

    ~TcpEndpoint() override { close(); }

    TcpEndpoint(const TcpEndpoint&) = delete;
    TcpEndpoint& operator=(const TcpEndpoint&) = delete;

    void send_frame(const std::string& frame) override {
        std::size_t sent = 0;
        while (sent < frame.size()) {
            ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw ConnectionClosed(std::string("send failed: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    std::string receive_frame(Millis timeout) override {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        std::string header = read_exact(kFrameHeaderBytes, deadline, timeout, true);
        std::size_t n = frame_length(header);
        return header + read_exact(n, deadline, timeout, false);
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

  private:
    std::string read_exact(std::size_t n, std::chrono::steady_clock::time_point deadline, Millis timeout,
                           bool at_boundary) {
        std::string out(n, '\0');
        std::size_t got = 0;
        while (got < n) {
            if (fd_ < 0) {
                throw ConnectionClosed("socket closed");
            }
            auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                throw TimeoutError("no message within " + std::to_string(timeout.count()) + " ms");
            }
            pollfd p{fd_, POLLIN, 0};
            int rc = ::poll(&p, 1, static_cast<int>(left.count()));
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw ConnectionClosed(std::string("poll failed: ") + std::strerror(errno));
            }
            if (rc == 0) continue;
            ssize_t r = ::recv(fd_, out.data() + got, n - got, 0);
            if (r < 0) {
                if (errno == EINTR || errno == EAGAIN) continue;
                throw ConnectionClosed(std::string("recv failed: ") + std::strerror(errno));
            }
            if (r == 0) {
                if (at_boundary && got == 0) {
                    throw ConnectionClosed("peer closed the connection");
                }
                throw FrameError("connection closed inside a frame");
            }
            got += static_cast<std::size_t>(r);
        }
        return out;
    }

    int fd_;
};

struct HostPort {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Parses "host:port"; the port must be 0..65535.
inline HostPort parse_host_port(std::string_view s) {
    auto colon = s.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw ParameterError("expected host:port, got '" + std::string(s) + "'");
    }
    HostPort hp;
    hp.host = std::string(s.substr(0, colon));
    std::string port(s.substr(colon + 1));
    char* end = nullptr;
    errno = 0;
    unsigned long v = std::strtoul(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || errno != 0 || v > 65535) {
        throw ParameterError("bad port in '" + std::string(s) + "'");
    }
    hp.port = static_cast<std::uint16_t>(v);
    return hp;
}

namespace detail {

inline sockaddr_in resolve_ipv4(const HostPort& hp) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(hp.host.c_str(), nullptr, &hints, &res);
    if (rc != 0 || res == nullptr) {
        throw TransportError("cannot resolve '" + hp.host + "': " + ::gai_strerror(rc));
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof addr);
    ::freeaddrinfo(res);
    addr.sin_port = htons(hp.port);
    return addr;
}

}  // namespace detail

class TcpListener {
  public:
    explicit TcpListener(const HostPort& where) {
        sockaddr_in addr = detail::resolve_ipv4(where);
        fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
        if (fd_ < 0) {
            throw TransportError(std::string("socket failed: ") + std::strerror(errno));
        }
        int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 8) < 0) {
            std::string err = std::strerror(errno);
            ::close(fd_);
            throw TransportError("cannot listen on " + where.host + ":" + std::to_string(where.port) + ": " + err);
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }

    ~TcpListener() {
        if (fd_ >= 0) ::close(fd_);
    }

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }

    std::unique_ptr<Endpoint> accept(Millis timeout) {
        pollfd p{fd_, POLLIN, 0};
        int rc;
        do {
            rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        } while (rc < 0 && errno == EINTR);
        if (rc == 0) {
            throw TimeoutError("no connection within " + std::to_string(timeout.count()) + " ms");
        }
        int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (rc < 0 || fd < 0) {
            throw TransportError(std::string("accept failed: ") + std::strerror(errno));
        }
        return std::make_unique<TcpEndpoint>(fd);
    }

  private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connects, retrying refused attempts until `timeout` so that processes may
/// start in any order.
inline std::unique_ptr<Endpoint> tcp_connect(const HostPort& where, Millis timeout) {
    sockaddr_in addr = detail::resolve_ipv4(where);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
        if (fd < 0) {
            throw TransportError(std::string("socket failed: ") + std::strerror(errno));
        }
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
            return std::make_unique<TcpEndpoint>(fd);
        }
        int err = errno;
        ::close(fd);
        if (err != ECONNREFUSED && err != EINTR) {
            throw TransportError("cannot connect to " + where.host + ":" + std::to_string(where.port) + ": " +
                                 std::strerror(err));
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            throw TimeoutError("cannot connect to " + where.host + ":" + std::to_string(where.port) + " within " +
                               std::to_string(timeout.count()) + " ms");
        }
        std::this_thread::sleep_for(Millis(20));
    }
}

}  // namespace vaidman

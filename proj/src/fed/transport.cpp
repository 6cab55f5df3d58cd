#include "hetrain/fed/transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace hetrain::fed {

namespace {

// ---------------------------------------------------------------- loopback

struct LoopQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<uint8_t>> frames;
    bool closed = false;

    void push(std::vector<uint8_t> frame) {
        {
            std::lock_guard lock(mu);
            if (closed) throw IoError("loopback: peer closed");
            frames.push_back(std::move(frame));
        }
        cv.notify_one();
    }

    std::vector<uint8_t> pop(uint32_t timeout_ms, const std::string& peer) {
        std::unique_lock lock(mu);
        auto ready = [&] { return !frames.empty() || closed; };
        if (timeout_ms == 0) {
            cv.wait(lock, ready);
        } else if (!cv.wait_for(lock, std::chrono::milliseconds(timeout_ms), ready)) {
            throw TimeoutError("worker " + peer + " did not respond within " +
                               std::to_string(timeout_ms) + " ms");
        }
        if (frames.empty()) throw IoError("loopback: peer closed");
        auto frame = std::move(frames.front());
        frames.pop_front();
        return frame;
    }

    void close() {
        {
            std::lock_guard lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class LoopbackConnection final : public Connection {
public:
    LoopbackConnection(std::shared_ptr<LoopQueue> in, std::shared_ptr<LoopQueue> out,
                       std::string name)
        : in_(std::move(in)), out_(std::move(out)), name_(std::move(name)) {}

    ~LoopbackConnection() override { close(); }

    void send(const Message& m) override { out_->push(encode(m)); }

    Message recv(uint32_t timeout_ms) override {
        auto frame = in_->pop(timeout_ms, name_);
        ByteReader r(frame);
        uint32_t len = r.u32();
        if (len != r.remaining()) throw FormatError("loopback: frame length mismatch");
        return decode(r.bytes(len));
    }

    std::string peer() const override { return name_; }

    void close() override {
        in_->close();
        out_->close();
    }

private:
    std::shared_ptr<LoopQueue> in_;
    std::shared_ptr<LoopQueue> out_;
    std::string name_;
};

// --------------------------------------------------------------------- tcp

void wait_readable(int fd, uint32_t timeout_ms, const std::string& peer) {
    pollfd pfd{fd, POLLIN, 0};
    int rc = ::poll(&pfd, 1, timeout_ms == 0 ? -1 : static_cast<int>(timeout_ms));
    if (rc < 0) throw IoError("poll failed: " + std::string(strerror(errno)));
    if (rc == 0)
        throw TimeoutError("worker " + peer + " did not respond within " +
                           std::to_string(timeout_ms) + " ms");
}

void read_exact(int fd, uint8_t* buf, size_t n, uint32_t timeout_ms,
                const std::string& peer) {
    size_t got = 0;
    while (got < n) {
        wait_readable(fd, timeout_ms, peer);
        ssize_t rc = ::recv(fd, buf + got, n - got, 0);
        if (rc == 0) throw IoError("connection to " + peer + " closed");
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw IoError("recv from " + peer + " failed: " + strerror(errno));
        }
        got += static_cast<size_t>(rc);
    }
}

void write_all(int fd, const uint8_t* buf, size_t n, const std::string& peer) {
    size_t sent = 0;
    while (sent < n) {
        ssize_t rc = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw IoError("send to " + peer + " failed: " + strerror(errno));
        }
        sent += static_cast<size_t>(rc);
    }
}

class TcpConnection final : public Connection {
public:
    TcpConnection(int fd, std::string peer) : fd_(fd), peer_(std::move(peer)) {}
    ~TcpConnection() override { close(); }

    void send(const Message& m) override {
        if (fd_ < 0) throw IoError("send on closed connection");
        auto frame = encode(m);
        write_all(fd_, frame.data(), frame.size(), peer_);
    }

    Message recv(uint32_t timeout_ms) override {
        if (fd_ < 0) throw IoError("recv on closed connection");
        uint8_t len_buf[4];
        read_exact(fd_, len_buf, 4, timeout_ms, peer_);
        uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(len_buf[i]) << (8 * i);
        if (len == 0 || len > kMaxFrameBytes)
            throw FormatError("tcp: implausible frame length " + std::to_string(len));
        std::vector<uint8_t> body(len);
        read_exact(fd_, body.data(), len, timeout_ms, peer_);
        return decode(body);
    }

    std::string peer() const override { return peer_; }

    void close() override {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_;
    std::string peer_;
};

addrinfo* resolve(const std::string& host, uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0) throw IoError("cannot resolve " + host + ": " + gai_strerror(rc));
    return res;
}

} // namespace

std::pair<std::unique_ptr<Connection>, std::unique_ptr<Connection>> loopback_pair() {
    auto a_to_b = std::make_shared<LoopQueue>();
    auto b_to_a = std::make_shared<LoopQueue>();
    auto a = std::make_unique<LoopbackConnection>(b_to_a, a_to_b, "loopback-peer");
    auto b = std::make_unique<LoopbackConnection>(a_to_b, b_to_a, "loopback-peer");
    return {std::move(a), std::move(b)};
}

TcpListener::TcpListener(const std::string& host, uint16_t port) : host_(host) {
    addrinfo* res = resolve(host, port, true);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 4) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    fd_ = fd;

    sockaddr_storage addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
        if (addr.ss_family == AF_INET)
            port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
        else if (addr.ss_family == AF_INET6)
            port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::string TcpListener::endpoint() const { return host_ + ":" + std::to_string(port_); }

bool TcpListener::pending(uint32_t timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    return ::poll(&pfd, 1, static_cast<int>(timeout_ms)) > 0;
}

std::unique_ptr<Connection> TcpListener::accept(uint32_t timeout_ms) {
    if (timeout_ms != 0) wait_readable(fd_, timeout_ms, endpoint());
    sockaddr_storage addr{};
    socklen_t len = sizeof(addr);
    int fd = ::accept(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    if (fd < 0) throw IoError("accept failed: " + std::string(strerror(errno)));
    char host[NI_MAXHOST] = "?", serv[NI_MAXSERV] = "?";
    ::getnameinfo(reinterpret_cast<sockaddr*>(&addr), len, host, sizeof(host), serv,
                  sizeof(serv), NI_NUMERICHOST | NI_NUMERICSERV);
    return std::make_unique<TcpConnection>(fd, std::string(host) + ":" + serv);
}

std::unique_ptr<Connection> tcp_connect(const std::string& host, uint16_t port,
                                        uint32_t timeout_ms) {
    (void)timeout_ms; // blocking connect; the OS default is ample here
    addrinfo* res = resolve(host, port, false);
    int fd = -1;
    std::string err = "connection refused";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        err = strerror(errno);
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0)
        throw IoError("cannot connect to " + host + ":" + std::to_string(port) + ": " + err);
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return std::make_unique<TcpConnection>(fd, host + ":" + std::to_string(port));
}

std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint) {
    size_t colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size())
        throw ParamError("malformed endpoint '" + endpoint + "', expected host:port");
    int port = 0;
    try {
        port = std::stoi(endpoint.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParamError("malformed port in endpoint '" + endpoint + "'");
    }
    if (port < 0 || port > 65535)
        throw ParamError("port out of range in endpoint '" + endpoint + "'");
    return {endpoint.substr(0, colon), static_cast<uint16_t>(port)};
}

} // namespace hetrain::fed

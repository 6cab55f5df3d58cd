#pragma once

#include <memory>
#include <string>
#include <utility>

#include "hetrain/fed/protocol.hpp"

namespace hetrain::fed {

/// One reliable, ordered message stream between two peers. Implementations
/// frame messages with the protocol's length prefix.
class Connection {
public:
    virtual ~Connection() = default;

    virtual void send(const Message& m) = 0;

    /// Blocks until a frame arrives; throws TimeoutError after timeout_ms,
    /// IoError if the peer vanished, FormatError on a garbled frame.
    virtual Message recv(uint32_t timeout_ms) = 0;

    virtual std::string peer() const = 0;
    virtual void close() = 0;
};

/// Two in-process endpoints joined by queues; either side may be handed to
/// a worker thread.
std::pair<std::unique_ptr<Connection>, std::unique_ptr<Connection>> loopback_pair();

/// Listening TCP socket. host may be a name or address; port 0 picks a free
/// port (see port()).
class TcpListener {
public:
    TcpListener(const std::string& host, uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    uint16_t port() const { return port_; }
    std::string endpoint() const;

    /// Accepts the next connection; timeout_ms 0 waits forever.
    std::unique_ptr<Connection> accept(uint32_t timeout_ms = 0);

    /// True when a connection attempt is already queued.
    bool pending(uint32_t timeout_ms);

private:
    int fd_ = -1;
    uint16_t port_ = 0;
    std::string host_;
};

std::unique_ptr<Connection> tcp_connect(const std::string& host, uint16_t port,
                                        uint32_t timeout_ms);

/// Splits "host:port"; throws ParamError on a malformed endpoint.
std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint);

} // namespace hetrain::fed

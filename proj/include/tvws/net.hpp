#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace tvws::net {

using Clock = std::chrono::steady_clock;

class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public NetError {
public:
    TimeoutError() : NetError("timeout") {}
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;

    std::string to_string() const;
};

// "host:port" (IPv6 literals as "[::1]:port"). Throws NetError.
Endpoint parse_endpoint(std::string_view text);

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const noexcept { return fd_; }
    explicit operator bool() const noexcept { return fd_ >= 0; }
    void close();

private:
    int fd_ = -1;
};

// Bound, listening socket. Port 0 picks an ephemeral port.
Socket listen_tcp(const Endpoint& where, int backlog = 64);
std::uint16_t local_port(const Socket& s);

Socket connect_tcp(const Endpoint& where, Clock::time_point deadline);

// Sends every byte or throws.
void send_all(const Socket& s, std::string_view data, Clock::time_point deadline);

// Buffered LF-delimited reader.
class LineReader {
public:
    explicit LineReader(const Socket& s, std::size_t max_line = 1 << 20)
        : socket_(s), max_line_(max_line) {}

    enum class Status { line, eof, too_long };

    // Reads up to the next LF (not included in `line`). Throws TimeoutError
    // when the deadline passes first.
    Status read_line(std::string& line,
                     std::optional<Clock::time_point> deadline = std::nullopt);

private:
    const Socket& socket_;
    std::size_t max_line_;
    std::string buffer_;
};

} // namespace tvws::net

#include "tvws/net.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <charconv>

namespace tvws::net {
namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

int remaining_ms(std::optional<Clock::time_point> deadline) {
    if (!deadline) {
        return -1;
    }
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
    return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 1 << 30));
}

// Waits for `events` on fd. Returns false on timeout.
bool wait_for(int fd, short events, std::optional<Clock::time_point> deadline) {
    for (;;) {
        pollfd p{fd, events, 0};
        const int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc > 0) {
            return true;
        }
        if (rc == 0) {
            return false;
        }
        if (errno != EINTR) {
            throw NetError(errno_text("poll"));
        }
    }
}

struct AddrInfo {
    addrinfo* head = nullptr;
    ~AddrInfo() {
        if (head) {
            freeaddrinfo(head);
        }
    }
};

void resolve(const Endpoint& where, bool passive, AddrInfo& out) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    const std::string port = std::to_string(where.port);
    const char* host = where.host.empty() ? nullptr : where.host.c_str();
    if (const int rc = getaddrinfo(host, port.c_str(), &hints, &out.head); rc != 0) {
        throw NetError("resolve " + where.to_string() + ": " + gai_strerror(rc));
    }
}

} // namespace

std::string Endpoint::to_string() const {
    if (host.find(':') != std::string::npos) {
        return "[" + host + "]:" + std::to_string(port);
    }
    return host + ":" + std::to_string(port);
}

Endpoint parse_endpoint(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon + 1 == text.size()) {
        throw NetError("expected host:port, got '" + std::string(text) + "'");
    }
    std::string_view host = text.substr(0, colon);
    const std::string_view port_text = text.substr(colon + 1);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
        host = host.substr(1, host.size() - 2);
    }
    unsigned port = 0;
    const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || end != port_text.data() + port_text.size() || port > 65535) {
        throw NetError("invalid port in '" + std::string(text) + "'");
    }
    if (host.empty()) {
        throw NetError("missing host in '" + std::string(text) + "'");
    }
    return {std::string(host), static_cast<std::uint16_t>(port)};
}

Socket::~Socket() { close(); }

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Socket listen_tcp(const Endpoint& where, int backlog) {
    AddrInfo ai;
    resolve(where, true, ai);
    std::string last_error = "no address";
    for (addrinfo* a = ai.head; a != nullptr; a = a->ai_next) {
        Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
        if (!s) {
            last_error = errno_text("socket");
            continue;
        }
        const int one = 1;
        ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(s.fd(), a->ai_addr, a->ai_addrlen) != 0) {
            last_error = errno_text("bind");
            continue;
        }
        if (::listen(s.fd(), backlog) != 0) {
            last_error = errno_text("listen");
            continue;
        }
        return s;
    }
    throw NetError("cannot listen on " + where.to_string() + ": " + last_error);
}

std::uint16_t local_port(const Socket& s) {
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        throw NetError(errno_text("getsockname"));
    }
    if (addr.ss_family == AF_INET6) {
        return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
    return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

Socket connect_tcp(const Endpoint& where, Clock::time_point deadline) {
    AddrInfo ai;
    resolve(where, false, ai);
    std::string last_error = "no address";
    for (addrinfo* a = ai.head; a != nullptr; a = a->ai_next) {
        Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC | SOCK_NONBLOCK,
                          a->ai_protocol));
        if (!s) {
            last_error = errno_text("socket");
            continue;
        }
        if (::connect(s.fd(), a->ai_addr, a->ai_addrlen) != 0) {
            if (errno != EINPROGRESS) {
                last_error = errno_text("connect");
                continue;
            }
            if (!wait_for(s.fd(), POLLOUT, deadline)) {
                throw TimeoutError();
            }
            int err = 0;
            socklen_t len = sizeof err;
            ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
            if (err != 0) {
                errno = err;
                last_error = errno_text("connect");
                continue;
            }
        }
        const int one = 1;
        ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return s;
    }
    throw NetError(where.to_string() + ": " + last_error);
}

void send_all(const Socket& s, std::string_view data, Clock::time_point deadline) {
    while (!data.empty()) {
        const ssize_t n = ::send(s.fd(), data.data(), data.size(), MSG_NOSIGNAL | MSG_DONTWAIT);
        if (n > 0) {
            data.remove_prefix(static_cast<std::size_t>(n));
            continue;
        }
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            if (!wait_for(s.fd(), POLLOUT, deadline)) {
                throw TimeoutError();
            }
            continue;
        }
        throw NetError(errno_text("send"));
    }
}

LineReader::Status LineReader::read_line(std::string& line,
                                         std::optional<Clock::time_point> deadline) {
    for (;;) {
        if (const auto lf = buffer_.find('\n'); lf != std::string::npos) {
            line.assign(buffer_, 0, lf);
            buffer_.erase(0, lf + 1);
            return Status::line;
        }
        if (buffer_.size() > max_line_) {
            return Status::too_long;
        }
        if (!wait_for(socket_.fd(), POLLIN, deadline)) {
            throw TimeoutError();
        }
        char chunk[4096];
        const ssize_t n = ::recv(socket_.fd(), chunk, sizeof chunk, MSG_DONTWAIT);
        if (n > 0) {
            buffer_.append(chunk, static_cast<std::size_t>(n));
            continue;
        }
        if (n == 0) {
            return Status::eof;
        }
        if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) {
            continue;
        }
        if (errno == ECONNRESET) {
            return Status::eof;
        }
        throw NetError(errno_text("recv"));
    }
}

} // namespace tvws::net

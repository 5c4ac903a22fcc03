#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jigsaw/codec.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/keystate.hpp"
#include "jigsaw/wire.hpp"

namespace jigsaw {

struct TransferReport {
    bool ok = false;
    std::string error;  // error kind when !ok
    std::string detail; // human-readable cause
    size_t ps_bits = 0;
    size_t k = 0;
    uint64_t packets_sent = 0;
    uint64_t packets_received = 0;
    uint64_t packets_accepted = 0;
    uint64_t auth_failures = 0;
    uint64_t malformed_packets = 0;
    uint64_t duplicates_dropped = 0;
    uint64_t groups = 0;
    uint64_t parts = 0;
    uint64_t messages = 0;
    uint64_t data_bits = 0;
    uint64_t wire_bytes = 0;
    uint64_t xor_blocks = 0;
    uint64_t mul_blocks = 0;
};

// Fixed field order so seeded runs print identical reports.
inline std::string format_report(const TransferReport& r) {
    std::ostringstream out;
    out << "ok=" << (r.ok ? "true" : "false") << '\n'
        << "error=" << r.error << '\n'
        << "detail=" << r.detail << '\n'
        << "ps_bits=" << r.ps_bits << '\n'
        << "k=" << r.k << '\n'
        << "packets_sent=" << r.packets_sent << '\n'
        << "packets_received=" << r.packets_received << '\n'
        << "packets_accepted=" << r.packets_accepted << '\n'
        << "auth_failures=" << r.auth_failures << '\n'
        << "malformed_packets=" << r.malformed_packets << '\n'
        << "duplicates_dropped=" << r.duplicates_dropped << '\n'
        << "groups=" << r.groups << '\n'
        << "parts=" << r.parts << '\n'
        << "messages=" << r.messages << '\n'
        << "data_bits=" << r.data_bits << '\n'
        << "wire_bytes=" << r.wire_bytes << '\n'
        << "xor_blocks=" << r.xor_blocks << '\n'
        << "mul_blocks=" << r.mul_blocks << '\n';
    return out.str();
}

// Restores strict sequence order: no gaps, no duplicates, bounded holding.
class ReorderBuffer {
public:
    explicit ReorderBuffer(size_t capacity = 4096) : capacity_(capacity) {}

    // False when the packet is stale or already held (duplicate).
    bool push(Packet p) {
        if (p.seq < next_expected_ || held_.count(p.seq))
            return false;
        if (held_.size() >= capacity_)
            throw TransportError("reorder buffer overflow; sequence gap too wide");
        held_.emplace(p.seq, std::move(p));
        return true;
    }

    std::optional<Packet> pop_ready() {
        auto it = held_.find(next_expected_);
        if (it == held_.end())
            return std::nullopt;
        Packet p = std::move(it->second);
        held_.erase(it);
        ++next_expected_;
        return p;
    }

    bool pending() const { return !held_.empty(); }
    uint64_t next_expected() const { return next_expected_; }

private:
    uint64_t next_expected_ = 0;
    std::map<uint64_t, Packet> held_;
    size_t capacity_;
};

// Receiver pipeline: authenticate each packet, restore sequence order,
// deliver payload blocks to the streaming decoder, hand completed messages
// to the sink. Tampered packets are dropped and counted; the resulting
// sequence gap surfaces as a TruncationError when the stream closes.
class PacketReceiver {
public:
    using MessageSink = std::function<void(const BitString&)>;

    PacketReceiver(KeyState key, MessageSink sink)
        : session_(std::move(key)), sink_(std::move(sink)) {
        report_.ps_bits = session_.key.ps_bits;
        report_.k = session_.key.k;
    }

    void feed(std::span<const uint8_t> packet_bytes) {
        ++report_.packets_received;
        report_.wire_bytes += packet_bytes.size();
        Packet p;
        try {
            p = verify_and_parse(session_.key.mac_key, packet_bytes);
        } catch (const AuthFailure&) {
            ++report_.auth_failures;
            return;
        } catch (const MalformedPacket&) {
            ++report_.malformed_packets;
            return;
        }
        if (p.payload.width() != session_.key.ps_bits)
            throw DesyncError("authenticated packet width does not match the key");
        if (!reorder_.push(std::move(p))) {
            ++report_.duplicates_dropped;
            return;
        }
        drain();
    }

    // Stream closed: everything must have been delivered and completed.
    void finish() {
        if (reorder_.pending())
            throw TruncationError("stream ended with a sequence gap");
        if (!session_.idle())
            throw TruncationError("stream ended mid-message");
        if (report_.messages == 0)
            throw TruncationError("stream ended before any message completed");
        report_.ok = true;
    }

    void fail(const Error& e) {
        report_.ok = false;
        report_.error = e.kind();
        report_.detail = e.what();
    }

    const TransferReport& report() {
        report_.groups = session_.counters.groups;
        report_.parts = session_.counters.parts;
        report_.xor_blocks = session_.counters.xor_blocks;
        report_.mul_blocks = session_.counters.mul_blocks;
        return report_;
    }

    const DecodeSession& session() const { return session_; }

private:
    void drain() {
        while (auto p = reorder_.pop_ready()) {
            ++report_.packets_accepted;
            session_.next_seq = reorder_.next_expected();
            bool r_flag = p->flags & kFlagRBlock;
            bool eom = p->flags & kFlagEndOfMessage;
            auto msg = push_block(session_, p->payload, r_flag, eom);
            if (msg) {
                ++report_.messages;
                report_.data_bits += msg->size();
                sink_(*msg);
            }
        }
    }

    DecodeSession session_;
    ReorderBuffer reorder_;
    MessageSink sink_;
    TransferReport report_;
};

// One message -> wire packets: data blocks, then the group's R packet, with
// end-of-message flagged on the final group.
inline std::vector<std::vector<uint8_t>> packetize_message(EncodeSession& session,
                                                           const BitString& data,
                                                           RandomSource& rng) {
    std::vector<std::vector<uint8_t>> packets;
    for (const GroupCiphertext& g : encode_message(session, data, rng, /*flush=*/true)) {
        for (const Block& b : g.data_blocks)
            packets.push_back(serialize_packet(seal(session.next_seq, session.key.mac_key, b, 0)));
        uint8_t flags = kFlagRBlock;
        if (g.end_of_message)
            flags |= kFlagEndOfMessage;
        packets.push_back(
            serialize_packet(seal(session.next_seq, session.key.mac_key, g.r_block, flags)));
    }
    return packets;
}

// In-process receive over an already-delivered packet list (tests, demo).
inline TransferReport receive_packets(const KeyState& key,
                                      const std::vector<std::vector<uint8_t>>& packets,
                                      PacketReceiver::MessageSink sink) {
    PacketReceiver rx(key, std::move(sink));
    try {
        for (const auto& p : packets)
            rx.feed(p);
        rx.finish();
    } catch (const Error& e) {
        rx.fail(e);
    }
    return rx.report();
}

namespace net {

inline std::pair<std::string, uint16_t> parse_hostport(const std::string& address) {
    size_t colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size())
        throw TransportError("address must be host:port");
    int port = 0;
    for (size_t i = colon + 1; i < address.size(); ++i) {
        char c = address[i];
        if (c < '0' || c > '9')
            throw TransportError("bad port in address");
        port = port * 10 + (c - '0');
        if (port > 65535)
            throw TransportError("bad port in address");
    }
    return {address.substr(0, colon), static_cast<uint16_t>(port)};
}

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            close_fd();
            fd_ = o.fd_;
            o.fd_ = -1;
        }
        return *this;
    }
    ~Socket() { close_fd(); }

    bool valid() const { return fd_ >= 0; }

    void set_recv_timeout(int seconds) {
        timeval tv{};
        tv.tv_sec = seconds;
        setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    }

    void send_all(const uint8_t* data, size_t n) {
        size_t off = 0;
        while (off < n) {
            ssize_t w = ::send(fd_, data + off, n - off, MSG_NOSIGNAL);
            if (w < 0) {
                if (errno == EINTR)
                    continue;
                throw TransportError(std::string("send failed: ") + std::strerror(errno));
            }
            off += static_cast<size_t>(w);
        }
    }

    enum class ReadResult { ok, eof, timeout };

    // Reads exactly n bytes. eof is only clean at offset 0; a timeout with
    // partial data or EOF mid-record is a truncated stream.
    ReadResult read_exact(uint8_t* data, size_t n) {
        size_t off = 0;
        while (off < n) {
            ssize_t r = ::recv(fd_, data + off, n - off, 0);
            if (r == 0) {
                if (off == 0)
                    return ReadResult::eof;
                throw TruncationError("stream ended mid-packet");
            }
            if (r < 0) {
                if (errno == EINTR)
                    continue;
                if (errno == EAGAIN || errno == EWOULDBLOCK) {
                    if (off == 0)
                        return ReadResult::timeout;
                    throw TruncationError("receive timeout mid-packet");
                }
                throw TransportError(std::string("recv failed: ") + std::strerror(errno));
            }
            off += static_cast<size_t>(r);
        }
        return ReadResult::ok;
    }

private:
    void close_fd() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }
    int fd_ = -1;
};

inline Socket connect_to(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    std::string service = std::to_string(port);
    int rc = getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0)
        throw TransportError(std::string("resolve failed: ") + gai_strerror(rc));
    Socket sock;
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            sock = Socket(fd);
            break;
        }
        last_error = std::strerror(errno);
        ::close(fd);
    }
    freeaddrinfo(res);
    if (!sock.valid())
        throw TransportError("connect to " + host + ":" + service + " failed: " + last_error);
    return sock;
}

class Listener {
public:
    explicit Listener(const std::string& address) {
        auto [host, port] = parse_hostport(address);
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        hints.ai_flags = AI_PASSIVE;
        addrinfo* res = nullptr;
        std::string service = std::to_string(port);
        int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
        if (rc != 0)
            throw TransportError(std::string("resolve failed: ") + gai_strerror(rc));
        std::string last_error = "no addresses";
        for (addrinfo* ai = res; ai; ai = ai->ai_next) {
            int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0)
                continue;
            int one = 1;
            setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
            if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) {
                fd_ = fd;
                break;
            }
            last_error = std::strerror(errno);
            ::close(fd);
        }
        freeaddrinfo(res);
        if (fd_ < 0)
            throw TransportError("listen on " + address + " failed: " + last_error);
        sockaddr_storage sa{};
        socklen_t len = sizeof sa;
        if (getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len) == 0) {
            if (sa.ss_family == AF_INET)
                port_ = ntohs(reinterpret_cast<sockaddr_in*>(&sa)->sin_port);
            else if (sa.ss_family == AF_INET6)
                port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&sa)->sin6_port);
        }
    }

    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener() {
        if (fd_ >= 0)
            ::close(fd_);
    }

    uint16_t port() const { return port_; }

    Socket accept_one() {
        int fd;
        do {
            fd = ::accept(fd_, nullptr, nullptr);
        } while (fd < 0 && errno == EINTR);
        if (fd < 0)
            throw TransportError(std::string("accept failed: ") + std::strerror(errno));
        return Socket(fd);
    }

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

} // namespace net

// Encode and send the given messages over one connection, one packet per
// block, then close. The report carries the instrumented operation counts.
inline TransferReport send_stream(const std::string& address, const KeyState& key,
                                  const std::vector<std::vector<uint8_t>>& messages,
                                  size_t l_min_bits, RandomSource& rng) {
    TransferReport rep;
    rep.ps_bits = key.ps_bits;
    rep.k = key.k;
    try {
        EncodeSession session(key, l_min_bits);
        auto [host, port] = net::parse_hostport(address);
        net::Socket sock = net::connect_to(host, port);
        for (const auto& msg : messages) {
            BitString bits = BitString::from_bytes(msg);
            rep.data_bits += bits.size();
            for (const auto& pkt : packetize_message(session, bits, rng)) {
                sock.send_all(pkt.data(), pkt.size());
                ++rep.packets_sent;
                rep.wire_bytes += pkt.size();
            }
            ++rep.messages;
        }
        rep.groups = session.counters.groups;
        rep.parts = session.counters.parts;
        rep.xor_blocks = session.counters.xor_blocks;
        rep.mul_blocks = session.counters.mul_blocks;
        rep.ok = true;
    } catch (const Error& e) {
        rep.ok = false;
        rep.error = e.kind();
        rep.detail = e.what();
    }
    return rep;
}

// Accept one connection and receive messages until the peer closes. Every
// completed message goes to the sink in order.
inline TransferReport recv_stream(net::Listener& listener, const KeyState& key,
                                  PacketReceiver::MessageSink sink, int timeout_secs = 5) {
    PacketReceiver rx(key, std::move(sink));
    try {
        net::Socket sock = listener.accept_one();
        sock.set_recv_timeout(timeout_secs > 0 ? timeout_secs : 5);
        std::vector<uint8_t> buf(packet_size_bytes(key.ps_bits));
        for (;;) {
            auto r = sock.read_exact(buf.data(), buf.size());
            if (r == net::Socket::ReadResult::ok) {
                rx.feed(buf);
                continue;
            }
            if (r == net::Socket::ReadResult::timeout && !rx.session().idle())
                throw TruncationError("receive timeout while a message was incomplete");
            break; // clean EOF, or idle timeout treated as end of conversation
        }
        rx.finish();
    } catch (const Error& e) {
        rx.fail(e);
    }
    return rx.report();
}

inline TransferReport recv_stream(const std::string& listen_address, const KeyState& key,
                                  PacketReceiver::MessageSink sink, int timeout_secs = 5) {
    net::Listener listener(listen_address);
    return recv_stream(listener, key, std::move(sink), timeout_secs);
}

} // namespace jigsaw

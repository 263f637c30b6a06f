#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jade/agent.hpp"

namespace jade {
struct RunConfig;
}

/// Remote-agent framing. Every frame is
///     u32 length (little-endian, length of kind byte + body)
///     u8  kind
///     body bytes
/// Integers are little-endian; doubles travel as their IEEE-754 bit pattern
/// in a u64; strings are u32 length + UTF-8 bytes. The exchange per tick is
/// strictly synchronous: the server sends TICK_INPUTS and blocks for
/// TICK_OUTPUTS before moving to the next agent.
namespace jade::wire {

enum class FrameKind : std::uint8_t {
    Register = 1,     // client -> server: agent name
    Registered = 2,   // server -> client: agent id + run seed
    TickInputs = 3,   // server -> client: tick, readings, inbox
    TickOutputs = 4,  // client -> server: tick, output, events seen
    Disconnect = 5,   // either direction, no body
};

struct Frame {
    FrameKind kind = FrameKind::Disconnect;
    std::vector<std::uint8_t> body;
};

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i64(long long v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v);
    void str(const std::string& s);
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    long long i64() { return static_cast<long long>(u64()); }
    double f64();
    std::string str();
    bool ok() const { return ok_; }
    bool at_end() const { return ok_ && pos_ == bytes_.size(); }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
    bool ok_ = true;
};

/// Blocking send/receive on a connected stream socket. recv_frame returns
/// nullopt on EOF, timeout, malformed length, or oversized frame.
bool send_frame(int fd, FrameKind kind, const std::vector<std::uint8_t>& body);
std::optional<Frame> recv_frame(int fd);

void encode_readings(ByteWriter& w, const Readings& readings);
bool decode_readings(ByteReader& r, Readings& readings);
void encode_events(ByteWriter& w, const EventSet& events);
bool decode_events(ByteReader& r, EventSet& events);
void encode_inbox(ByteWriter& w, const std::vector<InboxMessage>& inbox);
bool decode_inbox(ByteReader& r, std::vector<InboxMessage>& inbox);
void encode_output(ByteWriter& w, const AgentOutput& output);
bool decode_output(ByteReader& r, AgentOutput& output);

/// TCP loopback helpers. listen_local binds 127.0.0.1 on an ephemeral port
/// and reports it; returns -1 on failure.
int listen_local(int& port_out);
int connect_local(int port);
int accept_one(int listen_fd);
void close_fd(int fd);
/// Bounds every blocking read on `fd`; 0 clears the bound.
void set_recv_timeout(int fd, int milliseconds);

using PolicyFactory =
    std::function<std::unique_ptr<Policy>(const AgentSpec&, const AgentContext&)>;

/// Client side of the protocol: registers `agent_name` over `fd`, builds the
/// agent from `config`, then serves tick exchanges until DISCONNECT or EOF.
/// Returns the number of ticks served, or -1 on a protocol failure.
long long run_remote_agent(const RunConfig& config, const std::string& agent_name, int fd,
                           const PolicyFactory& make_policy);

}  // namespace jade::wire

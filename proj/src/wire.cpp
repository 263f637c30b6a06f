#include "jade/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "jade/config.hpp"

namespace jade::wire {

namespace {

constexpr std::uint32_t kMaxFrame = 64u * 1024u * 1024u;

bool write_all(int fd, const void* data, std::size_t size) {
    const char* p = static_cast<const char*>(data);
    while (size > 0) {
        ssize_t n = ::send(fd, p, size, MSG_NOSIGNAL);
        if (n <= 0) return false;
        p += n;
        size -= static_cast<std::size_t>(n);
    }
    return true;
}

bool read_all(int fd, void* data, std::size_t size) {
    char* p = static_cast<char*>(data);
    while (size > 0) {
        ssize_t n = ::recv(fd, p, size, 0);
        if (n <= 0) return false;
        p += n;
        size -= static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
}

void ByteWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
}

std::uint8_t ByteReader::u8() {
    if (pos_ + 1 > bytes_.size()) {
        ok_ = false;
        return 0;
    }
    return bytes_[pos_++];
}

std::uint32_t ByteReader::u32() {
    if (pos_ + 4 > bytes_.size()) {
        ok_ = false;
        return 0;
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64() {
    if (pos_ + 8 > bytes_.size()) {
        ok_ = false;
        return 0;
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
}

double ByteReader::f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

std::string ByteReader::str() {
    std::uint32_t size = u32();
    if (!ok_ || pos_ + size > bytes_.size()) {
        ok_ = false;
        return {};
    }
    std::string s(bytes_.begin() + static_cast<long>(pos_),
                  bytes_.begin() + static_cast<long>(pos_ + size));
    pos_ += size;
    return s;
}

bool send_frame(int fd, FrameKind kind, const std::vector<std::uint8_t>& body) {
    std::uint32_t length = static_cast<std::uint32_t>(body.size()) + 1;
    std::uint8_t head[5];
    for (int i = 0; i < 4; ++i) head[i] = static_cast<std::uint8_t>(length >> (8 * i));
    head[4] = static_cast<std::uint8_t>(kind);
    if (!write_all(fd, head, sizeof head)) return false;
    if (!body.empty() && !write_all(fd, body.data(), body.size())) return false;
    return true;
}

std::optional<Frame> recv_frame(int fd) {
    std::uint8_t head[4];
    if (!read_all(fd, head, sizeof head)) return std::nullopt;
    std::uint32_t length = 0;
    for (int i = 0; i < 4; ++i) length |= static_cast<std::uint32_t>(head[i]) << (8 * i);
    if (length < 1 || length > kMaxFrame) return std::nullopt;
    std::uint8_t kind = 0;
    if (!read_all(fd, &kind, 1)) return std::nullopt;
    if (kind < 1 || kind > 5) return std::nullopt;
    Frame frame;
    frame.kind = static_cast<FrameKind>(kind);
    frame.body.resize(length - 1);
    if (!frame.body.empty() && !read_all(fd, frame.body.data(), frame.body.size()))
        return std::nullopt;
    return frame;
}

void encode_readings(ByteWriter& w, const Readings& readings) {
    w.f64(readings.pose.position.x);
    w.f64(readings.pose.position.y);
    w.f64(readings.pose.heading);
    w.u32(static_cast<std::uint32_t>(readings.channels.size()));
    for (const auto& [name, value] : readings.channels) {
        w.str(name);
        w.f64(value);
    }
    w.u32(static_cast<std::uint32_t>(readings.scan.entries.size()));
    for (const ScanEntry& entry : readings.scan.entries) {
        w.str(entry.name);
        w.f64(entry.bearing);
        w.u8(entry.distance ? 1 : 0);
        if (entry.distance) w.f64(*entry.distance);
    }
    w.u32(static_cast<std::uint32_t>(readings.sightings.size()));
    for (const ResourceSighting& s : readings.sightings) {
        w.u32(static_cast<std::uint32_t>(s.id));
        w.f64(s.bearing);
        w.f64(s.distance);
    }
    w.u8(readings.carrying ? 1 : 0);
}

bool decode_readings(ByteReader& r, Readings& readings) {
    readings = {};
    readings.pose.position.x = r.f64();
    readings.pose.position.y = r.f64();
    readings.pose.heading = r.f64();
    std::uint32_t channels = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < channels; ++i) {
        std::string name = r.str();
        double value = r.f64();
        readings.channels[name] = value;
    }
    std::uint32_t entries = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < entries; ++i) {
        ScanEntry entry;
        entry.name = r.str();
        entry.bearing = r.f64();
        if (r.u8()) entry.distance = r.f64();
        readings.scan.entries.push_back(std::move(entry));
    }
    std::uint32_t sightings = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < sightings; ++i) {
        ResourceSighting s;
        s.id = static_cast<int>(r.u32());
        s.bearing = r.f64();
        s.distance = r.f64();
        readings.sightings.push_back(s);
    }
    readings.carrying = r.u8() != 0;
    return r.ok();
}

void encode_events(ByteWriter& w, const EventSet& events) {
    w.u32(static_cast<std::uint32_t>(events.size()));
    for (const EventInstance& event : events) {
        w.str(event.name);
        w.u8(static_cast<std::uint8_t>(event.origin));
        if (std::holds_alternative<double>(event.payload)) {
            w.u8(1);
            w.f64(std::get<double>(event.payload));
        } else if (std::holds_alternative<Vec2>(event.payload)) {
            const Vec2& v = std::get<Vec2>(event.payload);
            w.u8(2);
            w.f64(v.x);
            w.f64(v.y);
        } else {
            w.u8(0);
        }
    }
}

bool decode_events(ByteReader& r, EventSet& events) {
    events.clear();
    std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < count; ++i) {
        EventInstance event;
        event.name = r.str();
        std::uint8_t origin = r.u8();
        if (origin > 3) return false;
        event.origin = static_cast<EventOrigin>(origin);
        std::uint8_t tag = r.u8();
        if (tag == 1) {
            event.payload = r.f64();
        } else if (tag == 2) {
            double x = r.f64();
            double y = r.f64();
            event.payload = Vec2{x, y};
        } else if (tag != 0) {
            return false;
        }
        events.push_back(std::move(event));
    }
    return r.ok();
}

void encode_inbox(ByteWriter& w, const std::vector<InboxMessage>& inbox) {
    w.u32(static_cast<std::uint32_t>(inbox.size()));
    for (const InboxMessage& msg : inbox) {
        w.str(msg.from);
        w.f64(msg.payload);
    }
}

bool decode_inbox(ByteReader& r, std::vector<InboxMessage>& inbox) {
    inbox.clear();
    std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < count; ++i) {
        InboxMessage msg;
        msg.from = r.str();
        msg.payload = r.f64();
        inbox.push_back(std::move(msg));
    }
    return r.ok();
}

void encode_output(ByteWriter& w, const AgentOutput& output) {
    w.u8(output.drive ? 1 : 0);
    if (output.drive) {
        w.f64(output.drive->first);
        w.f64(output.drive->second);
    }
    w.u32(static_cast<std::uint32_t>(output.messages.size()));
    for (const OutgoingMessage& msg : output.messages) {
        w.str(msg.destination);
        w.f64(msg.payload);
    }
    w.u32(static_cast<std::uint32_t>(output.ops.size()));
    for (const ResourceOp& op : output.ops) {
        w.u8(op.kind == ResourceOp::Kind::Pick ? 0 : 1);
        w.u32(static_cast<std::uint32_t>(op.resource_id));
    }
}

bool decode_output(ByteReader& r, AgentOutput& output) {
    output = {};
    if (r.u8()) {
        double left = r.f64();
        double right = r.f64();
        output.drive = {left, right};
    }
    std::uint32_t messages = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < messages; ++i) {
        OutgoingMessage msg;
        msg.destination = r.str();
        msg.payload = r.f64();
        output.messages.push_back(std::move(msg));
    }
    std::uint32_t ops = r.u32();
    for (std::uint32_t i = 0; r.ok() && i < ops; ++i) {
        ResourceOp op;
        op.kind = r.u8() == 0 ? ResourceOp::Kind::Pick : ResourceOp::Kind::Drop;
        op.resource_id = static_cast<int>(r.u32());
        output.ops.push_back(op);
    }
    return r.ok();
}

int listen_local(int& port_out) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd, 4) != 0) {
        ::close(fd);
        return -1;
    }
    socklen_t len = sizeof addr;
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        ::close(fd);
        return -1;
    }
    port_out = ntohs(addr.sin_port);
    return fd;
}

int connect_local(int port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        return -1;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

int accept_one(int listen_fd) {
    int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd >= 0) {
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }
    return fd;
}

void close_fd(int fd) {
    if (fd >= 0) ::close(fd);
}

void set_recv_timeout(int fd, int milliseconds) {
    timeval tv{};
    tv.tv_sec = milliseconds / 1000;
    tv.tv_usec = (milliseconds % 1000) * 1000;
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

long long run_remote_agent(const RunConfig& config, const std::string& agent_name, int fd,
                           const PolicyFactory& make_policy) {
    ByteWriter reg;
    reg.str(agent_name);
    if (!send_frame(fd, FrameKind::Register, reg.bytes())) return -1;
    auto ack = recv_frame(fd);
    if (!ack || ack->kind != FrameKind::Registered) return -1;
    ByteReader ack_reader(ack->body);
    int id = static_cast<int>(ack_reader.u32());
    std::uint64_t run_seed = ack_reader.u64();
    if (!ack_reader.ok()) return -1;

    const AgentSpec* spec = nullptr;
    for (const AgentSpec& candidate : config.agents) {
        if (candidate.name == agent_name) spec = &candidate;
    }
    if (!spec) return -1;

    RunConfig seeded = config;
    seeded.seed = run_seed;
    AgentContext ctx = make_agent_context(seeded, *spec, id);
    std::unique_ptr<Policy> policy;
    if (make_policy) policy = make_policy(*spec, ctx);
    AgentRuntime runtime(*spec, std::move(policy), ctx);

    long long served = 0;
    for (;;) {
        auto frame = recv_frame(fd);
        if (!frame) return served;
        if (frame->kind == FrameKind::Disconnect) return served;
        if (frame->kind != FrameKind::TickInputs) return -1;
        ByteReader r(frame->body);
        long long tick = r.i64();
        Readings readings;
        if (!decode_readings(r, readings)) return -1;
        std::vector<InboxMessage> inbox;
        if (!decode_inbox(r, inbox) || !r.at_end()) return -1;

        AgentOutput output = runtime.step(tick, readings, inbox);

        ByteWriter w;
        w.i64(tick);
        encode_output(w, output);
        encode_events(w, runtime.last_events());
        if (!send_frame(fd, FrameKind::TickOutputs, w.bytes())) return -1;
        ++served;
    }
}

}  // namespace jade::wire

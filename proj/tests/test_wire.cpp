#include "doctest.h"

#include <cmath>
#include <thread>

#include "jade/config.hpp"
#include "jade/engine.hpp"
#include "jade/wire.hpp"

using namespace jade;
using namespace jade::wire;

namespace {

const char* kPairXml =
    "<run seed=\"21\" max_ticks=\"15\"><world w=\"12\" h=\"12\">"
    "<resource x=\"6\" y=\"6\"/></world>"
    "<agent name=\"anna\" x=\"3\" y=\"3\" heading=\"0.4\">"
    "<csm>machine m { initial A;"
    " state A { on TICK -> A do set_wheels(0.6, 0.8); } }</csm>"
    "</agent>"
    "<agent name=\"bob\" x=\"7\" y=\"7\" heading=\"3\">"
    "<device type=\"vision\"/>"
    "<csm>machine m { initial A;"
    " state A { on TICK -> A do set_wheels(0.9, 0.7), send(anna, 7); } }</csm>"
    "</agent></run>";

RunConfig pair_config() {
    ConfigResult parsed = load_config(kPairXml, ".");
    REQUIRE(parsed.config.has_value());
    return *parsed.config;
}

}  // namespace

TEST_CASE("byte codec round trips scalars and strings") {
    ByteWriter w;
    w.u8(7);
    w.u32(0xDEADBEEF);
    w.u64(0x0123456789ABCDEFull);
    w.i64(-5);
    w.f64(3.5);
    w.f64(-0.0);
    w.str("h\xC3\xA9llo");
    w.str("");

    ByteReader r(w.bytes());
    CHECK(r.u8() == 7);
    CHECK(r.u32() == 0xDEADBEEF);
    CHECK(r.u64() == 0x0123456789ABCDEFull);
    CHECK(r.i64() == -5);
    CHECK(r.f64() == 3.5);
    double neg_zero = r.f64();
    CHECK(neg_zero == 0.0);
    CHECK(std::signbit(neg_zero));
    CHECK(r.str() == "h\xC3\xA9llo");
    CHECK(r.str().empty());
    CHECK(r.at_end());

    // Truncated input flips ok() and stays there.
    std::vector<std::uint8_t> short_bytes{1, 2};
    ByteReader bad(short_bytes);
    bad.u32();
    CHECK_FALSE(bad.ok());
    CHECK(bad.u64() == 0);
    CHECK_FALSE(bad.at_end());
}

TEST_CASE("reading sets cross the wire intact") {
    Readings in;
    in.pose = {{1.5, -2.25}, 0.75};
    in.channels = {{"pos_x", 1.5}, {"prox_front", kNoReading}, {"touch_rim", 1}};
    in.scan.entries.push_back({"anna", -0.3, 2.5});
    in.scan.entries.push_back({"cara", 1.1, std::nullopt});
    in.sightings.push_back({4, 0.2, 1.75});
    in.carrying = true;

    ByteWriter w;
    encode_readings(w, in);
    ByteReader r(w.bytes());
    Readings out;
    REQUIRE(decode_readings(r, out));
    CHECK(r.at_end());

    CHECK(out.pose.position.x == 1.5);
    CHECK(out.pose.position.y == -2.25);
    CHECK(out.pose.heading == 0.75);
    CHECK(out.channels == in.channels);
    REQUIRE(out.scan.entries.size() == 2);
    CHECK(out.scan.entries[0].name == "anna");
    CHECK(out.scan.entries[0].distance == 2.5);
    CHECK_FALSE(out.scan.entries[1].distance.has_value());
    REQUIRE(out.sightings.size() == 1);
    CHECK(out.sightings[0].id == 4);
    CHECK(out.sightings[0].distance == 1.75);
    CHECK(out.carrying);
}

TEST_CASE("event sets and inboxes cross the wire intact") {
    EventSet events;
    events.push_back({"TICK", {}, EventOrigin::Sensor});
    events.push_back({"SEEN", 2.5, EventOrigin::Machine});
    events.push_back({"GOAL", Vec2{3, -4}, EventOrigin::Strategy});

    ByteWriter w;
    encode_events(w, events);
    ByteReader r(w.bytes());
    EventSet back;
    REQUIRE(decode_events(r, back));
    REQUIRE(back.size() == 3);
    CHECK(back[0].name == "TICK");
    CHECK_FALSE(back[0].has_payload());
    CHECK(back[0].origin == EventOrigin::Sensor);
    CHECK(std::get<double>(back[1].payload) == 2.5);
    CHECK(std::get<Vec2>(back[2].payload).y == -4);
    CHECK(back[2].origin == EventOrigin::Strategy);

    std::vector<InboxMessage> inbox{{"anna", 7}, {"broadcast", -1.5}};
    ByteWriter wi;
    encode_inbox(wi, inbox);
    ByteReader ri(wi.bytes());
    std::vector<InboxMessage> inbox_back;
    REQUIRE(decode_inbox(ri, inbox_back));
    REQUIRE(inbox_back.size() == 2);
    CHECK(inbox_back[0].from == "anna");
    CHECK(inbox_back[1].payload == -1.5);
}

TEST_CASE("agent outputs cross the wire intact") {
    AgentOutput out;
    out.drive = std::make_pair(0.25, -0.5);
    out.messages.push_back({"pack", 9});
    out.ops.push_back({ResourceOp::Kind::Pick, 3});
    out.ops.push_back({ResourceOp::Kind::Drop, -1});

    ByteWriter w;
    encode_output(w, out);
    ByteReader r(w.bytes());
    AgentOutput back;
    REQUIRE(decode_output(r, back));
    REQUIRE(back.drive.has_value());
    CHECK(back.drive->first == 0.25);
    CHECK(back.drive->second == -0.5);
    REQUIRE(back.messages.size() == 1);
    CHECK(back.messages[0].destination == "pack");
    REQUIRE(back.ops.size() == 2);
    CHECK(back.ops[0].kind == ResourceOp::Kind::Pick);
    CHECK(back.ops[0].resource_id == 3);
    CHECK(back.ops[1].kind == ResourceOp::Kind::Drop);

    AgentOutput empty;
    ByteWriter we;
    encode_output(we, empty);
    ByteReader re(we.bytes());
    AgentOutput empty_back;
    empty_back.drive = std::make_pair(1.0, 1.0);
    REQUIRE(decode_output(re, empty_back));
    CHECK_FALSE(empty_back.drive.has_value());
}

TEST_CASE("frames move across a local socket") {
    int port = 0;
    int lfd = listen_local(port);
    REQUIRE(lfd >= 0);

    std::thread client([port] {
        int fd = connect_local(port);
        REQUIRE(fd >= 0);
        ByteWriter w;
        w.str("bob");
        CHECK(send_frame(fd, FrameKind::Register, w.bytes()));
        auto reply = recv_frame(fd);
        REQUIRE(reply.has_value());
        CHECK(reply->kind == FrameKind::Disconnect);
        CHECK(reply->body.empty());
        close_fd(fd);
    });

    int sfd = accept_one(lfd);
    REQUIRE(sfd >= 0);
    auto frame = recv_frame(sfd);
    REQUIRE(frame.has_value());
    CHECK(frame->kind == FrameKind::Register);
    ByteReader r(frame->body);
    CHECK(r.str() == "bob");
    CHECK(send_frame(sfd, FrameKind::Disconnect, {}));
    client.join();

    // The closed peer reads as end-of-stream, not as a frame.
    CHECK_FALSE(recv_frame(sfd).has_value());
    close_fd(sfd);
    close_fd(lfd);
}

TEST_CASE("a remote agent reproduces the in-process run byte for byte") {
    RunConfig cfg = pair_config();

    Engine local(cfg, Mode::Online, {});
    local.run();
    std::string expected = local.log().text();

    int port = 0;
    int lfd = listen_local(port);
    REQUIRE(lfd >= 0);
    std::thread client([&cfg, port] {
        int fd = connect_local(port);
        REQUIRE(fd >= 0);
        long long served = run_remote_agent(cfg, "bob", fd, nullptr);
        CHECK(served == 15);
        close_fd(fd);
    });

    Engine remote(cfg, Mode::Online, {});
    int sfd = accept_one(lfd);
    REQUIRE(sfd >= 0);
    CHECK(accept_remote_peer(remote, sfd) == "bob");
    remote.run();
    client.join();
    close_fd(lfd);

    CHECK(remote.log().text() == expected);
}

TEST_CASE("a vanished remote is detached and its last command holds") {
    RunConfig cfg = pair_config();

    int port = 0;
    int lfd = listen_local(port);
    REQUIRE(lfd >= 0);
    std::thread client([port] {
        int fd = connect_local(port);
        REQUIRE(fd >= 0);
        ByteWriter reg;
        reg.str("bob");
        CHECK(send_frame(fd, FrameKind::Register, reg.bytes()));
        auto ack = recv_frame(fd);
        REQUIRE(ack.has_value());
        REQUIRE(ack->kind == FrameKind::Registered);
        for (int i = 0; i < 3; ++i) {
            auto inputs = recv_frame(fd);
            REQUIRE(inputs.has_value());
            ByteReader r(inputs->body);
            long long tick = r.i64();
            ByteWriter w;
            w.i64(tick);
            AgentOutput out;
            out.drive = std::make_pair(0.5, 0.5);
            encode_output(w, out);
            encode_events(w, {});
            CHECK(send_frame(fd, FrameKind::TickOutputs, w.bytes()));
        }
        close_fd(fd);  // vanish mid-run
    });

    Engine engine(cfg, Mode::Online, {});
    int sfd = accept_one(lfd);
    REQUIRE(sfd >= 0);
    REQUIRE(accept_remote_peer(engine, sfd) == "bob");
    RunReport report = engine.run();
    client.join();
    close_fd(lfd);

    CHECK(report.ticks == 15);
    std::string text = engine.log().text();
    CHECK(text.find("remote agent 'bob' detached") != std::string::npos);
    // The held command keeps steering: the last tick still checkpoints.
    auto log = parse_log(text);
    CHECK(log.complete);
}

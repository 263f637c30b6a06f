#include <string>

#include "doctest.h"
#include "jade/config.hpp"
#include "jade/engine.hpp"

using namespace jade;

namespace {

const char* kDriverXml =
    "<run seed=\"11\" max_ticks=\"60\"><world w=\"10\" h=\"10\">"
    "<home owner=\"a\" x=\"6\" y=\"4\" w=\"2\" h=\"2\"/>"
    "<resource x=\"3.3\" y=\"5\"/></world>"
    "<agent name=\"a\" x=\"3\" y=\"5\" heading=\"0\">"
    "<device type=\"vision\"/>"
    "<csm>machine m { initial A;"
    " state A { on TICK -> B do pick, set_wheels(1, 1); }"
    " state B { on TICK if pos_x > 6.5 -> C do drop, set_wheels(0, 0); on TICK -> B; }"
    " state C {} }</csm>"
    "</agent>"
    "<agent name=\"b\" x=\"7\" y=\"8\" heading=\"2\">"
    "<csm>machine m { initial A; state A { on TICK -> A do set_wheels(0.7, 1); } }</csm>"
    "</agent></run>";

RunConfig config_or_die(const std::string& xml) {
    auto result = load_config(xml, "");
    REQUIRE_MESSAGE(result.config.has_value(), format_diagnostics(result.diagnostics));
    return *result.config;
}

std::string fresh_log_text() {
    RunConfig cfg = config_or_die(kDriverXml);
    Engine engine(cfg, Mode::Online);
    engine.run();
    return engine.log().text();
}

}  // namespace

TEST_CASE("replay of a fresh run passes") {
    RunConfig cfg = config_or_die(kDriverXml);
    Engine live(cfg, Mode::Online);
    live.run();

    // The run moved, picked, and dropped; otherwise this test is too easy.
    auto parsed = parse_log(live.log().text());
    int pck = 0, drp = 0;
    for (const auto& r : parsed.records) {
        if (r.kind == RecordKind::Pck) ++pck;
        if (r.kind == RecordKind::Drp) ++drp;
    }
    CHECK(pck == 1);
    CHECK(drp == 1);

    Engine checker(cfg, Mode::Offline);
    std::uint64_t before = checker.state_digest();
    ReplayReport report = checker.verify_log(parsed);
    CHECK(report.verdict == ReplayVerdict::Pass);
    CHECK(report.tick == 59);
    // Offline verification leaves the engine untouched.
    CHECK(checker.state_digest() == before);
}

TEST_CASE("a flipped command digit is caught at its exact tick") {
    std::string text = fresh_log_text();
    // Tick 5 command for agent 1 is "0.7 1"; bend one digit.
    std::string needle = "5|CMD|1|0.7 1\n";
    auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    text.replace(at, needle.size(), "5|CMD|1|0.8 1\n");

    RunConfig cfg = config_or_die(kDriverXml);
    Engine checker(cfg, Mode::Offline);
    ReplayReport report = checker.verify_log(parse_log(text));
    CHECK(report.verdict == ReplayVerdict::Diverged);
    CHECK(report.tick == 5);
    CHECK(report.detail.find("checkpoint") != std::string::npos);
}

TEST_CASE("an invented pick is caught") {
    std::string text = fresh_log_text();
    // Agent b never picks; forge a pick far out of reach at tick 2.
    std::string needle = "2|CMD|1|";
    auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    text.insert(at, "2|PCK|1|0\n");

    RunConfig cfg = config_or_die(kDriverXml);
    Engine checker(cfg, Mode::Offline);
    ReplayReport report = checker.verify_log(parse_log(text));
    CHECK(report.verdict == ReplayVerdict::Diverged);
    CHECK(report.tick == 2);
}

TEST_CASE("a truncated log verifies what it can and reports PARTIAL") {
    std::string text = fresh_log_text();
    // Cut mid-way through tick 9's block.
    std::string needle = "9|CMD|1|";
    auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    std::string cut = text.substr(0, at + 4);  // leaves a dangling line too

    RunConfig cfg = config_or_die(kDriverXml);
    Engine checker(cfg, Mode::Offline);
    auto parsed = parse_log(cut);
    CHECK_FALSE(parsed.complete);
    ReplayReport report = checker.verify_log(parsed);
    CHECK(report.verdict == ReplayVerdict::Partial);
    CHECK(report.tick == 8);
}

TEST_CASE("logs from a different config or seed are refused") {
    std::string text = fresh_log_text();

    std::string other_xml(kDriverXml);
    auto at = other_xml.find("max_ticks=\"60\"");
    other_xml.replace(at, 14, "max_ticks=\"61\"");
    RunConfig other = config_or_die(other_xml);
    Engine wrong_config(other, Mode::Offline);
    ReplayReport refused = wrong_config.verify_log(parse_log(text));
    CHECK(refused.verdict == ReplayVerdict::Refused);
    CHECK(refused.detail.find("digest") != std::string::npos);

    RunConfig cfg = config_or_die(kDriverXml);
    cfg.seed = 999;  // header says 11
    Engine wrong_seed(cfg, Mode::Offline);
    ReplayReport refused2 = wrong_seed.verify_log(parse_log(text));
    CHECK(refused2.verdict == ReplayVerdict::Refused);
    CHECK(refused2.detail.find("seed") != std::string::npos);

    // A used engine refuses outright.
    Engine used(cfg, Mode::Online);
    used.tick();
    CHECK_THROWS_AS(used.verify_log(parse_log(text)), EngineError);
}

TEST_CASE("headerless logs are refused, not crashed on") {
    RunConfig cfg = config_or_die(kDriverXml);
    Engine checker(cfg, Mode::Offline);
    ReplayReport report = checker.verify_log(parse_log("garbage\n"));
    CHECK(report.verdict == ReplayVerdict::Refused);
}

#include "doctest.h"

#include "jade/config.hpp"
#include "jade/engine.hpp"

using namespace jade;

namespace {

const char* kSceneXml =
    "<run seed=\"5\" max_ticks=\"10\"><world w=\"10\" h=\"10\">"
    "<obstacle points=\"8,8 9,8 8.5,9\"/>"
    "<floor rows=\"2\" cols=\"2\" data=\"1 0.2 1 1\"/>"
    "<home owner=\"runner\" x=\"0.5\" y=\"0.5\" w=\"1\" h=\"1\"/>"
    "<resource x=\"8\" y=\"2\"/></world>"
    "<agent name=\"runner\" color=\"#ff0000\" x=\"2\" y=\"5\" heading=\"0\">"
    "<csm>machine m { initial A; state A { on TICK -> A do set_wheels(1, 1); } }</csm>"
    "</agent>"
    "<agent name=\"statue\" color=\"not a color!!\" x=\"5\" y=\"8\" heading=\"1\"/>"
    "</run>";

RunConfig scene_config() {
    ConfigResult parsed = load_config(kSceneXml, ".");
    REQUIRE(parsed.config.has_value());
    return *parsed.config;
}

std::string scene_log() {
    RunConfig cfg = scene_config();
    Engine live(cfg, Mode::Online, {});
    live.run();
    return live.log().text();
}

std::size_t count_needle(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = hay.find(needle); at != std::string::npos;
         at = hay.find(needle, at + needle.size())) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("overview mode renders the whole run as one document") {
    RunConfig cfg = scene_config();
    Engine offline(cfg, Mode::Offline, {});
    std::vector<std::string> docs =
        offline.render_trace(parse_log(scene_log()), {});

    REQUIRE(docs.size() == 1);
    const std::string& doc = docs[0];
    CHECK(doc.find("<svg xmlns=") != std::string::npos);
    CHECK(doc.find("width=\"600\" height=\"600\" viewBox=\"0 0 10 10\"") !=
          std::string::npos);
    CHECK(doc.find("scale(1 -1)") != std::string::npos);
    CHECK(doc.rfind("</svg>\n") == doc.size() - 7);
}

TEST_CASE("moving agents leave a trail and parked agents draw none") {
    RunConfig cfg = scene_config();
    Engine offline(cfg, Mode::Offline, {});
    std::string doc = offline.render_trace(parse_log(scene_log()), {})[0];

    CHECK(count_needle(doc, "<polyline") == 1);
    CHECK(doc.find("stroke=\"#ff0000\"") != std::string::npos);
    // The statue's "not a color!!" never reaches the SVG.
    CHECK(doc.find("not a color") == std::string::npos);
    CHECK(doc.find("steelblue") != std::string::npos);
}

TEST_CASE("frames mode emits one document per interval") {
    RunConfig cfg = scene_config();
    Engine offline(cfg, Mode::Offline, {});
    LogParseResult log = parse_log(scene_log());

    RenderOptions opts;
    opts.mode = RenderOptions::Mode::Frames;
    opts.every = 4;
    CHECK(offline.render_trace(log, opts).size() == 3);  // ticks 0, 4, 8

    opts.every = 1;
    CHECK(offline.render_trace(log, opts).size() == 10);
}

TEST_CASE("world furniture is drawn once per document") {
    RunConfig cfg = scene_config();
    Engine offline(cfg, Mode::Offline, {});
    std::string doc = offline.render_trace(parse_log(scene_log()), {})[0];

    CHECK(doc.find("fill=\"#8a8a8a\"") != std::string::npos);   // obstacle
    CHECK(doc.find("stroke=\"#b8860b\"") != std::string::npos);  // home outline
    CHECK(doc.find("fill=\"#2e8b57\"") != std::string::npos);    // field resource
    // One dark floor cell; the three bright ones merge with the background.
    CHECK(count_needle(doc, "fill=\"rgb(") == 1);
    CHECK(doc.find("fill=\"rgb(51,51,51)\"") != std::string::npos);
}

TEST_CASE("a log with no records renders the initial state") {
    RunConfig cfg = scene_config();
    Engine offline(cfg, Mode::Offline, {});
    std::string header_only =
        format_header({1, cfg.seed, config_digest(cfg)});
    std::vector<std::string> docs =
        offline.render_trace(parse_log(header_only), {});

    REQUIRE(docs.size() == 1);
    // Two agent discs plus the resource dot, but no trails yet.
    CHECK(count_needle(docs[0], "<circle") == 3);
    CHECK(count_needle(docs[0], "<polyline") == 0);
}

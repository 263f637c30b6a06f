#include <cmath>

#include "jade/engine.hpp"

namespace jade {

namespace {

// Colors flow from config text into SVG attributes; anything beyond a plain
// color word or #rgb form falls back to a default.
std::string safe_color(const std::string& raw, const char* fallback) {
    if (raw.empty() || raw.size() > 20) return fallback;
    for (char c : raw) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '#';
        if (!ok) return fallback;
    }
    return raw;
}

void append_num(std::string& out, double v) { out += format_double(v); }

void append_point(std::string& out, const Vec2& p) {
    append_num(out, p.x);
    out += ',';
    append_num(out, p.y);
}

struct SvgBuilder {
    std::string body;

    void open(const WorldMap& world, double scale) {
        body += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
        append_num(body, world.width * scale);
        body += "\" height=\"";
        append_num(body, world.height * scale);
        body += "\" viewBox=\"0 0 ";
        append_num(body, world.width);
        body += ' ';
        append_num(body, world.height);
        body += "\">\n<rect width=\"";
        append_num(body, world.width);
        body += "\" height=\"";
        append_num(body, world.height);
        body += "\" fill=\"#fcfcf8\" stroke=\"#333\" stroke-width=\"0.05\"/>\n";
        // World y points up; flip into SVG's downward axis once here.
        body += "<g transform=\"translate(0 ";
        append_num(body, world.height);
        body += ") scale(1 -1)\">\n";
    }

    void floor(const WorldMap& world) {
        const FloorGrid& grid = world.floor;
        if (grid.values.empty()) return;
        bool uniform = true;
        for (double v : grid.values) {
            if (v != grid.values[0]) uniform = false;
        }
        if (uniform) return;
        double cw = world.width / grid.cols;
        double ch = world.height / grid.rows;
        for (int r = 0; r < grid.rows; ++r) {
            for (int c = 0; c < grid.cols; ++c) {
                double v = grid.values[static_cast<std::size_t>(r * grid.cols + c)];
                if (v >= 0.999) continue;  // bright cells stay background
                int level = static_cast<int>(std::lround(255 * v));
                body += "<rect x=\"";
                append_num(body, c * cw);
                body += "\" y=\"";
                append_num(body, r * ch);
                body += "\" width=\"";
                append_num(body, cw);
                body += "\" height=\"";
                append_num(body, ch);
                body += "\" fill=\"rgb(" + std::to_string(level) + ',' +
                        std::to_string(level) + ',' + std::to_string(level) + ")\"/>\n";
            }
        }
    }

    void obstacles(const WorldMap& world) {
        for (const Polygon& poly : world.obstacles) {
            body += "<polygon points=\"";
            for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
                if (i) body += ' ';
                append_point(body, poly.vertices[i]);
            }
            body += "\" fill=\"#8a8a8a\" stroke=\"#555\" stroke-width=\"0.02\"/>\n";
        }
    }

    void homes(const WorldMap& world) {
        for (const HomeZone& home : world.homes) {
            body += "<rect x=\"";
            append_num(body, home.origin.x);
            body += "\" y=\"";
            append_num(body, home.origin.y);
            body += "\" width=\"";
            append_num(body, home.width);
            body += "\" height=\"";
            append_num(body, home.height);
            body += "\" fill=\"none\" stroke=\"#b8860b\" stroke-width=\"0.04\" "
                    "stroke-dasharray=\"0.12 0.08\"/>\n";
        }
    }

    void trajectory(const std::vector<Vec2>& points, const std::string& color) {
        if (points.size() < 2) return;
        double wander = 0;
        for (const Vec2& p : points) wander = std::max(wander, distance(p, points[0]));
        if (wander < 1e-12) return;  // a parked agent draws no polyline
        body += "<polyline points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i) body += ' ';
            append_point(body, points[i]);
        }
        body += "\" fill=\"none\" stroke=\"" + color +
                "\" stroke-width=\"0.025\" stroke-opacity=\"0.55\"/>\n";
    }

    void resource(const Vec2& position, Resource::Status status) {
        const char* fill = status == Resource::Status::Stored ? "#cc7722" : "#2e8b57";
        body += "<circle cx=\"";
        append_num(body, position.x);
        body += "\" cy=\"";
        append_num(body, position.y);
        body += "\" r=\"0.07\" fill=\"";
        body += fill;
        body += "\"/>\n";
    }

    void agent(const Pose& pose, double radius, const std::string& color) {
        body += "<circle cx=\"";
        append_num(body, pose.position.x);
        body += "\" cy=\"";
        append_num(body, pose.position.y);
        body += "\" r=\"";
        append_num(body, radius);
        body += "\" fill=\"" + color + "\" fill-opacity=\"0.85\" stroke=\"#222\" "
                "stroke-width=\"0.02\"/>\n";
        Vec2 tip = pose.position + dir(pose.heading) * radius;
        body += "<line x1=\"";
        append_num(body, pose.position.x);
        body += "\" y1=\"";
        append_num(body, pose.position.y);
        body += "\" x2=\"";
        append_num(body, tip.x);
        body += "\" y2=\"";
        append_num(body, tip.y);
        body += "\" stroke=\"#222\" stroke-width=\"0.03\"/>\n";
    }

    std::string close() {
        body += "</g>\n</svg>\n";
        return std::move(body);
    }
};

}  // namespace

std::vector<std::string> Engine::render_trace(const LogParseResult& log,
                                              const RenderOptions& options) const {
    struct Frame {
        long long tick;
        std::vector<Pose> poses;
        std::vector<Resource> resources;
    };
    std::vector<std::vector<Vec2>> trails(peers_.size());
    for (std::size_t i = 0; i < peers_.size(); ++i) {
        trails[i].push_back(peers_[i].pose.position);
    }
    std::vector<Frame> frames;
    long long every = options.every < 1 ? 1 : options.every;
    bool overview = options.mode == RenderOptions::Mode::Overview;
    Frame last;
    bool saw_any = false;

    replay_core(log, [&](long long tick, const std::vector<KinState>& state,
                         const std::vector<Resource>& resources) {
        for (std::size_t i = 0; i < state.size(); ++i) {
            trails[i].push_back(state[i].pose.position);
        }
        if (overview) {
            last.tick = tick;
            last.poses.clear();
            for (const KinState& peer : state) last.poses.push_back(peer.pose);
            last.resources = resources;
            saw_any = true;
        } else if (tick % every == 0) {
            Frame frame;
            frame.tick = tick;
            for (const KinState& peer : state) frame.poses.push_back(peer.pose);
            frame.resources = resources;
            frames.push_back(std::move(frame));
        }
    });
    if (overview && saw_any) frames.push_back(std::move(last));

    // A log with no replayable ticks still renders the initial state.
    if (frames.empty()) {
        Frame frame;
        frame.tick = -1;
        for (const Peer& peer : peers_) frame.poses.push_back(peer.pose);
        frame.resources = world_.resources;
        frames.push_back(std::move(frame));
    }

    std::vector<std::string> docs;
    for (const Frame& frame : frames) {
        SvgBuilder svg;
        svg.open(world_, options.scale);
        svg.floor(world_);
        svg.obstacles(world_);
        svg.homes(world_);
        for (std::size_t i = 0; i < peers_.size(); ++i) {
            std::string color = safe_color(peers_[i].spec.color, "steelblue");
            // Frames draw the trail up to their own tick; the overview draws
            // everything.
            std::vector<Vec2> upto;
            std::size_t limit =
                overview ? trails[i].size()
                         : std::min<std::size_t>(trails[i].size(),
                                                 static_cast<std::size_t>(frame.tick + 2));
            upto.assign(trails[i].begin(), trails[i].begin() + static_cast<long>(limit));
            svg.trajectory(upto, color);
        }
        for (const Resource& res : frame.resources) {
            if (res.status == Resource::Status::Carried) continue;
            svg.resource(res.position, res.status);
        }
        for (std::size_t i = 0; i < peers_.size(); ++i) {
            svg.agent(frame.poses[i], peers_[i].spec.body_radius,
                      safe_color(peers_[i].spec.color, "steelblue"));
        }
        docs.push_back(svg.close());
    }
    return docs;
}

}  // namespace jade

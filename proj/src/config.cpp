#include "jade/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "jade/checksum.hpp"
#include "jade/csm.hpp"
#include "jade/logfmt.hpp"
#include "jade/rng.hpp"
#include "jade/xml.hpp"

namespace jade {

namespace {

struct Loader {
    Diagnostics& diags;
    std::string base_dir;
    StrategyCatalog catalog;

    void error(const xml::Node& at, const std::string& code, const std::string& message) {
        diags.push_back({Severity::Error, code, message, at.line, at.col});
    }
    void warn(const xml::Node& at, const std::string& code, const std::string& message) {
        diags.push_back({Severity::Warning, code, message, at.line, at.col});
    }

    const std::string* attr(const xml::Node& node, const std::string& name) {
        return node.attr(name);
    }

    std::optional<double> double_attr(const xml::Node& node, const std::string& name) {
        const std::string* raw = node.attr(name);
        if (!raw) return std::nullopt;
        auto value = parse_double(*raw);
        if (!value || !std::isfinite(*value)) {
            error(node, "bad-number", "attribute '" + name + "' is not a finite number");
            return std::nullopt;
        }
        return value;
    }

    double double_attr_or(const xml::Node& node, const std::string& name, double fallback) {
        auto v = double_attr(node, name);
        return v ? *v : fallback;
    }

    std::optional<double> require_double(const xml::Node& node, const std::string& name) {
        if (!node.attr(name)) {
            error(node, "missing-attr",
                  "<" + node.name + "> requires attribute '" + name + "'");
            return std::nullopt;
        }
        return double_attr(node, name);
    }

    std::optional<long long> int_attr(const xml::Node& node, const std::string& name) {
        const std::string* raw = node.attr(name);
        if (!raw) return std::nullopt;
        long long value = 0;
        auto res = std::from_chars(raw->data(), raw->data() + raw->size(), value);
        if (res.ec != std::errc() || res.ptr != raw->data() + raw->size()) {
            error(node, "bad-number", "attribute '" + name + "' is not an integer");
            return std::nullopt;
        }
        return value;
    }

    std::optional<std::string> require_name(const xml::Node& node, const std::string& name) {
        const std::string* raw = node.attr(name);
        if (!raw) {
            error(node, "missing-attr",
                  "<" + node.name + "> requires attribute '" + name + "'");
            return std::nullopt;
        }
        if (!valid_name(*raw)) {
            error(node, "bad-name",
                  "'" + *raw + "' is not a valid name ([A-Za-z_][A-Za-z0-9_-]*)");
            return std::nullopt;
        }
        return *raw;
    }

    void parse_world(const xml::Node& node, RunConfig& cfg) {
        auto w = require_double(node, "w");
        auto h = require_double(node, "h");
        if (w) cfg.world.width = *w;
        if (h) cfg.world.height = *h;
        if ((w && *w <= 0) || (h && *h <= 0))
            error(node, "bad-world", "world dimensions must be positive");

        for (const auto& child : node.children) {
            if (child.name == "obstacle") {
                parse_obstacle(child, cfg);
            } else if (child.name == "floor") {
                parse_floor(child, cfg);
            } else if (child.name == "home") {
                parse_home(child, cfg);
            } else if (child.name == "resource") {
                parse_resource(child, cfg);
            } else {
                error(child, "unknown-element", "unexpected <" + child.name + "> in <world>");
            }
        }
    }

    void parse_obstacle(const xml::Node& node, RunConfig& cfg) {
        const std::string* points = node.attr("points");
        if (!points) {
            error(node, "missing-attr", "<obstacle> requires attribute 'points'");
            return;
        }
        Polygon poly;
        // "x,y x,y ..." pairs
        for (const std::string& pair : split_fields(*points)) {
            std::size_t comma = pair.find(',');
            if (comma == std::string::npos) {
                error(node, "bad-polygon", "point '" + pair + "' is not x,y");
                return;
            }
            auto x = parse_double(pair.substr(0, comma));
            auto y = parse_double(pair.substr(comma + 1));
            if (!x || !y) {
                error(node, "bad-polygon", "point '" + pair + "' is not numeric");
                return;
            }
            poly.vertices.push_back({*x, *y});
        }
        if (!poly.convex_ccw()) {
            error(node, "bad-polygon",
                  "obstacle must be a convex counter-clockwise polygon with at least 3 vertices");
            return;
        }
        for (const Vec2& v : poly.vertices) {
            if (!cfg.world.in_bounds(v)) {
                error(node, "out-of-bounds", "obstacle vertex outside the world");
                return;
            }
        }
        cfg.world.obstacles.push_back(std::move(poly));
    }

    void parse_floor(const xml::Node& node, RunConfig& cfg) {
        auto rows = int_attr(node, "rows");
        auto cols = int_attr(node, "cols");
        const std::string* data = node.attr("data");
        if (!rows || !cols || !data) {
            error(node, "missing-attr", "<floor> requires rows, cols, and data");
            return;
        }
        if (*rows < 1 || *cols < 1) {
            error(node, "bad-floor", "floor grid must be at least 1x1");
            return;
        }
        FloorGrid grid;
        grid.rows = static_cast<int>(*rows);
        grid.cols = static_cast<int>(*cols);
        grid.values.clear();  // the default grid is a 1x1 bright cell
        for (const std::string& field : split_fields(*data)) {
            auto v = parse_double(field);
            if (!v || *v < 0 || *v > 1) {
                error(node, "bad-floor", "floor value '" + field + "' not in [0, 1]");
                return;
            }
            grid.values.push_back(*v);
        }
        if (grid.values.size() != static_cast<std::size_t>(grid.rows * grid.cols)) {
            error(node, "bad-floor", "floor data has " + std::to_string(grid.values.size()) +
                                         " values, expected " +
                                         std::to_string(grid.rows * grid.cols));
            return;
        }
        cfg.world.floor = std::move(grid);
    }

    void parse_home(const xml::Node& node, RunConfig& cfg) {
        auto owner = require_name(node, "owner");
        auto x = require_double(node, "x");
        auto y = require_double(node, "y");
        auto w = require_double(node, "w");
        auto h = require_double(node, "h");
        if (!owner || !x || !y || !w || !h) return;
        if (*w <= 0 || *h <= 0) {
            error(node, "bad-home", "home extent must be positive");
            return;
        }
        if (!cfg.world.in_bounds({*x, *y}) || !cfg.world.in_bounds({*x + *w, *y + *h})) {
            error(node, "out-of-bounds", "home rectangle outside the world");
            return;
        }
        cfg.world.homes.push_back({*owner, {*x, *y}, *w, *h});
    }

    void parse_resource(const xml::Node& node, RunConfig& cfg) {
        auto x = require_double(node, "x");
        auto y = require_double(node, "y");
        if (!x || !y) return;
        Vec2 p{*x, *y};
        if (!cfg.world.in_bounds(p)) {
            error(node, "out-of-bounds", "resource outside the world");
            return;
        }
        for (const Polygon& poly : cfg.world.obstacles) {
            if (poly.contains(p)) {
                error(node, "bad-resource", "resource inside an obstacle");
                return;
            }
        }
        Resource res;
        res.id = static_cast<int>(cfg.world.resources.size());
        res.position = p;
        res.status = Resource::Status::InField;
        cfg.world.resources.push_back(res);
    }

    void parse_scenario(const xml::Node& node, RunConfig& cfg) {
        auto name = require_name(node, "name");
        if (!name) return;
        cfg.scenario.name = *name;
        for (const auto& [key, value] : node.attrs) {
            if (key == "name") continue;
            auto v = parse_double(value);
            if (!v || !std::isfinite(*v)) {
                error(node, "bad-number", "scenario parameter '" + key + "' is not numeric");
                continue;
            }
            cfg.scenario.params[key] = *v;
        }
        for (const auto& child : node.children) {
            if (child.name != "param") {
                error(child, "unknown-element", "unexpected <" + child.name + "> in <scenario>");
                continue;
            }
            auto pname = require_name(child, "name");
            auto pvalue = require_double(child, "value");
            if (pname && pvalue) cfg.scenario.params[*pname] = *pvalue;
        }
    }

    void default_sensors(DeviceSuite& suite) {
        suite.floor_sensor = true;
        suite.odometry = true;
        suite.touch = {
            {"front_left", kPi / 6, kPi / 4},
            {"front_right", -kPi / 6, kPi / 4},
            {"rear_left", kPi - kPi / 6, kPi / 4},
            {"rear_right", -(kPi - kPi / 6), kPi / 4},
        };
        suite.proximity = {
            {"front_left", kPi / 6, 1.0},
            {"front_right", -kPi / 6, 1.0},
        };
    }

    void parse_device(const xml::Node& node, AgentSpec& spec, bool& saw_sensor) {
        const std::string* type = node.attr("type");
        if (!type) {
            error(node, "missing-attr", "<device> requires attribute 'type'");
            return;
        }
        if (*type == "drive") {
            spec.wheel_base = double_attr_or(node, "wheel_base", spec.wheel_base);
            spec.max_speed = double_attr_or(node, "max_speed", spec.max_speed);
            spec.max_accel = double_attr_or(node, "max_accel", spec.max_accel);
            if (spec.wheel_base <= 0 || spec.max_speed <= 0 || spec.max_accel <= 0)
                error(node, "bad-device", "drive parameters must be positive");
            return;
        }
        saw_sensor = true;
        if (*type == "floor") {
            spec.devices.floor_sensor = true;
        } else if (*type == "odometry") {
            spec.devices.odometry = true;
            spec.devices.wheel_radius =
                double_attr_or(node, "wheel_radius", spec.devices.wheel_radius);
            auto ticks = int_attr(node, "ticks_per_rev");
            if (ticks) spec.devices.ticks_per_rev = static_cast<int>(*ticks);
            if (spec.devices.wheel_radius <= 0 || spec.devices.ticks_per_rev <= 0)
                error(node, "bad-device", "odometry parameters must be positive");
        } else if (*type == "touch") {
            auto name = require_name(node, "name");
            if (!name) return;
            TouchSensor sensor;
            sensor.name = *name;
            sensor.center_angle = double_attr_or(node, "angle", 0);
            sensor.half_width = double_attr_or(node, "width", kPi / 4);
            if (sensor.half_width <= 0) {
                error(node, "bad-device", "touch width must be positive");
                return;
            }
            for (const TouchSensor& other : spec.devices.touch) {
                if (other.name == sensor.name) {
                    error(node, "duplicate-device", "touch sensor '" + sensor.name + "' declared twice");
                    return;
                }
            }
            spec.devices.touch.push_back(sensor);
        } else if (*type == "proximity") {
            auto name = require_name(node, "name");
            if (!name) return;
            ProximitySensor sensor;
            sensor.name = *name;
            sensor.mount_angle = double_attr_or(node, "angle", 0);
            sensor.range = double_attr_or(node, "range", 1.0);
            if (sensor.range <= 0) {
                error(node, "bad-device", "proximity range must be positive");
                return;
            }
            for (const ProximitySensor& other : spec.devices.proximity) {
                if (other.name == sensor.name) {
                    error(node, "duplicate-device",
                          "proximity sensor '" + sensor.name + "' declared twice");
                    return;
                }
            }
            spec.devices.proximity.push_back(sensor);
        } else if (*type == "vision") {
            VisionSensor sensor;
            sensor.range = double_attr_or(node, "range", 2.0);
            if (sensor.range <= 0) {
                error(node, "bad-device", "vision range must be positive");
                return;
            }
            spec.devices.vision = sensor;
        } else {
            error(node, "unknown-device", "unknown device type '" + *type + "'");
        }
    }

    void parse_agent(const xml::Node& node, RunConfig& cfg) {
        AgentSpec spec;
        auto name = require_name(node, "name");
        if (!name) return;
        spec.name = *name;
        if (const std::string* color = node.attr("color")) spec.color = *color;
        spec.body_radius = double_attr_or(node, "radius", spec.body_radius);
        if (spec.body_radius <= 0) {
            error(node, "bad-agent", "agent radius must be positive");
            return;
        }
        auto x = require_double(node, "x");
        auto y = require_double(node, "y");
        if (!x || !y) return;
        double heading = double_attr_or(node, "heading", 0);
        spec.initial_pose = Pose{{*x, *y}, heading};
        if (const std::string* strategy = node.attr("strategy")) {
            if (!valid_name(*strategy)) {
                error(node, "bad-name", "strategy '" + *strategy + "' is not a valid name");
                return;
            }
            spec.strategy = *strategy;
        }
        auto memcap = int_attr(node, "memory_capacity");
        if (memcap) {
            if (*memcap < 0) {
                error(node, "bad-agent", "memory_capacity must be >= 0");
                return;
            }
            spec.memory_capacity = static_cast<std::size_t>(*memcap);
        }

        if (const std::string* csm_file = node.attr("csm")) {
            namespace fs = std::filesystem;
            fs::path path(*csm_file);
            if (path.is_relative()) {
                if (base_dir.empty()) {
                    error(node, "csm-io", "relative csm path with no base directory");
                    return;
                }
                path = fs::path(base_dir) / path;
            }
            std::ifstream in(path, std::ios::binary);
            if (!in) {
                error(node, "csm-io", "cannot open csm file '" + path.string() + "'");
                return;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            spec.csm_source = buf.str();
        }

        bool saw_sensor = false;
        bool saw_device = false;
        for (const auto& child : node.children) {
            if (child.name == "device") {
                saw_device = true;
                parse_device(child, spec, saw_sensor);
            } else if (child.name == "threshold") {
                parse_threshold(child, spec);
            } else if (child.name == "reflex") {
                parse_reflex(child, spec);
            } else if (child.name == "memory") {
                auto mname = require_name(child, "name");
                auto mvalue = require_double(child, "value");
                if (mname && mvalue) spec.memory_init[*mname] = *mvalue;
            } else if (child.name == "param") {
                auto pname = require_name(child, "name");
                auto pvalue = require_double(child, "value");
                if (pname && pvalue) spec.strategy_params[*pname] = *pvalue;
            } else if (child.name == "csm") {
                if (!spec.csm_source.empty())
                    error(child, "duplicate-csm", "agent has both a csm file and inline csm text");
                spec.csm_source = child.text;
            } else {
                error(child, "unknown-element", "unexpected <" + child.name + "> in <agent>");
            }
        }
        (void)saw_device;
        if (!saw_sensor) default_sensors(spec.devices);
        cfg.agents.push_back(std::move(spec));
    }

    void parse_threshold(const xml::Node& node, AgentSpec& spec) {
        ThresholdRule rule;
        const std::string* reading = node.attr("reading");
        if (!reading) {
            error(node, "missing-attr", "<threshold> requires attribute 'reading'");
            return;
        }
        rule.reading = *reading;
        auto event = require_name(node, "event");
        if (!event) return;
        rule.event = *event;
        rule.below = double_attr(node, "below");
        rule.above = double_attr(node, "above");
        if (!rule.below && !rule.above) {
            error(node, "bad-threshold", "<threshold> needs 'below' and/or 'above'");
            return;
        }
        auto pass = int_attr(node, "pass");
        rule.pass_value = pass && *pass != 0;
        spec.thresholds.push_back(std::move(rule));
    }

    void parse_reflex(const xml::Node& node, AgentSpec& spec) {
        ReflexRule rule;
        auto trigger = require_name(node, "on");
        auto left = require_double(node, "left");
        auto right = require_double(node, "right");
        if (!trigger || !left || !right) return;
        rule.trigger = *trigger;
        rule.v_left = *left;
        rule.v_right = *right;
        auto priority = int_attr(node, "priority");
        if (priority) rule.priority = static_cast<int>(*priority);
        spec.reflexes.push_back(std::move(rule));
    }

    void validate_agents(const xml::Node& root, RunConfig& cfg) {
        std::set<std::string> names;
        for (const AgentSpec& spec : cfg.agents) {
            if (!names.insert(spec.name).second)
                error(root, "duplicate-name", "two agents named '" + spec.name + "'");
        }
        for (const HomeZone& home : cfg.world.homes) {
            if (!names.count(home.owner))
                error(root, "unknown-home-owner",
                      "home owner '" + home.owner + "' is not an agent");
        }

        // Initial placement: each agent must sit clear of walls, obstacles,
        // and previously placed agents.
        std::vector<Body> placed;
        for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
            const AgentSpec& spec = cfg.agents[i];
            auto contact = disc_penetration(cfg.world, spec.initial_pose.position,
                                            spec.body_radius, static_cast<int>(i), placed);
            if (contact) {
                error(root, "initial-collision",
                      "agent '" + spec.name + "' starts in collision");
            }
            placed.push_back(
                {static_cast<int>(i), spec.initial_pose.position, spec.body_radius});
        }

        // Machine documents: parse, then check against everything the agent
        // can actually see or inject.
        for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
            AgentSpec& spec = cfg.agents[i];
            std::optional<StrategyInfo> info;
            if (spec.strategy != "none") {
                if (catalog) info = catalog(spec.strategy);
                if (!info) {
                    error(root, "unknown-strategy",
                          "agent '" + spec.name + "': unknown strategy '" + spec.strategy + "'");
                    continue;
                }
            }
            CsmParseResult parsed = parse_csm(spec.csm_source);
            bool bad = false;
            for (Diagnostic d : parsed.diags) {
                d.message = "agent '" + spec.name + "' csm: " + d.message;
                if (d.severity == Severity::Error) bad = true;
                diags.push_back(std::move(d));
            }
            if (bad) continue;

            std::vector<std::string> others;
            for (const AgentSpec& other : cfg.agents) {
                if (other.name != spec.name) others.push_back(other.name);
            }
            CsmScope scope;
            for (const std::string& var : reading_variable_names(spec, others))
                scope.variables.insert(var);
            for (const auto& [mname, mvalue] : spec.memory_init) scope.variables.insert(mname);
            for (const ThresholdRule& rule : spec.thresholds) scope.events.insert(rule.event);
            if (info) {
                for (const std::string& event : info->events) scope.events.insert(event);
                for (const std::string& var : info->variables) scope.variables.insert(var);
            }
            Diagnostics csm_diags = validate_csm(parsed.machines, scope);
            for (Diagnostic d : csm_diags) {
                d.message = "agent '" + spec.name + "' csm: " + d.message;
                diags.push_back(std::move(d));
            }
        }
    }
};

}  // namespace

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    auto head = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '-'; };
    if (!head(name[0])) return false;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (!tail(name[i])) return false;
    }
    return true;
}

ConfigResult load_config(const std::string& xml_text, const std::string& base_dir,
                         StrategyCatalog catalog) {
    ConfigResult result;
    xml::ParseResult doc = xml::parse(xml_text);
    result.diagnostics = doc.diags;
    if (!doc.root) return result;
    if (doc.root->name != "run") {
        result.diagnostics.push_back(
            {Severity::Error, "bad-root", "expected <run> document root", doc.root->line,
             doc.root->col});
        return result;
    }

    Loader loader{result.diagnostics, base_dir, catalog};
    RunConfig cfg;
    const xml::Node& root = *doc.root;

    const std::string* seed = root.attr("seed");
    if (!seed) {
        loader.error(root, "missing-attr", "<run> requires an explicit seed");
    } else {
        std::uint64_t value = 0;
        auto res = std::from_chars(seed->data(), seed->data() + seed->size(), value);
        if (res.ec != std::errc() || res.ptr != seed->data() + seed->size()) {
            loader.error(root, "bad-number", "seed is not an unsigned integer");
        } else {
            cfg.seed = value;
        }
    }
    cfg.tick_duration = loader.double_attr_or(root, "tick", 0.1);
    if (cfg.tick_duration <= 0) loader.error(root, "bad-run", "tick duration must be positive");
    auto max_ticks = loader.int_attr(root, "max_ticks");
    if (!root.attr("max_ticks")) {
        loader.error(root, "missing-attr", "<run> requires max_ticks");
    } else if (max_ticks) {
        if (*max_ticks <= 0) {
            loader.error(root, "bad-run", "max_ticks must be positive");
        } else {
            cfg.max_ticks = *max_ticks;
        }
    }
    cfg.near_threshold = loader.double_attr_or(root, "near_threshold", 1.0);
    if (cfg.near_threshold < 0) loader.error(root, "bad-run", "near_threshold must be >= 0");
    auto every = loader.int_attr(root, "checkpoint_every");
    if (every) {
        if (*every < 1) {
            loader.error(root, "bad-run", "checkpoint_every must be >= 1");
        } else {
            cfg.checkpoint_every = static_cast<int>(*every);
        }
    }

    bool saw_world = false;
    for (const auto& child : root.children) {
        if (child.name == "world") {
            if (saw_world) {
                loader.error(child, "duplicate-element", "more than one <world>");
                continue;
            }
            saw_world = true;
            loader.parse_world(child, cfg);
        } else if (child.name == "scenario") {
            loader.parse_scenario(child, cfg);
        } else if (child.name == "agent") {
            loader.parse_agent(child, cfg);
        } else {
            loader.error(child, "unknown-element", "unexpected <" + child.name + "> in <run>");
        }
    }
    if (!saw_world) loader.error(root, "missing-element", "<run> requires a <world>");

    if (!has_errors(result.diagnostics)) loader.validate_agents(root, cfg);
    if (!has_errors(result.diagnostics)) result.config = std::move(cfg);
    return result;
}

ConfigResult load_config_file(const std::string& path, StrategyCatalog catalog) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ConfigResult result;
        result.diagnostics.push_back(
            {Severity::Error, "config-io", "cannot open '" + path + "'", 0, 0});
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config(buf.str(), std::filesystem::path(path).parent_path().string(), catalog);
}

namespace {

void dump_double(std::string& out, double v) {
    out += ' ';
    out += format_double(v);
}

}  // namespace

std::string canonical_config(const RunConfig& config) {
    std::string out = "run";
    dump_double(out, config.tick_duration);
    out += " max_ticks " + std::to_string(config.max_ticks);
    out += " near";
    dump_double(out, config.near_threshold);
    out += " every " + std::to_string(config.checkpoint_every);
    out += '\n';
    if (!config.scenario.name.empty()) {
        out += "scenario " + config.scenario.name + '\n';
        for (const auto& [name, value] : config.scenario.params) {
            out += "sparam " + name;
            dump_double(out, value);
            out += '\n';
        }
    }

    out += "world";
    dump_double(out, config.world.width);
    dump_double(out, config.world.height);
    out += '\n';
    for (const Polygon& poly : config.world.obstacles) {
        out += "obstacle";
        for (const Vec2& v : poly.vertices) {
            dump_double(out, v.x);
            dump_double(out, v.y);
        }
        out += '\n';
    }
    if (!config.world.floor.values.empty()) {
        out += "floor " + std::to_string(config.world.floor.rows) + ' ' +
               std::to_string(config.world.floor.cols);
        for (double v : config.world.floor.values) dump_double(out, v);
        out += '\n';
    }
    for (const HomeZone& home : config.world.homes) {
        out += "home " + home.owner;
        dump_double(out, home.origin.x);
        dump_double(out, home.origin.y);
        dump_double(out, home.width);
        dump_double(out, home.height);
        out += '\n';
    }
    for (const Resource& res : config.world.resources) {
        out += "resource";
        dump_double(out, res.position.x);
        dump_double(out, res.position.y);
        out += '\n';
    }

    for (const AgentSpec& spec : config.agents) {
        out += "agent " + spec.name + " color " + spec.color + " radius";
        dump_double(out, spec.body_radius);
        out += " pose";
        dump_double(out, spec.initial_pose.position.x);
        dump_double(out, spec.initial_pose.position.y);
        dump_double(out, spec.initial_pose.heading);
        out += " drive";
        dump_double(out, spec.wheel_base);
        dump_double(out, spec.max_speed);
        dump_double(out, spec.max_accel);
        out += " strategy " + spec.strategy;
        out += " memcap " + std::to_string(spec.memory_capacity);
        out += '\n';
        out += "sensors " + std::to_string(spec.devices.floor_sensor ? 1 : 0) + ' ' +
               std::to_string(spec.devices.odometry ? 1 : 0);
        dump_double(out, spec.devices.wheel_radius);
        out += ' ' + std::to_string(spec.devices.ticks_per_rev);
        out += '\n';
        for (const TouchSensor& sensor : spec.devices.touch) {
            out += "touch " + sensor.name;
            dump_double(out, sensor.center_angle);
            dump_double(out, sensor.half_width);
            out += '\n';
        }
        for (const ProximitySensor& sensor : spec.devices.proximity) {
            out += "prox " + sensor.name;
            dump_double(out, sensor.mount_angle);
            dump_double(out, sensor.range);
            out += '\n';
        }
        if (spec.devices.vision) {
            out += "vision";
            dump_double(out, spec.devices.vision->range);
            out += '\n';
        }
        for (const ThresholdRule& rule : spec.thresholds) {
            out += "threshold " + rule.reading + ' ' +
                   (rule.below ? format_double(*rule.below) : std::string("-")) + ' ' +
                   (rule.above ? format_double(*rule.above) : std::string("-")) + ' ' +
                   rule.event + ' ' + (rule.pass_value ? "1" : "0") + '\n';
        }
        for (const ReflexRule& rule : spec.reflexes) {
            out += "reflex " + rule.trigger;
            dump_double(out, rule.v_left);
            dump_double(out, rule.v_right);
            out += ' ' + std::to_string(rule.priority) + '\n';
        }
        for (const auto& [name, value] : spec.memory_init) {
            out += "meminit " + name;
            dump_double(out, value);
            out += '\n';
        }
        for (const auto& [name, value] : spec.strategy_params) {
            out += "param " + name;
            dump_double(out, value);
            out += '\n';
        }
        out += "csm " + std::to_string(spec.csm_source.size()) + '\n';
        out += spec.csm_source;
        out += '\n';
    }
    return out;
}

std::uint64_t config_digest(const RunConfig& config) {
    Fnv1a64 hash;
    hash.add_string(canonical_config(config));
    return hash.value();
}

std::uint64_t agent_seed(std::uint64_t run_seed, int agent_id) {
    return Rng(run_seed).stream(0x1000 + static_cast<std::uint64_t>(agent_id)).next_u64();
}

AgentContext make_agent_context(const RunConfig& config, const AgentSpec& spec, int agent_id) {
    AgentContext ctx;
    ctx.name = spec.name;
    ctx.id = agent_id;
    ctx.params = spec.strategy_params;
    for (const auto& [key, value] : config.scenario.params) {
        ctx.params.emplace(key, value);  // agent-level params win
    }
    ctx.rng_seed = agent_seed(config.seed, agent_id);
    for (const HomeZone& home : config.world.homes) {
        if (home.owner == spec.name) {
            ctx.home_center = home.center();
            break;
        }
    }
    ctx.tick_duration = config.tick_duration;
    ctx.near_threshold = config.near_threshold;
    ctx.max_speed = spec.max_speed;
    ctx.wheel_base = spec.wheel_base;
    return ctx;
}

}  // namespace jade

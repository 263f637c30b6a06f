#include <string>
#include <vector>

#include "jade/logfmt.hpp"
#include "jade/rng.hpp"
#include "jade/scenarios.hpp"

namespace jade::scenarios {

namespace {

void append_attr(std::string& out, const char* name, double value) {
    out += ' ';
    out += name;
    out += "=\"";
    out += format_double(value);
    out += '"';
}

void append_rect_obstacle(std::string& out, const MazeSpec::Rect& rect) {
    auto point = [&out](double x, double y) {
        out += format_double(x);
        out += ',';
        out += format_double(y);
    };
    out += "<obstacle points=\"";
    point(rect.origin.x, rect.origin.y);
    out += ' ';
    point(rect.origin.x + rect.width, rect.origin.y);
    out += ' ';
    point(rect.origin.x + rect.width, rect.origin.y + rect.height);
    out += ' ';
    point(rect.origin.x, rect.origin.y + rect.height);
    out += "\"/>";
}

}  // namespace

MazeSpec generate_maze(int rows, int cols, std::uint64_t seed) {
    MazeSpec maze;
    maze.rows = rows;
    maze.cols = cols;
    maze.open_right.assign(std::size_t(rows) * cols, 0);
    maze.open_up.assign(std::size_t(rows) * cols, 0);

    // Recursive backtracker with an explicit stack; carves a spanning tree.
    Rng rng(seed);
    std::vector<std::uint8_t> visited(std::size_t(rows) * cols, 0);
    std::vector<int> stack{0};
    visited[0] = 1;
    while (!stack.empty()) {
        int cell = stack.back();
        int r = cell / cols;
        int c = cell % cols;
        struct Move {
            int dr, dc;
        };
        static const Move moves[4] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};
        int candidates[4];
        int found = 0;
        for (int m = 0; m < 4; ++m) {
            int nr = r + moves[m].dr;
            int nc = c + moves[m].dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            if (!visited[std::size_t(nr) * cols + nc]) candidates[found++] = m;
        }
        if (found == 0) {
            stack.pop_back();
            continue;
        }
        int m = candidates[rng.next_below(std::uint64_t(found))];
        int nr = r + moves[m].dr;
        int nc = c + moves[m].dc;
        if (moves[m].dc == 1) maze.open_right[std::size_t(r) * cols + c] = 1;
        if (moves[m].dc == -1) maze.open_right[std::size_t(nr) * cols + nc] = 1;
        if (moves[m].dr == 1) maze.open_up[std::size_t(r) * cols + c] = 1;
        if (moves[m].dr == -1) maze.open_up[std::size_t(nr) * cols + nc] = 1;
        visited[std::size_t(nr) * cols + nc] = 1;
        stack.push_back(nr * cols + nc);
    }

    const double p = maze.pitch;
    const double t = maze.thickness;

    // Vertical wall lines k = 0..cols; line k sits left of column k. A
    // segment at row r is solid unless the wall right of cell (r, k-1) was
    // carved. Runs of solid segments merge into one rectangle.
    for (int k = 0; k <= cols; ++k) {
        int r = 0;
        while (r < rows) {
            bool solid = k == 0 || k == cols ||
                         !maze.open_right[std::size_t(r) * cols + (k - 1)];
            if (!solid) {
                ++r;
                continue;
            }
            int r0 = r;
            while (r < rows && (k == 0 || k == cols ||
                                !maze.open_right[std::size_t(r) * cols + (k - 1)])) {
                ++r;
            }
            maze.walls.push_back({{k * p, r0 * p}, t, (r - r0) * p + t});
        }
    }
    for (int k = 0; k <= rows; ++k) {
        int c = 0;
        while (c < cols) {
            bool solid = k == 0 || k == rows ||
                         !maze.open_up[std::size_t(k - 1) * cols + c];
            if (!solid) {
                ++c;
                continue;
            }
            int c0 = c;
            while (c < cols &&
                   (k == 0 || k == rows || !maze.open_up[std::size_t(k - 1) * cols + c])) {
                ++c;
            }
            maze.walls.push_back({{c0 * p, k * p}, (c - c0) * p + t, t});
        }
    }

    maze.start = {(p + t) / 2, (p + t) / 2};
    maze.exit_region = {{(cols - 1) * p + t, (rows - 1) * p + t}, p - t, p - t};
    return maze;
}

std::string maze_config_xml(const MazeSpec& maze, long long max_ticks) {
    std::string xml = "<run seed=\"1\" tick=\"0.1\" max_ticks=\"" +
                      std::to_string(max_ticks) +
                      "\" near_threshold=\"1\" checkpoint_every=\"100\">";
    xml += "<world";
    append_attr(xml, "w", maze.width());
    append_attr(xml, "h", maze.height());
    xml += '>';
    for (const MazeSpec::Rect& wall : maze.walls) append_rect_obstacle(xml, wall);
    xml += "</world>";

    xml += "<scenario name=\"maze\"";
    append_attr(xml, "exit_x", maze.exit_region.origin.x);
    append_attr(xml, "exit_y", maze.exit_region.origin.y);
    append_attr(xml, "exit_w", maze.exit_region.width);
    append_attr(xml, "exit_h", maze.exit_region.height);
    xml += "/>";

    xml += "<agent name=\"runner\" radius=\"0.15\" strategy=\"wall_follow\" "
           "csm=\"wall_follow.csm\"";
    append_attr(xml, "x", maze.start.x);
    append_attr(xml, "y", maze.start.y);
    append_attr(xml, "heading", 0);
    xml += '>';
    xml += "<device type=\"drive\" wheel_base=\"0.12\" max_speed=\"0.5\" max_accel=\"5\"/>";
    xml += "<device type=\"odometry\"/>";
    xml += "<device type=\"touch\" name=\"front\" angle=\"0\" width=\"0.9\"/>";
    xml += "<device type=\"proximity\" name=\"left\" angle=\"1.5707963267948966\" "
           "range=\"1.2\"/>";
    xml += "<device type=\"proximity\" name=\"ahead\" angle=\"0\" range=\"0.9\"/>";
    xml += "<threshold reading=\"touch_front\" event=\"FRONT\" above=\"0.5\"/>";
    xml += "<threshold reading=\"prox_ahead\" event=\"BLOCKED\" below=\"0.22\"/>";
    xml += "</agent></run>";
    return xml;
}

}  // namespace jade::scenarios

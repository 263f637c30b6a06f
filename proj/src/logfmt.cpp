#include "jade/logfmt.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jade {

namespace {

constexpr std::array<const char*, 8> kKindNames = {"EVT", "CMD", "MSG", "PCK",
                                                   "DRP", "WRN", "CHK", "END"};

constexpr const char* kMagic = "jadelog";

}  // namespace

const char* record_kind_name(RecordKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<RecordKind> record_kind_from(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (text == kKindNames[i]) return static_cast<RecordKind>(i);
    }
    return std::nullopt;
}

std::string escape_field(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '|': out += "\\p"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::optional<std::string> unescape_field(std::string_view escaped) {
    std::string out;
    out.reserve(escaped.size());
    for (std::size_t i = 0; i < escaped.size(); ++i) {
        char c = escaped[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        if (i + 1 == escaped.size()) return std::nullopt;
        switch (escaped[++i]) {
            case '\\': out += '\\'; break;
            case 'p': out += '|'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: return std::nullopt;
        }
    }
    return out;
}

std::string format_double(double value) {
    std::array<char, 64> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string format_hex64(std::uint64_t value) {
    std::array<char, 17> buf;
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf.data(), 16);
}

std::optional<std::uint64_t> parse_hex64(std::string_view text) {
    if (text.size() != 16) return std::nullopt;
    std::uint64_t value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::vector<std::string> split_fields(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(' ', start);
        if (end == std::string_view::npos) end = text.size();
        if (end > start) out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::string format_header(const LogHeader& header) {
    std::string out = kMagic;
    out += " v";
    out += std::to_string(header.version);
    out += " seed ";
    out += std::to_string(header.seed);
    out += " config ";
    out += format_hex64(header.config_digest);
    out += '\n';
    return out;
}

std::string format_record(const LogRecord& record) {
    std::string out = std::to_string(record.tick);
    out += '|';
    out += record_kind_name(record.kind);
    out += '|';
    out += std::to_string(record.agent);
    out += '|';
    out += escape_field(record.payload);
    out += '\n';
    return out;
}

namespace {

std::optional<LogHeader> parse_header_line(std::string_view line, std::string& why) {
    auto fields = split_fields(line);
    if (fields.size() != 6 || fields[0] != kMagic) {
        why = "not a run log (bad magic)";
        return std::nullopt;
    }
    LogHeader header;
    if (fields[1].size() < 2 || fields[1][0] != 'v') {
        why = "bad version field";
        return std::nullopt;
    }
    header.version = 0;
    for (std::size_t i = 1; i < fields[1].size(); ++i) {
        char c = fields[1][i];
        if (c < '0' || c > '9') {
            why = "bad version field";
            return std::nullopt;
        }
        header.version = header.version * 10 + (c - '0');
    }
    if (header.version != 1) {
        why = "unsupported log version " + std::to_string(header.version);
        return std::nullopt;
    }
    if (fields[2] != "seed") {
        why = "missing seed field";
        return std::nullopt;
    }
    std::uint64_t seed = 0;
    auto res = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), seed);
    if (res.ec != std::errc() || res.ptr != fields[3].data() + fields[3].size()) {
        why = "bad seed value";
        return std::nullopt;
    }
    header.seed = seed;
    if (fields[4] != "config") {
        why = "missing config digest";
        return std::nullopt;
    }
    auto digest = parse_hex64(fields[5]);
    if (!digest) {
        why = "bad config digest";
        return std::nullopt;
    }
    header.config_digest = *digest;
    return header;
}

std::optional<LogRecord> parse_record_line(std::string_view line, std::string& why) {
    std::array<std::string_view, 4> parts;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        std::size_t bar = line.find('|', start);
        if (bar == std::string_view::npos) {
            why = "expected 4 |-separated fields";
            return std::nullopt;
        }
        parts[static_cast<std::size_t>(i)] = line.substr(start, bar - start);
        start = bar + 1;
    }
    parts[3] = line.substr(start);

    LogRecord record;
    auto res = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), record.tick);
    if (res.ec != std::errc() || res.ptr != parts[0].data() + parts[0].size()) {
        why = "bad tick field";
        return std::nullopt;
    }
    auto kind = record_kind_from(parts[1]);
    if (!kind) {
        why = "unknown record kind '" + std::string(parts[1]) + "'";
        return std::nullopt;
    }
    record.kind = *kind;
    auto ares = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), record.agent);
    if (ares.ec != std::errc() || ares.ptr != parts[2].data() + parts[2].size()) {
        why = "bad agent field";
        return std::nullopt;
    }
    auto payload = unescape_field(parts[3]);
    if (!payload) {
        why = "bad escape sequence in payload";
        return std::nullopt;
    }
    record.payload = std::move(*payload);
    return record;
}

}  // namespace

LogParseResult parse_log(std::string_view text) {
    LogParseResult result;
    int line_no = 0;
    std::size_t pos = 0;
    long long prev_tick = -1;
    int prev_agent = -1;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        bool unterminated = nl == std::string_view::npos;
        std::string_view line = text.substr(pos, unterminated ? text.size() - pos : nl - pos);
        pos = unterminated ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        std::string why;
        if (line_no == 1) {
            auto header = parse_header_line(line, why);
            if (!header) {
                result.diagnostics.push_back(
                    {Severity::Error, "log-header", why, line_no, 1});
                return result;
            }
            result.header = *header;
            continue;
        }
        if (unterminated) {
            result.diagnostics.push_back(
                {Severity::Warning, "log-truncated", "unterminated final line dropped", line_no, 1});
            break;
        }
        auto record = parse_record_line(line, why);
        if (!record) {
            result.diagnostics.push_back({Severity::Error, "log-record", why, line_no, 1});
            return result;
        }
        if (record->tick < prev_tick ||
            (record->tick == prev_tick && record->agent < prev_agent)) {
            result.diagnostics.push_back({Severity::Error, "log-order",
                                          "records out of (tick, agent) order", line_no, 1});
            return result;
        }
        prev_tick = record->tick;
        prev_agent = record->agent;
        result.records.push_back(std::move(*record));
    }
    if (!result.header) {
        result.diagnostics.push_back({Severity::Error, "log-header", "empty log", 1, 1});
        return result;
    }
    result.complete = !result.records.empty() && result.records.back().kind == RecordKind::End;
    return result;
}

LogParseResult parse_log_file(const std::string& path, Diagnostics& io_errors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        io_errors.push_back(
            {Severity::Error, "log-io", "cannot open '" + path + "'", 0, 0});
        return {};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_log(buf.str());
}

LogWriter::LogWriter(const LogHeader& header) : text_(format_header(header)) {}

void LogWriter::append(const LogRecord& record) {
    text_ += format_record(record);
    ++records_;
}

bool LogWriter::write_file(const std::string& path, std::string& error) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        error = "cannot open '" + path + "' for writing";
        return false;
    }
    out << text_;
    out.flush();
    if (!out) {
        error = "write to '" + path + "' failed";
        return false;
    }
    return true;
}

}  // namespace jade

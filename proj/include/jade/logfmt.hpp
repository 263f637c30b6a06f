#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jade/diagnostics.hpp"

namespace jade {

/// Record kinds, one per line in a run log.
///   EVT  event seen by an agent's machines this tick
///   CMD  wheel command issued by an agent
///   MSG  message sent by an agent (delivered next tick)
///   PCK  resource picked up
///   DRP  resource dropped (into the field or a home)
///   WRN  server warning (dropped message, rejected op, ...)
///   CHK  world-state checksum covering the end of the tick
///   END  final record: tick count, stop reason, metrics
enum class RecordKind { Evt, Cmd, Msg, Pck, Drp, Wrn, Chk, End };

const char* record_kind_name(RecordKind kind);
std::optional<RecordKind> record_kind_from(std::string_view text);

/// One log line. `agent` is the dense agent id, or -1 for server records
/// (WRN without a subject, CHK, END). Server records always precede agent
/// records within a tick so (tick, agent) never decreases down the file.
struct LogRecord {
    long long tick = 0;
    RecordKind kind = RecordKind::Evt;
    int agent = -1;
    std::string payload;  // unescaped
};

struct LogHeader {
    int version = 1;
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
};

/// Payload escaping: backslash -> "\\", pipe -> "\p", LF -> "\n", CR -> "\r".
/// Tick, kind, and agent fields never need escaping.
std::string escape_field(std::string_view raw);
std::optional<std::string> unescape_field(std::string_view escaped);

std::string format_header(const LogHeader& header);
std::string format_record(const LogRecord& record);

/// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);
std::string format_hex64(std::uint64_t value);
std::optional<std::uint64_t> parse_hex64(std::string_view text);

/// Splits on runs of spaces, dropping empties; no quoting (payload grammars
/// keep fields space-free).
std::vector<std::string> split_fields(std::string_view text);

struct LogParseResult {
    std::optional<LogHeader> header;
    std::vector<LogRecord> records;
    Diagnostics diagnostics;
    bool complete = false;  // true iff the last record is END
};

LogParseResult parse_log(std::string_view text);
LogParseResult parse_log_file(const std::string& path, Diagnostics& io_errors);

/// Accumulates a log in memory; the text is the on-disk format.
class LogWriter {
public:
    explicit LogWriter(const LogHeader& header);

    void append(const LogRecord& record);
    const std::string& text() const { return text_; }
    std::size_t record_count() const { return records_; }

    /// Overwrites `path`; returns false and fills `error` on failure.
    bool write_file(const std::string& path, std::string& error) const;

private:
    std::string text_;
    std::size_t records_ = 0;
};

}  // namespace jade

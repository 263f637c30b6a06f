#include "jade/diagnostics.hpp"

namespace jade {

std::string Diagnostic::format() const {
    std::string out = severity == Severity::Error ? "error" : "warning";
    if (line > 0) {
        out += " at " + std::to_string(line) + ":" + std::to_string(col);
    }
    out += " [" + code + "] " + message;
    return out;
}

bool has_errors(const Diagnostics& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

std::string format_diagnostics(const Diagnostics& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += d.format();
        out += '\n';
    }
    return out;
}

}  // namespace jade

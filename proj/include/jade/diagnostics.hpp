#pragma once

#include <string>
#include <vector>

namespace jade {

enum class Severity { Error, Warning };

/// A located validation or parse finding. Diagnostics are data, not
/// exceptions: loaders collect them and callers decide what is fatal.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;     // stable machine-readable slug, e.g. "unknown-state"
    std::string message;
    int line = 0;         // 1-based; 0 when not tied to a source location
    int col = 0;

    std::string format() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);
std::string format_diagnostics(const Diagnostics& diags);

}  // namespace jade

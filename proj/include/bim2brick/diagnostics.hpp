#ifndef BIM2BRICK_DIAGNOSTICS_HPP
#define BIM2BRICK_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace bim2brick {

// Base class for all fatal errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Severity { Notice, Warning, Error };

inline const char* to_string(Severity s) {
    switch (s) {
        case Severity::Notice: return "notice";
        case Severity::Warning: return "warning";
        case Severity::Error: return "error";
    }
    return "unknown";
}

// Non-fatal finding surfaced by the CLI. `code` is a stable machine-readable
// identifier; `source_id` names the offending element when there is one.
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Warning;
    std::string source_id;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline void add_diag(Diagnostics& diags, std::string code, Severity severity,
                     std::string source_id, std::string message) {
    diags.push_back({std::move(code), severity, std::move(source_id), std::move(message)});
}

}  // namespace bim2brick

#endif

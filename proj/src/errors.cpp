#include "eplan/errors.hpp"

namespace eplan {

std::string SourceLoc::to_string() const {
    if (line == 0) return file.empty() ? "<unknown>" : file;
    std::string out = file.empty() ? "<input>" : file;
    out += ":" + std::to_string(line) + ":" + std::to_string(col);
    return out;
}

ParseError::ParseError(SourceLoc loc, const std::string& message)
    : EplanError(loc.to_string() + ": " + message), loc_(std::move(loc)) {}

}  // namespace eplan

#pragma once

#include <stdexcept>
#include <string>

namespace eplan {

// Position inside an input file, 1-based. line == 0 means "unknown".
struct SourceLoc {
    std::string file;
    int line = 0;
    int col = 0;

    std::string to_string() const;
};

// Base class for everything this library throws on bad input.
class EplanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Syntax or validation error tied to a location in an input file.
class ParseError : public EplanError {
public:
    ParseError(SourceLoc loc, const std::string& message);

    const SourceLoc& where() const noexcept { return loc_; }

private:
    SourceLoc loc_;
};

// Raised when an update is applied to a state that does not satisfy the
// precondition of the designated event.
class NotExecutableError : public EplanError {
public:
    using EplanError::EplanError;
};

}  // namespace eplan

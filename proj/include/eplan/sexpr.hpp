#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eplan/errors.hpp"

namespace eplan {

// A parsed s-expression: either a symbol or a list. Symbols are lower-cased
// by the reader (the whole input language is case-insensitive). Every node
// remembers where it came from so later validation passes can point at the
// offending token.
struct SExpr {
    enum class Kind { Symbol, List };

    Kind kind = Kind::Symbol;
    std::string text;          // Kind::Symbol only
    std::vector<SExpr> items;  // Kind::List only
    SourceLoc loc;

    bool is_symbol() const noexcept { return kind == Kind::Symbol; }
    bool is_list() const noexcept { return kind == Kind::List; }
    bool is_symbol(std::string_view s) const { return is_symbol() && text == s; }
    std::size_t size() const noexcept { return items.size(); }

    // Head symbol of a list, or "" if this is not a list starting with one.
    std::string_view head() const;
};

// Reads a whole file worth of s-expressions. `;` starts a comment running to
// the end of the line. Throws ParseError on unbalanced parentheses or stray
// tokens.
std::vector<SExpr> parse_sexprs(std::string_view text, std::string filename);

// Reads exactly one expression; rejects trailing content.
SExpr parse_single_sexpr(std::string_view text, std::string filename);

// Canonical single-line rendering: symbols as-is, lists parenthesized and
// space-separated.
std::string to_string(const SExpr& e);

}  // namespace eplan

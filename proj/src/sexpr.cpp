#include "eplan/sexpr.hpp"

#include <cctype>

#include "eplan/vocabulary.hpp"

namespace eplan {

std::string_view SExpr::head() const {
    if (!is_list() || items.empty() || !items[0].is_symbol()) return {};
    return items[0].text;
}

namespace {

struct Token {
    enum class Kind { LParen, RParen, Symbol, End };
    Kind kind;
    std::string text;
    SourceLoc loc;
};

class Lexer {
public:
    Lexer(std::string_view text, std::string filename)
        : text_(text), file_(std::move(filename)) {}

    Token next() {
        skip_ws_and_comments();
        SourceLoc loc{file_, line_, col_};
        if (pos_ >= text_.size()) return {Token::Kind::End, "", loc};
        char c = text_[pos_];
        if (c == '(') {
            advance();
            return {Token::Kind::LParen, "(", loc};
        }
        if (c == ')') {
            advance();
            return {Token::Kind::RParen, ")", loc};
        }
        std::string sym;
        while (pos_ < text_.size() && !is_delim(text_[pos_])) {
            sym += text_[pos_];
            advance();
        }
        return {Token::Kind::Symbol, to_lower(sym), loc};
    }

private:
    static bool is_delim(char c) {
        return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Reader {
public:
    Reader(std::string_view text, std::string filename) : lexer_(text, std::move(filename)) {
        tok_ = lexer_.next();
    }

    bool at_end() const { return tok_.kind == Token::Kind::End; }
    const SourceLoc& loc() const { return tok_.loc; }

    SExpr read() {
        switch (tok_.kind) {
            case Token::Kind::Symbol: {
                SExpr e;
                e.kind = SExpr::Kind::Symbol;
                e.text = tok_.text;
                e.loc = tok_.loc;
                consume();
                return e;
            }
            case Token::Kind::LParen: {
                SExpr e;
                e.kind = SExpr::Kind::List;
                e.loc = tok_.loc;
                consume();
                while (tok_.kind != Token::Kind::RParen) {
                    if (tok_.kind == Token::Kind::End)
                        throw ParseError(e.loc, "unterminated list (missing ')')");
                    e.items.push_back(read());
                }
                consume();  // ')'
                return e;
            }
            case Token::Kind::RParen:
                throw ParseError(tok_.loc, "unexpected ')'");
            case Token::Kind::End:
                throw ParseError(tok_.loc, "unexpected end of input");
        }
        throw ParseError(tok_.loc, "unreachable");
    }

private:
    void consume() { tok_ = lexer_.next(); }

    Lexer lexer_;
    Token tok_;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text, std::string filename) {
    Reader reader(text, std::move(filename));
    std::vector<SExpr> out;
    while (!reader.at_end()) out.push_back(reader.read());
    return out;
}

SExpr parse_single_sexpr(std::string_view text, std::string filename) {
    Reader reader(text, std::move(filename));
    if (reader.at_end()) throw ParseError(reader.loc(), "empty input");
    SExpr e = reader.read();
    if (!reader.at_end()) throw ParseError(reader.loc(), "trailing content after expression");
    return e;
}

std::string to_string(const SExpr& e) {
    if (e.is_symbol()) return e.text;
    std::string out = "(";
    for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i > 0) out += ' ';
        out += to_string(e.items[i]);
    }
    return out + ")";
}

}  // namespace eplan

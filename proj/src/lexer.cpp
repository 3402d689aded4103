#include "kvg/lexer.hpp"

#include <cctype>

namespace kvg {

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = TokenKind::Identifier;
            t.text = std::string(src.substr(start, j - start));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = TokenKind::Integer;
            t.text = std::string(src.substr(start, j - start));
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"')
                throw ParseError(line, col, "unterminated string literal", std::string(src.substr(start, j - start)));
            t.kind = TokenKind::String;
            t.text = std::string(src.substr(start + 1, j - start - 1));
            advance(j + 1 - i);
        } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = TokenKind::Arrow;
            t.text = "->";
            advance(2);
        } else if (std::string_view("+-*/^()[]{},;:=").find(c) != std::string_view::npos) {
            t.kind = TokenKind::Symbol;
            t.text = std::string(1, c);
            advance(1);
        } else {
            throw ParseError(line, col, "unexpected character", std::string(1, c));
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

const Token& TokenStream::next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
}

bool TokenStream::is_symbol(std::string_view s, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return (t.kind == TokenKind::Symbol || t.kind == TokenKind::Arrow) && t.text == s;
}

bool TokenStream::is_keyword(std::string_view s, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Identifier && t.text == s;
}

bool TokenStream::accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    next();
    return true;
}

const Token& TokenStream::expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail(peek(), "expected '" + std::string(s) + "'");
    return next();
}

const Token& TokenStream::expect_keyword(std::string_view s) {
    if (!is_keyword(s)) fail(peek(), "expected '" + std::string(s) + "'");
    return next();
}

const Token& TokenStream::expect_identifier(std::string_view what) {
    if (peek().kind != TokenKind::Identifier) fail(peek(), "expected " + std::string(what));
    return next();
}

long TokenStream::expect_integer(std::string_view what) {
    if (peek().kind != TokenKind::Integer) fail(peek(), "expected " + std::string(what));
    const Token& t = next();
    if (t.text.size() > 9) fail(t, "integer too large");
    return std::stol(t.text);
}

void TokenStream::fail(const Token& at, const std::string& message) const {
    throw ParseError(at.line, at.column, message, at.kind == TokenKind::End ? "end of input" : at.text);
}

}  // namespace kvg

#pragma once

#include "kvg/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace kvg {

enum class TokenKind { Identifier, Integer, String, Symbol, Arrow, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    int line = 1;
    int column = 1;
};

/// Tokenizer shared by the expression syntax and the scenario language.
/// '#' starts a comment that runs to end of line. Throws ParseError on stray characters.
std::vector<Token> tokenize(std::string_view source);

/// Cursor over a token vector with positioned error reporting.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at_end() const { return peek().kind == TokenKind::End; }
    bool is_symbol(std::string_view s, std::size_t ahead = 0) const;
    bool is_keyword(std::string_view s, std::size_t ahead = 0) const;
    /// Consumes the symbol if present.
    bool accept_symbol(std::string_view s);
    const Token& expect_symbol(std::string_view s);
    const Token& expect_keyword(std::string_view s);
    const Token& expect_identifier(std::string_view what);
    long expect_integer(std::string_view what);

    [[noreturn]] void fail(const Token& at, const std::string& message) const;

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace kvg

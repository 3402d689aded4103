#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kvg {

enum class ErrorCode {
    ZeroDenominator,
    UnknownVariable,
    PoleAtPoint,
    ChartMismatch,
    PreconditionViolated,
    DegenerateBasis,
    NotCoisotropic,
    ClosureFailure,
    NotTransverseAtSample,
    InvalidAlgebra,
    InvalidSubspace,
    Parse,
    Semantic,
};

std::string_view to_string(ErrorCode code);

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Positioned syntax error. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(int line, int column, std::string message, std::string token)
        : Error(ErrorCode::Parse, std::to_string(line) + ":" + std::to_string(column) + ": " +
                                      message + (token.empty() ? "" : " near '" + token + "'")),
          line_(line), column_(column), message_(std::move(message)), token_(std::move(token)) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }
    const std::string& token() const noexcept { return token_; }

private:
    int line_;
    int column_;
    std::string message_;
    std::string token_;
};

/// Well-formed text that does not describe a consistent scenario.
class SemanticError : public Error {
public:
    SemanticError(int line, int column, const std::string& message)
        : Error(ErrorCode::Semantic,
                std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

}  // namespace kvg

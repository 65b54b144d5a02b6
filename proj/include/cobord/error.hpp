#pragma once

#include <stdexcept>
#include <string>

namespace cobord {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ParseError : public Error {
public:
    ParseError(int line, int column, std::string rule, const std::string& message)
        : Error("ParseError", "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                  " [" + rule + "]: " + message),
          line_(line), column_(column), rule_(std::move(rule)) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& rule() const noexcept { return rule_; }

private:
    int line_;
    int column_;
    std::string rule_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string rule, int line, const std::string& message)
        : Error("ValidationError",
                "[" + rule + "]" + (line > 0 ? " line " + std::to_string(line) : std::string()) + ": " + message),
          rule_(std::move(rule)), line_(line) {}
    const std::string& rule() const noexcept { return rule_; }
    int line() const noexcept { return line_; }

private:
    std::string rule_;
    int line_;
};

/// The site does not declare something an operation needs.
class MissingDeclaration : public Error {
public:
    explicit MissingDeclaration(const std::string& what) : Error("MissingDeclaration", what) {}
};

#define COBORD_SIMPLE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& message) : Error(#Name, message) {}   \
    };

COBORD_SIMPLE_ERROR(NotComposable)
COBORD_SIMPLE_ERROR(NotProper)
COBORD_SIMPLE_ERROR(NotSmooth)
COBORD_SIMPLE_ERROR(NotSmoothComposite)
COBORD_SIMPLE_ERROR(ArrowMismatch)
COBORD_SIMPLE_ERROR(UniverseOverflow)
COBORD_SIMPLE_ERROR(BoundTooSmall)
COBORD_SIMPLE_ERROR(ResourceExceeded)
COBORD_SIMPLE_ERROR(StageOrder)
COBORD_SIMPLE_ERROR(ExpressionError)

#undef COBORD_SIMPLE_ERROR

}  // namespace cobord

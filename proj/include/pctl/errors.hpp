#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pctl {

// Byte range into the offending input text.
struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, SourceSpan span)
        : std::runtime_error(std::move(message)), span_(span) {}
    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

class BoundOutOfRangeError : public ParseError {
public:
    using ParseError::ParseError;
};

// A combinatorial construction exceeded its configured budget.
class SizeLimitError : public std::runtime_error {
public:
    SizeLimitError(std::string message, std::size_t count)
        : std::runtime_error(std::move(message)), count_(count) {}
    std::size_t count() const { return count_; }

private:
    std::size_t count_;
};

class DepthBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pctl

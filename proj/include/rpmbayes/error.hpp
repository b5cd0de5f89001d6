#pragma once
// Error types shared across the library. Domain violations throw
// std::domain_error; structured input problems throw ParseError, which
// carries the source location so the CLI can report file:line:col.

#include <stdexcept>
#include <string>

namespace rpmbayes {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line = 0, int column = 0)
        : std::runtime_error(format(message, line, column)),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        if (line <= 0) return message;
        std::string out = "line " + std::to_string(line);
        if (column > 0) out += ":" + std::to_string(column);
        return out + ": " + message;
    }

    int line_;
    int column_;
};

} // namespace rpmbayes

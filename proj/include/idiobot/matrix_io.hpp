#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "idiobot/matrix.hpp"

namespace idiobot {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

/// Parses a complete token as a double. Returns false on any trailing junk.
bool parse_double(std::string_view token, double& out);

// Matrix text format: a header line `N L`, then N lines of L space-separated
// values, row-major. Values are written in shortest round-trip form so a
// write/read cycle is bit-exact.
std::string write_matrix(const Matrix& m);
Matrix read_matrix(std::string_view text);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

/// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file; throws std::runtime_error if it cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace idiobot

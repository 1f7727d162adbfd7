#include "idiobot/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace idiobot {
namespace {

struct Token {
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == '\n') {
            ++line;
            col = 1;
            ++i;
        } else if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++col;
            ++i;
        } else {
            const std::size_t start = i, start_col = col;
            while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r' && text[i] != '\n') {
                ++i;
                ++col;
            }
            out.push_back({text.substr(start, i - start), line, start_col});
        }
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

bool parse_double(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

std::string write_matrix(const Matrix& m) {
    std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Matrix read_matrix(std::string_view text) {
    const auto tokens = tokenize(text);
    if (tokens.size() < 2) throw ParseError("missing `N L` header", 1, 1);

    auto read_count = [](const Token& t) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || v == 0) {
            throw ParseError("expected a positive integer, got '" + std::string(t.text) + "'", t.line, t.column);
        }
        return v;
    };
    const std::size_t rows = read_count(tokens[0]);
    const std::size_t cols = read_count(tokens[1]);
    if (tokens[1].line != tokens[0].line) throw ParseError("header must be on one line", tokens[1].line, 1);

    if (tokens.size() - 2 != rows * cols) {
        const Token& at = tokens.back();
        throw ParseError("expected " + std::to_string(rows * cols) + " values, found " +
                             std::to_string(tokens.size() - 2),
                         at.line, at.column);
    }
    std::vector<double> data(rows * cols);
    for (std::size_t k = 0; k < data.size(); ++k) {
        const Token& t = tokens[k + 2];
        if (t.line != k / cols + 2) throw ParseError("row has the wrong number of values", t.line, t.column);
        if (!parse_double(t.text, data[k])) {
            throw ParseError("not a number: '" + std::string(t.text) + "'", t.line, t.column);
        }
    }
    return Matrix(rows, cols, std::move(data));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) { write_file(path, write_matrix(m)); }

Matrix load_matrix(const std::filesystem::path& path) { return read_matrix(read_file(path)); }

}  // namespace idiobot

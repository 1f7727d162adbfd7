#pragma once

#include <string_view>

namespace idiobot::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_level(Level level) noexcept;
Level level() noexcept;

/// Writes one line to stderr when `lvl` is at or above the current threshold.
void write(Level lvl, std::string_view message);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }

}  // namespace idiobot::log

#include "idiobot/log.hpp"

#include <atomic>
#include <cstdio>

namespace idiobot::log {
namespace {
std::atomic<Level> g_level{Level::warn};

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        case Level::off: break;
    }
    return "";
}
}  // namespace

void set_level(Level lvl) noexcept { g_level.store(lvl); }
Level level() noexcept { return g_level.load(); }

void write(Level lvl, std::string_view message) {
    if (lvl < g_level.load() || lvl == Level::off) return;
    std::fprintf(stderr, "[%s] %.*s\n", tag(lvl), static_cast<int>(message.size()), message.data());
}

}  // namespace idiobot::log

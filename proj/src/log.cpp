#include "wikicast/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace wikicast::log {

namespace {
std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;

const char* tag(Level level) {
    switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warning";
    case Level::error: return "error";
    case Level::off: break;
    }
    return "";
}
} // namespace

void set_level(Level level) { g_level.store(level); }

Level level() { return g_level.load(); }

void write(Level lvl, std::string_view message) {
    std::lock_guard lock{g_mutex};
    fmt::print(stderr, "wikicast [{}] {}\n", tag(lvl), message);
}

} // namespace wikicast::log

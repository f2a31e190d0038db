#pragma once

#include <fmt/format.h>

#include <string_view>

namespace wikicast::log {

enum class Level { debug, info, warn, error, off };

void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

template <typename... Args>
void info(fmt::format_string<Args...> format, Args&&... args) {
    if (level() <= Level::info) write(Level::info, fmt::format(format, std::forward<Args>(args)...));
}

template <typename... Args>
void warn(fmt::format_string<Args...> format, Args&&... args) {
    if (level() <= Level::warn) write(Level::warn, fmt::format(format, std::forward<Args>(args)...));
}

template <typename... Args>
void debug(fmt::format_string<Args...> format, Args&&... args) {
    if (level() <= Level::debug) write(Level::debug, fmt::format(format, std::forward<Args>(args)...));
}

} // namespace wikicast::log

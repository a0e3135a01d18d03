#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace grflock::log {

enum class Level { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

/// Verbosity comes from the GRFLOCK_LOG environment variable
/// (off|error|warn|info|debug); default is warn.
inline Level& threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("GRFLOCK_LOG");
        if (env == nullptr) return Level::warn;
        if (std::strcmp(env, "off") == 0) return Level::off;
        if (std::strcmp(env, "error") == 0) return Level::error;
        if (std::strcmp(env, "warn") == 0) return Level::warn;
        if (std::strcmp(env, "info") == 0) return Level::info;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::warn;
    }();
    return lvl;
}

inline void write(Level lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
    const char* tag = "";
    switch (lvl) {
        case Level::error: tag = "error"; break;
        case Level::warn:  tag = "warn"; break;
        case Level::info:  tag = "info"; break;
        case Level::debug: tag = "debug"; break;
        case Level::off:   return;
    }
    std::fprintf(stderr, "[grflock %s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void warn(const std::string& msg) { write(Level::warn, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

}  // namespace grflock::log

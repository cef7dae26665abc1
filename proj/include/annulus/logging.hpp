#ifndef ANNULUS_LOGGING_HPP
#define ANNULUS_LOGGING_HPP

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace annulus {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// level from ANNULUS_NEUMANN_LOG (error|warn|info|debug), default warn
inline LogLevel log_level()
{
    static const LogLevel level = [] {
        const char* env = std::getenv("ANNULUS_NEUMANN_LOG");
        if (env == nullptr)
            return LogLevel::Warn;
        if (std::strcmp(env, "error") == 0)
            return LogLevel::Error;
        if (std::strcmp(env, "warn") == 0)
            return LogLevel::Warn;
        if (std::strcmp(env, "info") == 0)
            return LogLevel::Info;
        if (std::strcmp(env, "debug") == 0)
            return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

inline void log_at(LogLevel lvl, const std::string& msg)
{
    if (lvl > log_level())
        return;
    static const char* names[4] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[annulus-neumann] %s: %s\n", names[static_cast<int>(lvl)],
                 msg.c_str());
}

inline void log_error(const std::string& m) { log_at(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log_at(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_at(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_at(LogLevel::Debug, m); }

} // namespace annulus

#endif

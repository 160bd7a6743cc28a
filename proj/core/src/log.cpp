#include "reqcomp/log.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace reqcomp {

namespace {

std::mutex g_mutex;
LogSink g_sink;  // empty == stderr default

void default_sink(LogLevel level, const std::string& message) {
    std::fprintf(stderr, "[%s] %s\n", log_level_name(level), message.c_str());
}

}  // namespace

const char* log_level_name(LogLevel level) {
    switch (level) {
        case LogLevel::Debug: return "debug";
        case LogLevel::Info: return "info";
        case LogLevel::Warn: return "warn";
        case LogLevel::Error: return "error";
    }
    return "?";
}

void log(LogLevel level, const std::string& message) {
    LogSink sink;
    {
        std::lock_guard<std::mutex> lock(g_mutex);
        sink = g_sink;
    }
    if (sink) {
        sink(level, message);
    } else {
        default_sink(level, message);
    }
}

LogSink set_log_sink(LogSink sink) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::swap(g_sink, sink);
    return sink;
}

}  // namespace reqcomp

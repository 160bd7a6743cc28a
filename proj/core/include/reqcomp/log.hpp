// Minimal logging facility. Default sink writes to stderr; tests can
// install a capturing sink to assert on emitted warnings.
#pragma once

#include <functional>
#include <string>

namespace reqcomp {

enum class LogLevel { Debug, Info, Warn, Error };

using LogSink = std::function<void(LogLevel, const std::string&)>;

void log(LogLevel level, const std::string& message);

// Replaces the global sink and returns the previous one. Pass nullptr to
// restore the default stderr sink.
LogSink set_log_sink(LogSink sink);

const char* log_level_name(LogLevel level);

}  // namespace reqcomp

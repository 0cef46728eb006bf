#pragma once

#include <functional>
#include <string>

namespace spurs {

enum class LogLevel { debug = 0, info = 1, warn = 2 };

using LogSink = std::function<void(LogLevel, const std::string&)>;

// Installs a process-wide sink; an empty sink discards messages.
void set_log_sink(LogSink sink);
void log_message(LogLevel level, const std::string& message);

}  // namespace spurs

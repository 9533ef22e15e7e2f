#pragma once

#include <functional>
#include <string>

namespace specgconv {

using WarningHandler = std::function<void(const std::string&)>;

/// Reports a recoverable condition. Defaults to a line on stderr.
void warn(const std::string& message);

/// Replaces the process-wide handler; an empty handler restores the default.
/// Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

} // namespace specgconv

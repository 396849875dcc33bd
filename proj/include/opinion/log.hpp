#pragma once

#include <functional>
#include <string_view>

namespace opinion {

using WarningHandler = std::function<void(std::string_view)>;

// Warnings go to standard error unless a handler is installed. Thread safe.
void warn(std::string_view message);

// Installs a handler and returns the previous one. An empty handler restores
// the default.
WarningHandler set_warning_handler(WarningHandler handler);

} // namespace opinion

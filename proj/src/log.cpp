#include "opinion/log.hpp"

#include <iostream>
#include <mutex>

namespace opinion {

namespace {
std::mutex warn_mutex;
WarningHandler handler;
} // namespace

void warn(std::string_view message) {
    std::lock_guard lock(warn_mutex);
    if (handler) {
        handler(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

WarningHandler set_warning_handler(WarningHandler h) {
    std::lock_guard lock(warn_mutex);
    std::swap(handler, h);
    return h;
}

} // namespace opinion

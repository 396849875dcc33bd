#pragma once

#include <stdexcept>
#include <string>

namespace opinion {

// Base class for every error raised by the toolkit. Messages are meant to be
// shown to the user verbatim.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace opinion

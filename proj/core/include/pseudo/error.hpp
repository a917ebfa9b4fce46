#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace pseudo {

/// Base error for all recoverable toolkit failures.  Messages are expected
/// to name the offending file, line, or flag so callers can report them
/// verbatim.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void cat_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void cat_into(std::ostringstream& os, const T& head, const Rest&... rest) {
    os << head;
    cat_into(os, rest...);
}
}  // namespace detail

/// Concatenate arbitrary streamable values into a std::string.
template <typename... Args>
std::string cat(const Args&... args) {
    std::ostringstream os;
    detail::cat_into(os, args...);
    return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
    throw Error(cat(args...));
}

}  // namespace pseudo

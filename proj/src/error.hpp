#pragma once

#include <stdexcept>
#include <string>

namespace senti {

// Library-wide error type. Every documented error path throws one of these
// with a message that names the offending input (file, line number, key, ...).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(what);
}

}  // namespace senti

#pragma once

#include <stdexcept>
#include <string>

namespace bifiber {

/// Malformed or semantically invalid user input (files, line specs, options).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal consistency check failed. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void check_invariant(bool ok, const std::string& what) {
    if (!ok) throw InvariantError(what);
}

}  // namespace bifiber

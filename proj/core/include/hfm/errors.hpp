#pragma once

#include <stdexcept>
#include <string>

namespace hfm {

// bad input: violated preconditions, out-of-range parameters
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// dimension or work cap exceeded
class cap_error : public validation_error {
public:
    using validation_error::validation_error;
};

// iteration did not converge, non-finite result
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw validation_error(what);
}

}  // namespace hfm

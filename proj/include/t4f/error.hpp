#pragma once

#include <stdexcept>
#include <string>

namespace t4f {

/// Raised for bad input data or violated preconditions. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace t4f

#pragma once

#include <stdexcept>
#include <string>

namespace pors {

/// Raised for unreadable or malformed input data (files, labels, schemas).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace pors

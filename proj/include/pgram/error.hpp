#pragma once

#include <stdexcept>
#include <string>

namespace pgram {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad construction parameters (grids, cameras, scene configs).
struct InvalidConfig : Error {
  using Error::Error;
};

}  // namespace pgram

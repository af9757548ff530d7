#pragma once

#include <stdexcept>

namespace mfunc {

//! A numerical certificate (tail bound, boundary decay, ...) failed.
struct certificate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! The Taylor fast path is outside its smallness precondition.
struct expansion_inapplicable : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace mfunc

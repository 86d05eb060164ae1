#pragma once

#include <stdexcept>
#include <string>

namespace geodesic {

enum class errc {
  invalid_discriminant,
  mismatched_discriminant,
  non_hyperbolic,
  domain_error,
  overflow,
  corrupt_cache,
  version_mismatch,
  io_error,
  modulus_too_large,
  construction_failure,
  unsupported_spec,
  empty_census,
  parse_error,
  unsupported_condition,
};

const char* to_string(errc code) noexcept;

// Single exception type for the library; the code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace geodesic

#include "geodesic/error.hpp"

namespace geodesic {

const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_discriminant: return "invalid-discriminant";
    case errc::mismatched_discriminant: return "mismatched-discriminant";
    case errc::non_hyperbolic: return "non-hyperbolic";
    case errc::domain_error: return "domain-error";
    case errc::overflow: return "overflow";
    case errc::corrupt_cache: return "corrupt-cache";
    case errc::version_mismatch: return "version-mismatch";
    case errc::io_error: return "io-error";
    case errc::modulus_too_large: return "modulus-too-large";
    case errc::construction_failure: return "construction-failure";
    case errc::unsupported_spec: return "unsupported-spec";
    case errc::empty_census: return "empty-census";
    case errc::parse_error: return "parse-error";
    case errc::unsupported_condition: return "unsupported-condition";
  }
  return "unknown";
}

}  // namespace geodesic

#ifndef LATNEG_ERRORS_HPP
#define LATNEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latneg {

enum class errc {
  invalid_geometry,
  invalid_region,
  invalid_config,
  not_positive_definite,
  numerical_degeneracy,
  cross_check_failure,
  overflow,
  divergence,
  index_out_of_range,
  insufficient_truncation,
  enumeration_too_large,
  truncation_leak,
  unavailable_constant,
  bad_input,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::invalid_geometry: return "invalid_geometry";
    case errc::invalid_region: return "invalid_region";
    case errc::invalid_config: return "invalid_config";
    case errc::not_positive_definite: return "not_positive_definite";
    case errc::numerical_degeneracy: return "numerical_degeneracy";
    case errc::cross_check_failure: return "cross_check_failure";
    case errc::overflow: return "overflow";
    case errc::divergence: return "divergence";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::insufficient_truncation: return "insufficient_truncation";
    case errc::enumeration_too_large: return "enumeration_too_large";
    case errc::truncation_leak: return "truncation_leak";
    case errc::unavailable_constant: return "unavailable_constant";
    case errc::bad_input: return "bad_input";
  }
  return "unknown";
}

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw error(code, what);
}

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace latneg

#endif

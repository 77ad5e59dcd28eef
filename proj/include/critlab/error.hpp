#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

namespace critlab {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  cap_exceeded,
  invalid_group,
  invalid_action,
  invalid_homomorphism,
  not_subgroup,
  not_normal,
  parent_mismatch,
  not_abelian,
  empty_input,
  wrong_class,
  pivot_not_in_set,
  budget_exceeded,
  not_bilinear,
  not_homomorphism,
  kernel_mismatch,
  stabilizer_not_trivial,
  no_matching_automorphism,
  not_surjective,
  self_inverse_character,
  missing_inverse_character,
  not_cyclic_target,
  vosper_not_prime_cyclic,
  vosper_singleton,
  vosper_near_full,
  vosper_not_minimal,
  vosper_not_arithmetic,
  point_corrections,
  not_critical,
  not_stable,
  not_regular,
  not_almost_equal,
  not_balanced,
  not_decreasing,
  theorem_violation,
  io_error,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
    case ErrorCode::invalid_group: return "invalid_group";
    case ErrorCode::invalid_action: return "invalid_action";
    case ErrorCode::invalid_homomorphism: return "invalid_homomorphism";
    case ErrorCode::not_subgroup: return "not_subgroup";
    case ErrorCode::not_normal: return "not_normal";
    case ErrorCode::parent_mismatch: return "parent_mismatch";
    case ErrorCode::not_abelian: return "not_abelian";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::wrong_class: return "wrong_class";
    case ErrorCode::pivot_not_in_set: return "pivot_not_in_set";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::not_bilinear: return "not_bilinear";
    case ErrorCode::not_homomorphism: return "not_homomorphism";
    case ErrorCode::kernel_mismatch: return "kernel_mismatch";
    case ErrorCode::stabilizer_not_trivial: return "stabilizer_not_trivial";
    case ErrorCode::no_matching_automorphism: return "no_matching_automorphism";
    case ErrorCode::not_surjective: return "not_surjective";
    case ErrorCode::self_inverse_character: return "self_inverse_character";
    case ErrorCode::missing_inverse_character: return "missing_inverse_character";
    case ErrorCode::not_cyclic_target: return "not_cyclic_target";
    case ErrorCode::vosper_not_prime_cyclic: return "vosper_not_prime_cyclic";
    case ErrorCode::vosper_singleton: return "vosper_singleton";
    case ErrorCode::vosper_near_full: return "vosper_near_full";
    case ErrorCode::vosper_not_minimal: return "vosper_not_minimal";
    case ErrorCode::vosper_not_arithmetic: return "vosper_not_arithmetic";
    case ErrorCode::point_corrections: return "point_corrections";
    case ErrorCode::not_critical: return "not_critical";
    case ErrorCode::not_stable: return "not_stable";
    case ErrorCode::not_regular: return "not_regular";
    case ErrorCode::not_almost_equal: return "not_almost_equal";
    case ErrorCode::not_balanced: return "not_balanced";
    case ErrorCode::not_decreasing: return "not_decreasing";
    case ErrorCode::theorem_violation: return "theorem_violation";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

/// Every failure in the library is reported as an Error carrying a stable
/// machine-readable code and optional structured details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const {
    nlohmann::json j{{"code", std::string(to_string(code_))}, {"message", what()}};
    if (!details_.is_null()) j["details"] = details_;
    return j;
  }

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

inline void require(bool cond, ErrorCode code, const std::string& message,
                    nlohmann::json details = nullptr) {
  if (!cond) throw Error(code, message, std::move(details));
}

}  // namespace critlab

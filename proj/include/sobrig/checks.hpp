#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace sobrig {

/// One verified inequality or identity at one abscissa.
/// slack = rhs - lhs for inequalities, tol - |lhs - rhs| for identities.
struct CheckRow {
  std::string name;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// lhs <= rhs up to a relative allowance. An infinite rhs means the bound is
/// vacuous because its hypothesis failed, which counts as a failure.
inline CheckRow leq_row(std::string name, double t, double lhs, double rhs, double rel_allowance) {
  CheckRow row{std::move(name), t, lhs, rhs, rhs - lhs, false};
  row.pass = std::isfinite(rhs) && std::isfinite(lhs) &&
             lhs <= rhs + rel_allowance * std::abs(rhs);
  return row;
}

inline CheckRow geq_row(std::string name, double t, double lhs, double rhs, double rel_allowance) {
  CheckRow row{std::move(name), t, lhs, rhs, lhs - rhs, false};
  row.pass = std::isfinite(rhs) && std::isfinite(lhs) &&
             lhs >= rhs - rel_allowance * std::abs(rhs);
  return row;
}

/// |lhs - rhs| <= rel_tol |rhs| (absolute when rhs == 0).
inline CheckRow eq_row(std::string name, double t, double lhs, double rhs, double rel_tol) {
  const double allowed = rhs == 0.0 ? rel_tol : rel_tol * std::abs(rhs);
  CheckRow row{std::move(name), t, lhs, rhs, allowed - std::abs(lhs - rhs), false};
  row.pass = std::isfinite(lhs) && std::abs(lhs - rhs) <= allowed;
  return row;
}

inline bool all_pass(std::span<const CheckRow> rows) {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

inline const CheckRow* first_failure(std::span<const CheckRow> rows) {
  for (const auto& r : rows) {
    if (!r.pass) return &r;
  }
  return nullptr;
}

}  // namespace sobrig

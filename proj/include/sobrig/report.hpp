#pragma once

// Deterministic text output: every float goes through format_number, rows keep
// the order in which they were produced.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sobrig/checks.hpp"
#include "sobrig/rigidity.hpp"

namespace sobrig {

enum class Format { csv, json };

/// "%.12g"; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);
/// x rounded to 12 significant digits.
double round12(double x);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string render_checks(std::span<const CheckRow> rows, const KeyValues& header, Format format);
std::string render_rigidity(const RigidityReport& report, const KeyValues& extra, Format format);
std::string render_limits(const MassEscapeReport& report, const KeyValues& header, Format format);
/// Flat key/value table (constants).
std::string render_table(const KeyValues& rows, Format format);

}  // namespace sobrig

#pragma once

#include <span>
#include <string>
#include <string_view>

namespace fewshot {

// Shortest decimal form that parses back to the identical double.
// Locale-independent.
std::string format_real(double value);

// Locale-independent decimal parse of the whole view. Throws DataError on
// trailing garbage or an empty field. Does not reject inf/nan; callers do.
double parse_real(std::string_view text);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

}  // namespace fewshot

#include "fewshot/numeric_text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "fewshot/error.hpp"

namespace fewshot {

std::string format_real(double value) {
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) {
    throw DataError("cannot format number");
  }
  return std::string(buffer.data(), end);
}

double parse_real(std::string_view text) {
  if (text.empty()) {
    throw DataError("empty numeric field");
  }
  // from_chars rejects a leading '+', which hand-written files often carry.
  if (text.front() == '+') {
    text.remove_prefix(1);
  }
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) {
    throw DataError("numeric value out of range: '" + std::string(text) + "'");
  }
  if (ec != std::errc{} || ptr != last) {
    throw DataError("malformed number: '" + std::string(text) + "'");
  }
  return value;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace fewshot

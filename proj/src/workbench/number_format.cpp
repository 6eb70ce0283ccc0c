#include "optomech/workbench/number_format.hpp"

#include <array>
#include <charconv>

namespace optomech::workbench {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), res.ptr};
}

} // namespace optomech::workbench

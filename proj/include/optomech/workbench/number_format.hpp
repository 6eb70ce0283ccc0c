#pragma once

#include <string>

namespace optomech::workbench {

/// Shortest text that parses back to the same double (std::to_chars).
std::string format_double(double value);

} // namespace optomech::workbench

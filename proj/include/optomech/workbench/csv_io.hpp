#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/estimation.hpp"

namespace optomech::workbench {

/// Numeric table with a mandatory header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws ValidationError naming the missing column.
  const std::vector<double> &column(std::string_view name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

CsvTable parse_csv(std::string_view text);
/// Throws IoError when the file cannot be read.
CsvTable read_csv(const std::filesystem::path &path);

struct CsvColumn {
  std::string name;
  std::span<const double> values;
};

/// Writes every double with format_double; all columns must have equal length.
std::string format_csv(std::span<const CsvColumn> columns);
void write_text_file(const std::filesystem::path &path, std::string_view text);

/// Columns frequency_hz, psd_m2_per_hz and optionally weight.
MeasuredSpectrum read_spectrum_csv(const std::filesystem::path &path);
/// Columns frequency_hz, magnitude_m_per_unit and optionally phase_rad.
DrivenResponse read_response_csv(const std::filesystem::path &path);
/// Columns offset, high_frequency_psd.
std::vector<OffsetSample> read_offset_csv(const std::filesystem::path &path);

} // namespace optomech::workbench

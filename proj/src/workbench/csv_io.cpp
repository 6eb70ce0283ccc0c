#include "optomech/workbench/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "optomech/errors.hpp"
#include "optomech/workbench/number_format.hpp"

namespace optomech::workbench {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      return out;
    }
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t line_no, std::string_view column) {
  double value = 0.0;
  const auto *begin = cell.data();
  const auto *end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') {
    ++begin;
  }
  const auto res = std::from_chars(begin, end, value);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw ValidationError(std::string(column), "line " + std::to_string(line_no) + ": \"" + std::string(cell) +
                                                   "\" is not a number");
  }
  return value;
}

} // namespace

std::optional<std::size_t> CsvTable::find(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - header.begin());
}

const std::vector<double> &CsvTable::column(std::string_view name) const {
  const auto idx = find(name);
  if (!idx) {
    throw ValidationError(std::string(name), "required CSV column is missing");
  }
  return columns[*idx];
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) {
          throw ValidationError("header", "empty column name");
        }
        table.header.emplace_back(c);
      }
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ValidationError("csv", "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(table.header.size()) + " fields, got " +
                                       std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      table.columns[i].push_back(parse_cell(cells[i], line_no, table.header[i]));
    }
  }
  if (!have_header) {
    throw ValidationError("header", "CSV has no header row");
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string format_csv(std::span<const CsvColumn> columns) {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out += (j ? "," : "") + columns[j].name;
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
  for (const auto &c : columns) {
    if (c.values.size() != rows) {
      throw Error("format_csv: column " + c.name + " has a different length");
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) {
        out += ',';
      }
      out += format_double(columns[j].values[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

MeasuredSpectrum read_spectrum_csv(const std::filesystem::path &path) {
  const CsvTable t = read_csv(path);
  MeasuredSpectrum s;
  s.frequency_hz = t.column("frequency_hz");
  s.psd = t.column("psd_m2_per_hz");
  if (t.find("weight")) {
    s.weight = t.column("weight");
  }
  s.validate();
  return s;
}

DrivenResponse read_response_csv(const std::filesystem::path &path) {
  const CsvTable t = read_csv(path);
  DrivenResponse r;
  r.frequency_hz = t.column("frequency_hz");
  r.magnitude = t.column("magnitude_m_per_unit");
  if (t.find("phase_rad")) {
    r.phase_rad = t.column("phase_rad");
  }
  r.validate();
  return r;
}

std::vector<OffsetSample> read_offset_csv(const std::filesystem::path &path) {
  const CsvTable t = read_csv(path);
  const auto &offset = t.column("offset");
  const auto &psd = t.column("high_frequency_psd");
  std::vector<OffsetSample> out;
  for (std::size_t i = 0; i < offset.size(); ++i) {
    out.push_back({offset[i], psd[i]});
  }
  return out;
}

} // namespace optomech::workbench

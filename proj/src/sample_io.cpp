/*******************************************************************************
* Copyright 2026 The rkreach Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*******************************************************************************/

#include "rkreach/sample_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "rkreach/errors.hpp"

namespace rkreach {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InputError("line " + std::to_string(line_no) + ": cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (csv.header.empty()) {
      for (const auto f : fields) csv.header.emplace_back(trim(f));
      continue;
    }
    if (fields.size() != csv.header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(csv.header.size()) +
                       " columns, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto f : fields) row.push_back(parse_double(f, line_no));
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty()) throw InputError("CSV input is empty");
  return csv;
}

void append_row(std::string& out, const double* values, Index count) {
  for (Index j = 0; j < count; ++j) {
    if (j > 0) out += ',';
    out += format_double(values[j]);
  }
  out += '\n';
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto parent = path.parent_path();
  std::error_code ec;
  if (!parent.empty() && !std::filesystem::exists(parent, ec)) {
    throw IoError("output directory does not exist: " + parent.string());
  }
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

std::string format_double(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string samples_to_csv(const SampleSet& samples) {
  samples.validate();
  const Index n = samples.state_dim();
  const Index m = samples.control_dim();
  std::string out;
  out.reserve(static_cast<std::size_t>(samples.size() * (2 * n + m) * 24 + 64));
  std::vector<std::string> header;
  for (Index i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (Index i = 1; i <= m; ++i) header.push_back("u" + std::to_string(i));
  for (Index i = 1; i <= n; ++i) header.push_back("y" + std::to_string(i));
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out += ',';
    out += header[j];
  }
  out += '\n';
  std::vector<double> row(static_cast<std::size_t>(2 * n + m));
  for (Index r = 0; r < samples.size(); ++r) {
    std::copy_n(samples.states.data() + r * n, n, row.begin());
    std::copy_n(samples.controls.data() + r * m, m, row.begin() + n);
    std::copy_n(samples.successors.data() + r * n, n, row.begin() + n + m);
    append_row(out, row.data(), static_cast<Index>(row.size()));
  }
  return out;
}

SampleSet samples_from_csv(const std::string& text) {
  Csv csv = parse_csv(text);
  // Header must be x1..xn, u1..um, y1..yn in that order.
  Index n = 0, m = 0, ny = 0;
  for (const auto& name : csv.header) {
    const char kind = name.empty() ? '?' : name[0];
    Index& counter = kind == 'x' ? n : kind == 'u' ? m : ny;
    if (kind != 'x' && kind != 'u' && kind != 'y') throw InputError("unexpected sample column '" + name + "'");
    if ((kind == 'x' && (m > 0 || ny > 0)) || (kind == 'u' && ny > 0)) {
      throw InputError("sample columns must be ordered x.., u.., y..");
    }
    if (name != std::string(1, kind) + std::to_string(counter + 1)) {
      throw InputError("unexpected sample column '" + name + "'");
    }
    ++counter;
  }
  if (n == 0 || ny != n) throw InputError("sample header needs x1..xn and y1..yn with equal n");
  if (csv.rows.empty()) throw InputError("sample file has no data rows");

  SampleSet samples;
  const auto count = static_cast<Index>(csv.rows.size());
  samples.states.resize(count, n);
  samples.controls.resize(count, m);
  samples.successors.resize(count, n);
  for (Index r = 0; r < count; ++r) {
    const auto& row = csv.rows[static_cast<std::size_t>(r)];
    for (Index j = 0; j < n; ++j) samples.states(r, j) = row[static_cast<std::size_t>(j)];
    for (Index j = 0; j < m; ++j) samples.controls(r, j) = row[static_cast<std::size_t>(n + j)];
    for (Index j = 0; j < n; ++j) samples.successors(r, j) = row[static_cast<std::size_t>(n + m + j)];
  }
  samples.validate();
  return samples;
}

void write_samples(const std::filesystem::path& path, const SampleSet& samples) {
  write_file_atomic(path, samples_to_csv(samples));
}

SampleSet read_samples(const std::filesystem::path& path) { return samples_from_csv(read_file(path)); }

Index ResultTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return static_cast<Index>(j);
  }
  return -1;
}

Index ResultTable::require_column(const std::string& name) const {
  const Index j = column(name);
  if (j < 0) throw InputError("result table has no column '" + name + "'");
  return j;
}

Matrix ResultTable::points() const {
  Index n = 0;
  while (n < static_cast<Index>(columns.size()) && columns[static_cast<std::size_t>(n)] == "x" + std::to_string(n + 1)) ++n;
  if (n == 0) throw InputError("result table has no point columns");
  return rows.leftCols(n);
}

std::string table_to_csv(const ResultTable& table) {
  if (static_cast<Index>(table.columns.size()) != table.rows.cols()) {
    throw ContractError("result table column count does not match its data");
  }
  std::string out;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j > 0) out += ',';
    out += table.columns[j];
  }
  out += '\n';
  std::vector<double> row(static_cast<std::size_t>(table.rows.cols()));
  for (Index r = 0; r < table.rows.rows(); ++r) {
    for (Index j = 0; j < table.rows.cols(); ++j) row[static_cast<std::size_t>(j)] = table.rows(r, j);
    append_row(out, row.data(), table.rows.cols());
  }
  return out;
}

ResultTable table_from_csv(const std::string& text) {
  Csv csv = parse_csv(text);
  ResultTable table;
  table.columns = std::move(csv.header);
  table.rows.resize(static_cast<Index>(csv.rows.size()), static_cast<Index>(table.columns.size()));
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      table.rows(static_cast<Index>(r), static_cast<Index>(j)) = csv.rows[r][j];
    }
  }
  return table;
}

void write_table(const std::filesystem::path& path, const ResultTable& table) {
  write_file_atomic(path, table_to_csv(table));
}

ResultTable read_table(const std::filesystem::path& path) { return table_from_csv(read_file(path)); }

}  // namespace rkreach

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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rkreach/embedding.hpp"
#include "rkreach/types.hpp"

namespace rkreach {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Shortest-safe decimal form: 17 significant digits, round-trips exactly.
std::string format_double(double value);

/// CSV with header x1..xn,u1..um,y1..yn and one transition per row.
std::string samples_to_csv(const SampleSet& samples);
SampleSet samples_from_csv(const std::string& text);

void write_samples(const std::filesystem::path& path, const SampleSet& samples);
SampleSet read_samples(const std::filesystem::path& path);

/// Named numeric columns, one row per evaluation point.
struct ResultTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd rows;

  Index column(const std::string& name) const;  // -1 when absent
  Index require_column(const std::string& name) const;
  /// Leading columns named x1, x2, ... as a point matrix.
  Matrix points() const;
};

std::string table_to_csv(const ResultTable& table);
ResultTable table_from_csv(const std::string& text);

void write_table(const std::filesystem::path& path, const ResultTable& table);
ResultTable read_table(const std::filesystem::path& path);

}  // namespace rkreach

// Copyright 2026 The Robsub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ROBSUB_TOOLS_CSV_IO_H_
#define ROBSUB_TOOLS_CSV_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "robsub/dataset.h"

namespace robsub::tools {

// A dataset read from CSV together with the names of its factor columns in
// design-matrix order (intercept excluded).
struct LoadedDataset {
  Dataset data;
  std::vector<std::string> factor_names;
  std::optional<std::string> response_name;
};

// Comma-delimited, header row required, '.' decimal separator, no quoting.
// Every column except `response_column` and `id_column` becomes a factor;
// the intercept is prepended. Errors: kIoError, kParseError (row/column in
// the message), kNonNumericCell, kDuplicateIds, kMissingResponse when
// `response_column` is named but absent.
LoadedDataset IngestCsv(const std::string& path,
                        const std::optional<std::string>& response_column,
                        const std::optional<std::string>& id_column);

// Reads the columns `factor_names` (in that order) of a CSV and prepends the
// intercept; also returns `response_column` when the file carries it.
struct PointSet {
  RowMatrix x;
  std::optional<Vector> y;
};
PointSet ReadPointSet(const std::string& path,
                      const std::vector<std::string>& factor_names,
                      const std::optional<std::string>& response_column);

// Writes factors (without intercept) and, when given, the response in
// round-trip exact form.
void WriteDatasetCsv(const std::string& path, const RowMatrix& x,
                     const std::vector<std::string>& factor_names,
                     const Vector* y, const std::string& response_name);

// One integer per line.
void WriteIndexFile(const std::string& path, const std::vector<Index>& rows);
std::vector<Index> ReadIndexFile(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, const std::string& bytes);

}  // namespace robsub::tools

#endif  // ROBSUB_TOOLS_CSV_IO_H_

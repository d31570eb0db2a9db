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

#include "csv_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "robsub/error.h"

namespace robsub::tools {
namespace {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string_view>> rows;
  std::string storage;
};

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

RawTable ReadRaw(const std::string& path) {
  RawTable table;
  table.storage = ReadFileBytes(path);
  std::string_view text = table.storage;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = Trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> cells = SplitLine(line);
    for (auto& c : cells) c = Trim(c);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) {
          throw Error(ErrorCode::kParseError,
                      path + ": empty column name in header");
        }
        table.header.emplace_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::kParseError,
                  path + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) {
    throw Error(ErrorCode::kParseError, path + ": missing header row");
  }
  return table;
}

double ParseNumber(std::string_view cell, const std::string& path,
                   std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::kNonNumericCell,
                path + ": data row " + std::to_string(row + 1) + ", column '" +
                    column + "': '" + std::string(cell) + "' is not a number");
  }
  return v;
}

std::optional<std::size_t> FindColumn(const RawTable& t,
                                      const std::string& name) {
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == name) return c;
  }
  return std::nullopt;
}

}  // namespace

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << bytes;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::string FormatDouble(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

LoadedDataset IngestCsv(const std::string& path,
                        const std::optional<std::string>& response_column,
                        const std::optional<std::string>& id_column) {
  const RawTable t = ReadRaw(path);
  std::optional<std::size_t> response_col;
  std::optional<std::size_t> id_col;
  if (response_column) {
    response_col = FindColumn(t, *response_column);
    if (!response_col) {
      throw Error(ErrorCode::kMissingResponse,
                  path + ": no response column '" + *response_column + "'");
    }
  }
  if (id_column) {
    id_col = FindColumn(t, *id_column);
    if (!id_col) {
      throw Error(ErrorCode::kParseError,
                  path + ": no id column '" + *id_column + "'");
    }
  }
  std::vector<std::size_t> factor_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == response_col || c == id_col) continue;
    factor_cols.push_back(c);
    names.push_back(t.header[c]);
  }

  const Index n_rows = static_cast<Index>(t.rows.size());
  RowMatrix factors(n_rows, static_cast<Index>(factor_cols.size()));
  std::optional<Vector> y;
  if (response_col) y = Vector(n_rows);
  std::vector<std::int64_t> ids;
  std::unordered_set<std::int64_t> seen;
  for (Index r = 0; r < n_rows; ++r) {
    const auto& cells = t.rows[static_cast<std::size_t>(r)];
    for (std::size_t f = 0; f < factor_cols.size(); ++f) {
      factors(r, static_cast<Index>(f)) =
          ParseNumber(cells[factor_cols[f]], path, static_cast<std::size_t>(r),
                      names[f]);
    }
    if (response_col) {
      (*y)(r) = ParseNumber(cells[*response_col], path,
                            static_cast<std::size_t>(r), *response_column);
    }
    if (id_col) {
      std::string_view cell = cells[*id_col];
      std::int64_t id = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), id);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kNonNumericCell,
                    path + ": data row " + std::to_string(r + 1) +
                        ", id column: '" + std::string(cell) +
                        "' is not an integer");
      }
      if (!seen.insert(id).second) {
        throw Error(ErrorCode::kDuplicateIds,
                    path + ": id " + std::to_string(id) + " repeats at data row " +
                        std::to_string(r + 1));
      }
      ids.push_back(id);
    }
  }
  LoadedDataset out{Dataset::WithIntercept(factors, std::move(y), std::move(ids)),
                    std::move(names), response_column};
  return out;
}

PointSet ReadPointSet(const std::string& path,
                      const std::vector<std::string>& factor_names,
                      const std::optional<std::string>& response_column) {
  const RawTable t = ReadRaw(path);
  std::vector<std::size_t> cols;
  for (const std::string& name : factor_names) {
    auto c = FindColumn(t, name);
    if (!c) {
      throw Error(ErrorCode::kShapeMismatch,
                  path + ": missing factor column '" + name + "'");
    }
    cols.push_back(*c);
  }
  std::optional<std::size_t> response_col;
  if (response_column) response_col = FindColumn(t, *response_column);

  const Index n_rows = static_cast<Index>(t.rows.size());
  PointSet out;
  out.x.resize(n_rows, static_cast<Index>(cols.size()) + 1);
  if (response_col) out.y = Vector(n_rows);
  for (Index r = 0; r < n_rows; ++r) {
    const auto& cells = t.rows[static_cast<std::size_t>(r)];
    out.x(r, 0) = 1.0;
    for (std::size_t f = 0; f < cols.size(); ++f) {
      out.x(r, static_cast<Index>(f) + 1) = ParseNumber(
          cells[cols[f]], path, static_cast<std::size_t>(r), factor_names[f]);
    }
    if (response_col) {
      (*out.y)(r) = ParseNumber(cells[*response_col], path,
                                static_cast<std::size_t>(r), *response_column);
    }
  }
  return out;
}

void WriteDatasetCsv(const std::string& path, const RowMatrix& x,
                     const std::vector<std::string>& factor_names,
                     const Vector* y, const std::string& response_name) {
  std::string out;
  for (std::size_t f = 0; f < factor_names.size(); ++f) {
    if (f) out += ',';
    out += factor_names[f];
  }
  if (y) out += ',' + response_name;
  out += '\n';
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 1; c < x.cols(); ++c) {
      if (c > 1) out += ',';
      out += FormatDouble(x(r, c));
    }
    if (y) {
      out += ',';
      out += FormatDouble((*y)(r));
    }
    out += '\n';
  }
  WriteFileBytes(path, out);
}

void WriteIndexFile(const std::string& path, const std::vector<Index>& rows) {
  std::string out;
  for (Index r : rows) {
    out += std::to_string(r);
    out += '\n';
  }
  WriteFileBytes(path, out);
}

std::vector<Index> ReadIndexFile(const std::string& path) {
  const std::string text = ReadFileBytes(path);
  std::vector<Index> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = Trim(line);
    if (v.empty()) continue;
    long long idx = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), idx);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw Error(ErrorCode::kParseError,
                  path + ": line " + std::to_string(line_no) +
                      " is not an integer index");
    }
    rows.push_back(static_cast<Index>(idx));
  }
  return rows;
}

}  // namespace robsub::tools

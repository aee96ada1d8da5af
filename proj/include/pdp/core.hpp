// Copyright 2026 The pdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDP_CORE_HPP_
#define PDP_CORE_HPP_

#include <compare>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdp {

// Domain is binary throughout: every record is d bits. Non-binary cells are
// rejected at parse time.

class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttributeSchema {
  int d = 0;
  std::vector<std::string> names;

  static AttributeSchema with_default_names(int d) {
    if (d < 1) throw SchemaError("schema requires d >= 1");
    AttributeSchema s;
    s.d = d;
    s.names.reserve(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j) s.names.push_back("attr_" + std::to_string(j));
    return s;
  }

  void validate() const {
    if (d < 1) throw SchemaError("schema requires d >= 1");
    if (names.size() != static_cast<std::size_t>(d))
      throw SchemaError("schema names must have length d");
    std::set<std::string> uniq(names.begin(), names.end());
    if (uniq.size() != names.size())
      throw SchemaError("schema names must be unique");
  }

  bool operator==(const AttributeSchema&) const = default;
};

// A record of d bits, bit j = value of attribute j (0-based).
class Record {
 public:
  Record() = default;
  explicit Record(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw SchemaError("record bits must be 0 or 1");
  }
  static Record zeros(int d) {
    return Record(std::vector<std::uint8_t>(static_cast<std::size_t>(d), 0));
  }
  // Parses e.g. "0101"; character i is attribute i+1.
  static Record from_string(const std::string& s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw SchemaError("record string must be 0/1");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return Record(std::move(bits));
  }
  // Bit j of `value` (LSB = attribute 0) for the 2^d domain enumeration.
  static Record from_index(std::uint64_t value, int d) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      bits[static_cast<std::size_t>(j)] =
          static_cast<std::uint8_t>((value >> j) & 1u);
    return Record(std::move(bits));
  }

  int size() const { return static_cast<int>(bits_.size()); }
  std::uint8_t operator[](int j) const {
    return bits_[static_cast<std::size_t>(j)];
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::uint64_t to_index() const {
    std::uint64_t v = 0;
    for (int j = 0; j < size(); ++j)
      v |= static_cast<std::uint64_t>(bits_[static_cast<std::size_t>(j)]) << j;
    return v;
  }
  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  auto operator<=>(const Record&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline int hamming_distance(const Record& a, const Record& b) {
  if (a.size() != b.size())
    throw SchemaError("hamming_distance: records have different lengths");
  int dist = 0;
  for (int j = 0; j < a.size(); ++j) dist += a[j] != b[j];
  return dist;
}

struct Dataset {
  AttributeSchema schema;
  std::vector<Record> rows;

  int d() const { return schema.d; }
  std::size_t n() const { return rows.size(); }

  void validate() const {
    schema.validate();
    for (const auto& r : rows)
      if (r.size() != schema.d)
        throw SchemaError("dataset row length does not match schema");
  }
};

// Labeled sample for the learning tasks: features and label in {-1,+1}.
struct LabeledExample {
  std::vector<std::int8_t> x;
  std::int8_t y = 1;
};

struct LabeledDataset {
  AttributeSchema schema;
  std::vector<LabeledExample> rows;

  int d() const { return schema.d; }
  std::size_t n() const { return rows.size(); }

  void validate() const {
    schema.validate();
    for (const auto& ex : rows) {
      if (ex.x.size() != static_cast<std::size_t>(schema.d))
        throw SchemaError("labeled row length does not match schema");
      for (auto v : ex.x)
        if (v != 1 && v != -1) throw SchemaError("features must be -1/+1");
      if (ex.y != 1 && ex.y != -1) throw SchemaError("label must be -1/+1");
    }
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::uint8_t parse_binary_cell(const std::string& cell, std::size_t row,
                                      std::size_t col) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw CsvError("malformed cell '" + cell + "' at row " + std::to_string(row) +
                 ", column " + std::to_string(col) + " (expected 0 or 1)");
}

struct CsvBody {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvBody read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  CsvBody body;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      body.header = split_csv_line(line);
      if (body.header.empty() ||
          (body.header.size() == 1 && body.header[0].empty()))
        throw CsvError("empty header in " + path);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    body.rows.push_back(split_csv_line(line));
  }
  if (first) throw CsvError("empty header in " + path);
  return body;
}

}  // namespace detail

// CSV with header attr_1,...,attr_d and cells in {0,1}. Row order preserved.
inline Dataset load_dataset(const std::string& path) {
  auto body = detail::read_csv(path);
  Dataset ds;
  ds.schema.d = static_cast<int>(body.header.size());
  ds.schema.names = body.header;
  ds.schema.validate();
  ds.rows.reserve(body.rows.size());
  for (std::size_t i = 0; i < body.rows.size(); ++i) {
    const auto& cells = body.rows[i];
    if (cells.size() != body.header.size())
      throw CsvError("ragged row " + std::to_string(i + 1) + " in " + path);
    std::vector<std::uint8_t> bits(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      bits[j] = detail::parse_binary_cell(cells[j], i + 1, j + 1);
    ds.rows.emplace_back(std::move(bits));
  }
  return ds;
}

// CSV with header attr_1,...,attr_d,label. File stores {0,1}; in memory
// features and labels are {-1,+1} (0 -> -1, 1 -> +1).
inline LabeledDataset load_labeled_dataset(const std::string& path) {
  auto body = detail::read_csv(path);
  if (body.header.size() < 2)
    throw CsvError("labeled dataset needs at least one attribute and a label");
  if (body.header.back() != "label")
    throw CsvError("last column of a labeled dataset must be 'label'");
  LabeledDataset ds;
  ds.schema.d = static_cast<int>(body.header.size()) - 1;
  ds.schema.names.assign(body.header.begin(), body.header.end() - 1);
  ds.schema.validate();
  ds.rows.reserve(body.rows.size());
  for (std::size_t i = 0; i < body.rows.size(); ++i) {
    const auto& cells = body.rows[i];
    if (cells.size() != body.header.size())
      throw CsvError("ragged row " + std::to_string(i + 1) + " in " + path);
    LabeledExample ex;
    ex.x.resize(cells.size() - 1);
    for (std::size_t j = 0; j + 1 < cells.size(); ++j)
      ex.x[j] = detail::parse_binary_cell(cells[j], i + 1, j + 1) ? 1 : -1;
    ex.y = detail::parse_binary_cell(cells.back(), i + 1, cells.size()) ? 1 : -1;
    ds.rows.push_back(std::move(ex));
  }
  return ds;
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open " + path + " for writing");
  for (int j = 0; j < ds.d(); ++j)
    out << ds.schema.names[static_cast<std::size_t>(j)]
        << (j + 1 < ds.d() ? "," : "\n");
  for (const auto& r : ds.rows) {
    for (int j = 0; j < ds.d(); ++j)
      out << int{r[j]} << (j + 1 < ds.d() ? "," : "\n");
  }
}

inline void save_labeled_dataset(const LabeledDataset& ds,
                                 const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open " + path + " for writing");
  for (const auto& name : ds.schema.names) out << name << ",";
  out << "label\n";
  for (const auto& ex : ds.rows) {
    for (auto v : ex.x) out << (v > 0 ? 1 : 0) << ",";
    out << (ex.y > 0 ? 1 : 0) << "\n";
  }
}

}  // namespace pdp

#endif  // PDP_CORE_HPP_

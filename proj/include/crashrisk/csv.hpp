// Copyright 2026 The crashrisk Authors
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

#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace crashrisk::csv {

/// Streaming RFC 4180 reader: quoted fields, doubled quotes, CRLF and
/// embedded newlines inside quotes. A UTF-8 BOM on the first line is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);
  /// 1-based physical line number where the last record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

/// Header lookup; names compare after trimming whitespace.
class Header {
 public:
  explicit Header(std::vector<std::string> names);
  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

std::string_view trim(std::string_view s);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace crashrisk::csv

// Copyright 2026 The m2lads Authors
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
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace m2lads::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC-4180 reader accepting "\n" or "\r\n" line endings. Quoted fields may
/// span lines; blank lines are skipped; unquoted fields are trimmed of
/// surrounding blanks.
class Reader {
 public:
  explicit Reader(std::istream& in);

  std::optional<Record> next();

  /// Consumes the header record and requires it to equal `columns` exactly.
  void expect_header(std::initializer_list<std::string_view> columns);

 private:
  int get();
  int peek();

  std::istream& in_;
  std::size_t line_ = 1;
  bool first_ = true;
};

/// Quotes a field when it contains a delimiter, quote or line break.
std::string escape(std::string_view field);

std::optional<std::int64_t> parse_int(std::string_view text);

/// Parses any decimal real including "nan"/"inf"; callers check finiteness.
std::optional<double> parse_real(std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_real(double value);

}  // namespace m2lads::csv

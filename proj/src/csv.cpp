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

#include "m2lads/csv.hpp"

#include <charconv>
#include <istream>
#include <system_error>

#include "m2lads/error.hpp"

namespace m2lads::csv {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_blank(s[b])) ++b;
  while (e > b && is_blank(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Reader::Reader(std::istream& in) : in_(in) {}

int Reader::get() { return in_.get(); }

int Reader::peek() { return in_.peek(); }

std::optional<Record> Reader::next() {
  while (true) {
    if (peek() == std::char_traits<char>::eof()) return std::nullopt;

    if (first_) {
      first_ = false;
      // UTF-8 byte order mark
      if (peek() == 0xEF) {
        char bom[3];
        in_.read(bom, 3);
        if (!(in_.gcount() == 3 && static_cast<unsigned char>(bom[1]) == 0xBB &&
              static_cast<unsigned char>(bom[2]) == 0xBF)) {
          throw Error(ErrorCode::MalformedRow, "invalid leading bytes", line_);
        }
      }
    }

    Record rec;
    rec.line = line_;
    std::string field;
    bool quoted = false;      // current field started with a quote
    bool in_quotes = false;   // inside the quoted section
    bool after_quote = false; // closing quote seen, only blanks/delimiter allowed
    bool any_content = false;

    auto finish_field = [&] {
      rec.fields.push_back(quoted ? field : trim(field));
      field.clear();
      quoted = in_quotes = after_quote = false;
    };

    while (true) {
      int c = get();
      if (c == std::char_traits<char>::eof()) {
        if (in_quotes) throw Error(ErrorCode::MalformedRow, "unterminated quoted field", rec.line);
        break;
      }
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (peek() == '"') {
            get();
            field.push_back('"');
          } else {
            in_quotes = false;
            after_quote = true;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '\r') {
        if (peek() == '\n') continue;
        throw Error(ErrorCode::MalformedRow, "bare carriage return", line_);
      }
      if (ch == '\n') {
        ++line_;
        break;
      }
      any_content = true;
      if (ch == ',') {
        finish_field();
        continue;
      }
      if (after_quote) {
        if (is_blank(ch)) continue;
        throw Error(ErrorCode::MalformedRow, "characters after closing quote", rec.line);
      }
      if (ch == '"') {
        if (!trim(field).empty()) throw Error(ErrorCode::MalformedRow, "quote inside unquoted field", rec.line);
        field.clear();
        quoted = in_quotes = true;
        continue;
      }
      field.push_back(ch);
    }

    if (!any_content && field.empty() && rec.fields.empty() && !quoted) continue;
    finish_field();
    return rec;
  }
}

void Reader::expect_header(std::initializer_list<std::string_view> columns) {
  auto header = next();
  std::string expected;
  for (auto col : columns) {
    if (!expected.empty()) expected += ',';
    expected += col;
  }
  if (!header) throw Error(ErrorCode::InvalidHeader, "missing header, expected '" + expected + "'", 1);
  bool ok = header->fields.size() == columns.size();
  if (ok) {
    std::size_t i = 0;
    for (auto col : columns) {
      if (header->fields[i++] != col) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) throw Error(ErrorCode::InvalidHeader, "expected '" + expected + "'", header->line);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos &&
      (field.empty() || (!is_blank(field.front()) && !is_blank(field.back())))) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace m2lads::csv

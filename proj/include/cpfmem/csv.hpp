// Copyright 2026 The cpfmem Authors
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

// Small CSV helpers shared by the readers and writers. Output is
// locale-independent: comma separated, '.' decimal point, LF line endings.

#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace cpfmem::csv {

// Shortest round-trippable representation; "nan"/"inf" for non-finite values.
inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0 as well
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Writes one row; each field is emitted verbatim.
class RowWriter {
 public:
  explicit RowWriter(std::ostream& os) : os_(os) {}

  RowWriter& operator<<(double v) { return field(format_number(v)); }
  RowWriter& operator<<(int v) { return field(std::to_string(v)); }
  RowWriter& operator<<(long v) { return field(std::to_string(v)); }
  RowWriter& operator<<(unsigned long v) { return field(std::to_string(v)); }
  RowWriter& operator<<(unsigned long long v) { return field(std::to_string(v)); }
  RowWriter& operator<<(std::string_view v) { return field(std::string(v)); }
  RowWriter& operator<<(const char* v) { return field(std::string(v)); }

  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  RowWriter& field(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }

  std::ostream& os_;
  bool first_ = true;
};

}  // namespace cpfmem::csv

/*
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
 */

#include "flexsched/trace.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace flexsched {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T ParseField(std::string_view text, const char* column, std::size_t line_no) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InputError("trace line " + std::to_string(line_no) + ": bad " + column +
                     " value '" + std::string(text) + "'");
  }
  return value;
}

std::string_view StripCr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<Request> ReadTrace(std::istream& in) {
  std::vector<Request> out;
  std::unordered_set<RequestId> ids;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = StripCr(line);
    if (!header_seen) {
      std::string_view header = row;
      if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
      if (header != kTraceHeader) {
        throw InputError("trace line 1: unexpected header '" + std::string(row) + "'");
      }
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    const auto f = SplitFields(row);
    if (f.size() != 9) {
      throw InputError("trace line " + std::to_string(line_no) + ": expected 9 columns, got " +
                       std::to_string(f.size()));
    }
    Request req;
    req.id = ParseField<RequestId>(f[0], "id", line_no);
    req.submit_time = ParseField<double>(f[1], "submit_time_s", line_no);
    try {
      req.app_class = ParseAppClass(f[2]);
    } catch (const InputError& e) {
      throw InputError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    req.n_core = ParseField<int>(f[3], "n_core", line_no);
    req.n_elastic = ParseField<int>(f[4], "n_elastic", line_no);
    req.per_component.cpu = ParseField<double>(f[5], "cpu_per_component", line_no);
    req.per_component.ram = ParseField<double>(f[6], "ram_mb_per_component", line_no);
    req.nominal_runtime = ParseField<double>(f[7], "runtime_s", line_no);
    req.priority_class = ParseField<int>(f[8], "priority_class", line_no);
    try {
      ValidateRequest(req);
    } catch (const InputError& e) {
      throw InputError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(req.id).second) {
      throw InputError("trace line " + std::to_string(line_no) + ": duplicate id " +
                       std::to_string(req.id));
    }
    out.push_back(req);
  }
  if (!header_seen) throw InputError("trace is empty (missing header)");
  return out;
}

std::vector<Request> ReadTrace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace " + path.string());
  return ReadTrace(in);
}

void WriteTrace(std::ostream& out, const std::vector<Request>& requests) {
  out << kTraceHeader << '\n';
  for (const Request& r : requests) {
    out << r.id << ',' << FormatNumber(r.submit_time) << ',' << ToString(r.app_class) << ','
        << r.n_core << ',' << r.n_elastic << ',' << FormatNumber(r.per_component.cpu) << ','
        << FormatNumber(r.per_component.ram) << ',' << FormatNumber(r.nominal_runtime) << ','
        << r.priority_class << '\n';
  }
}

void WriteTrace(const std::filesystem::path& path, const std::vector<Request>& requests) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write trace " + path.string());
  WriteTrace(out, requests);
  if (!out) throw InputError("failed writing trace " + path.string());
}

std::uint64_t Fingerprint(const std::vector<Request>& requests) {
  std::ostringstream os;
  WriteTrace(os, requests);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace flexsched

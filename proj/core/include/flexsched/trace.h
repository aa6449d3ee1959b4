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

// Request trace CSV.
//
//   id,submit_time_s,class,n_core,n_elastic,cpu_per_component,ram_mb_per_component,runtime_s,priority_class
//
// UTF-8, one header row, comma separated, '.' decimal point. Numbers are
// written in shortest round-trip form, so reading a written trace gives back
// exactly the same requests.

#ifndef FLEXSCHED_TRACE_H
#define FLEXSCHED_TRACE_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "flexsched/domain.h"

namespace flexsched {

inline constexpr std::string_view kTraceHeader =
    "id,submit_time_s,class,n_core,n_elastic,cpu_per_component,"
    "ram_mb_per_component,runtime_s,priority_class";

// Shortest decimal text that parses back to the same double.
std::string FormatNumber(double v);

// Throws InputError naming the line for malformed rows, invalid requests
// and duplicate ids.
std::vector<Request> ReadTrace(std::istream& in);
std::vector<Request> ReadTrace(const std::filesystem::path& path);

void WriteTrace(std::ostream& out, const std::vector<Request>& requests);
void WriteTrace(const std::filesystem::path& path, const std::vector<Request>& requests);

// FNV-1a over the canonical serialisation; identifies a workload.
std::uint64_t Fingerprint(const std::vector<Request>& requests);

}  // namespace flexsched

#endif  // FLEXSCHED_TRACE_H

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

#include "flexsched/domain.h"

#include <cmath>
#include <sstream>

namespace flexsched {

bool Resources::Valid() const {
  return std::isfinite(cpu) && std::isfinite(ram) && cpu >= 0.0 && ram >= 0.0;
}

bool Fits(const Resources& demand, const Resources& capacity) {
  return demand.cpu <= capacity.cpu + kEpsilon &&
         demand.ram <= capacity.ram + kEpsilon;
}

bool StrictlyBelow(const Resources& used, const Resources& capacity) {
  return used.cpu < capacity.cpu - kEpsilon && used.ram < capacity.ram - kEpsilon;
}

std::string ToString(const Resources& r) {
  std::ostringstream os;
  os << "(" << r.cpu << " cpu, " << r.ram << " MB)";
  return os.str();
}

std::string_view ToString(AppClass c) {
  switch (c) {
    case AppClass::kBatchElastic:
      return "batch_elastic";
    case AppClass::kBatchRigid:
      return "batch_rigid";
    case AppClass::kInteractive:
      return "interactive";
  }
  return "unknown";
}

AppClass ParseAppClass(std::string_view s) {
  if (s == "batch_elastic") return AppClass::kBatchElastic;
  if (s == "batch_rigid") return AppClass::kBatchRigid;
  if (s == "interactive") return AppClass::kInteractive;
  throw InputError("unknown application class '" + std::string(s) + "'");
}

std::string_view ShortLabel(AppClass c) {
  switch (c) {
    case AppClass::kBatchElastic:
      return "B-E";
    case AppClass::kBatchRigid:
      return "B-R";
    case AppClass::kInteractive:
      return "Int";
  }
  return "?";
}

void ValidateRequest(const Request& req) {
  auto fail = [&](const std::string& why) {
    throw InputError("request " + std::to_string(req.id) + ": " + why);
  };
  if (!std::isfinite(req.submit_time) || req.submit_time < 0.0)
    fail("submit time must be finite and non-negative");
  if (req.n_core < 1) fail("n_core must be at least 1");
  if (req.n_elastic < 0) fail("n_elastic must be non-negative");
  if (req.app_class == AppClass::kBatchRigid && req.n_elastic != 0)
    fail("batch_rigid requests cannot have elastic components");
  if (!req.per_component.Valid()) fail("per-component demand must be finite and non-negative");
  if (!std::isfinite(req.nominal_runtime) || req.nominal_runtime <= 0.0)
    fail("nominal runtime must be positive");
}

RunState RunState::For(const Request& req) {
  RunState s;
  s.request_id = req.id;
  s.total_work = req.TotalWork();
  s.last_update = req.submit_time;
  return s;
}

void ClusterSpec::Validate() const {
  if (n_machines < 1) throw InputError("cluster needs at least one machine");
  if (!per_machine.Valid() || per_machine.cpu <= 0.0 || per_machine.ram <= 0.0)
    throw InputError("machine capacity must be positive in both dimensions");
}

}  // namespace flexsched

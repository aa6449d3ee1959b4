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

#include "flexsched/scheduler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>
#include <utility>

namespace flexsched {

std::string_view ToString(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::kFlexible:
      return "flexible";
    case SchedulerKind::kRigid:
      return "rigid";
    case SchedulerKind::kMalleable:
      return "malleable";
  }
  return "unknown";
}

SchedulerKind ParseSchedulerKind(std::string_view name) {
  if (name == "flexible") return SchedulerKind::kFlexible;
  if (name == "rigid") return SchedulerKind::kRigid;
  if (name == "malleable") return SchedulerKind::kMalleable;
  throw InputError("unknown scheduler '" + std::string(name) + "'");
}

std::string SchedulerConfig::Label() const {
  std::string label(ToString(kind));
  if (preemption) label += "-preempt";
  return label + "/" + policy.Name();
}

const Job& SchedulerState::job(RequestId id) const {
  auto it = jobs.find(id);
  if (it == jobs.end()) {
    throw InvariantViolation("unknown request " + std::to_string(id));
  }
  return it->second;
}

Job& SchedulerState::job(RequestId id) {
  return const_cast<Job&>(std::as_const(*this).job(id));
}

int MaxElasticGrant(const Request& req, const Resources& avail) {
  double g = req.n_elastic;
  if (req.per_component.cpu > 0.0) {
    g = std::min(g, std::floor((avail.cpu + kEpsilon) / req.per_component.cpu));
  }
  if (req.per_component.ram > 0.0) {
    g = std::min(g, std::floor((avail.ram + kEpsilon) / req.per_component.ram));
  }
  return std::max(0, static_cast<int>(g));
}

Scheduler::Scheduler(const SchedulerConfig& config, const ClusterSpec& cluster)
    : config_(config) {
  cluster.Validate();
  state_.cluster = cluster;
  state_.policy = config.policy;
  state_.preemption = config.preemption;
  state_.free = cluster.Total();
}

Resources Scheduler::MinimumFootprint(const Request& req) const {
  return req.CoreDemand();
}

const Assignment& Scheduler::OnArrival(const Request& req, double now) {
  ValidateRequest(req);
  if (state_.jobs.contains(req.id)) {
    throw InputError("duplicate request id " + std::to_string(req.id));
  }
  if (now + kEpsilon < req.submit_time) {
    throw InputError("request " + std::to_string(req.id) +
                     " delivered before its submit time");
  }
  if (!Fits(MinimumFootprint(req), state_.cluster.Total())) {
    throw RejectedRequest(req.id, "request " + std::to_string(req.id) + " needs " +
                                      ToString(MinimumFootprint(req)) +
                                      " but the cluster only has " +
                                      ToString(state_.cluster.Total()));
  }
  state_.jobs.emplace(req.id, Job{req, RunState::For(req)});
  HandleArrival(req.id, now);
  return state_.assignment;
}

const Assignment& Scheduler::OnDeparture(RequestId id, double now) {
  auto it = std::find(state_.serving.begin(), state_.serving.end(), id);
  if (it == state_.serving.end()) {
    throw InvariantViolation("departing request " + std::to_string(id) +
                             " is not being served");
  }
  const RunState& run = state_.job(id).run;
  if (std::abs(run.RemainingWork()) > kEpsilon * std::max(1.0, run.total_work)) {
    throw InvariantViolation("departing request " + std::to_string(id) +
                             " still has " + std::to_string(run.RemainingWork()) +
                             " component-seconds left");
  }
  state_.serving.erase(it);
  state_.jobs.erase(id);
  RecomputeAssignment();
  HandleDeparture(now);
  return state_.assignment;
}

SortKey Scheduler::KeyOf(RequestId id, double now) const {
  const Job& j = state_.job(id);
  return MakeSortKey(state_.policy, j.request, &j.run, now);
}

void Scheduler::SortLine(std::vector<RequestId>& line, double now) const {
  if (line.size() < 2) return;
  std::vector<std::pair<SortKey, RequestId>> keyed;
  keyed.reserve(line.size());
  for (RequestId id : line) keyed.emplace_back(KeyOf(id, now), id);
  auto before = [this](const auto& a, const auto& b) {
    return Precedes(state_.policy, a.first, b.first);
  };
  // Keys of most policies do not move between events, so the common case is
  // an already ordered line.
  if (std::is_sorted(keyed.begin(), keyed.end(), before)) return;
  std::sort(keyed.begin(), keyed.end(), before);
  for (std::size_t i = 0; i < keyed.size(); ++i) line[i] = keyed[i].second;
}

Resources Scheduler::CoreSum(const std::vector<RequestId>& ids) const {
  Resources sum;
  for (RequestId id : ids) sum += state_.job(id).request.CoreDemand();
  return sum;
}

Resources Scheduler::FullSum(const std::vector<RequestId>& ids) const {
  Resources sum;
  for (RequestId id : ids) sum += state_.job(id).request.FullDemand();
  return sum;
}

void Scheduler::Admit(RequestId id, double now) {
  Job& j = state_.job(id);
  if (!j.run.start_time) {
    j.run.start_time = now;
    j.run.last_update = now;
  }
  state_.serving.push_back(id);
}

void Scheduler::RecomputeAssignment() {
  Assignment a;
  for (RequestId id : state_.serving) {
    const Job& j = state_.job(id);
    a.grants[id] = j.run.granted_elastic;
    a.allocated += static_cast<double>(ProgressRate(j.request, j.run)) *
                   j.request.per_component;
  }
  const Resources total = state_.cluster.Total();
  if (!Fits(a.allocated, total)) {
    throw InvariantViolation("allocation " + ToString(a.allocated) +
                             " exceeds cluster " + ToString(total));
  }
  state_.free = total - a.allocated;
  state_.free.cpu = std::max(0.0, state_.free.cpu);
  state_.free.ram = std::max(0.0, state_.free.ram);
  state_.assignment = std::move(a);
}

void Scheduler::CheckInvariants() const {
  std::unordered_set<RequestId> seen;
  auto visit = [&](const std::vector<RequestId>& line, const char* name) {
    for (RequestId id : line) {
      if (!state_.jobs.contains(id)) {
        throw InvariantViolation(std::string(name) + " holds unknown request " +
                                 std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw InvariantViolation("request " + std::to_string(id) +
                                 " is in more than one line");
      }
    }
  };
  visit(state_.serving, "serving set");
  visit(state_.waiting, "waiting line");
  visit(state_.priority_waiting, "priority line");
  if (seen.size() != state_.jobs.size()) {
    throw InvariantViolation("a known request is in no line");
  }
  if (!state_.preemption && !state_.priority_waiting.empty()) {
    throw InvariantViolation("priority line used without preemption");
  }
  const Resources total = state_.cluster.Total();
  if (!Fits(CoreSum(state_.serving), total)) {
    throw InvariantViolation("core demands of the serving set exceed the cluster");
  }
  Resources allocated;
  for (RequestId id : state_.serving) {
    const Job& j = state_.job(id);
    if (j.run.granted_elastic < 0 || j.run.granted_elastic > j.request.n_elastic) {
      throw InvariantViolation("grant out of range for request " + std::to_string(id));
    }
    if (!j.run.start_time) {
      throw InvariantViolation("serving request " + std::to_string(id) +
                               " has no start time");
    }
    allocated += static_cast<double>(ProgressRate(j.request, j.run)) *
                 j.request.per_component;
  }
  if (!Fits(allocated, total)) {
    throw InvariantViolation("allocation exceeds the cluster");
  }
  const Resources diff = total - allocated - state_.free;
  if (std::abs(diff.cpu) > 1e-6 * std::max(1.0, total.cpu) ||
      std::abs(diff.ram) > 1e-6 * std::max(1.0, total.ram)) {
    throw InvariantViolation("free pool out of sync with the assignment");
  }
}

// --- Flexible -------------------------------------------------------------

// Fit tests below use <= where the classic formulation writes a strict <: an
// exact fit is a valid allocation.

void FlexibleScheduler::HandleArrival(RequestId id, double now) {
  const Request& req = state_.job(id).request;
  if (state_.preemption && !state_.serving.empty()) {
    SortLine(state_.serving, now);
    const SortKey key = KeyOf(id, now);
    // Only the priority class triggers preemption; policy order within a
    // class does not.
    if (key.class_rank > KeyOf(state_.serving.back(), now).class_rank) {
      // Only resources held by granted elastic components can be reclaimed.
      Resources reclaimable = state_.free;
      for (RequestId s : state_.serving) {
        const Job& j = state_.job(s);
        reclaimable += j.request.ElasticDemand(j.run.granted_elastic);
      }
      if (Fits(req.CoreDemand(), reclaimable)) {
        Admit(id, now);
        Rebalance(now);
      } else {
        state_.priority_waiting.push_back(id);
        SortLine(state_.priority_waiting, now);
      }
      return;
    }
  }
  state_.waiting.push_back(id);
  SortLine(state_.waiting, now);
  // Usually the head is the new arrival; under HRRN aging may also have
  // promoted an older request since the last event.
  const Request& head = state_.job(state_.waiting.front()).request;
  if (Fits(head.CoreDemand(), state_.free)) Rebalance(now);
}

void FlexibleScheduler::HandleDeparture(double now) {
  if (state_.preemption) {
    SortLine(state_.priority_waiting, now);
    const Resources total = state_.cluster.Total();
    Resources cores = CoreSum(state_.serving);
    auto& line = state_.priority_waiting;
    while (!line.empty()) {
      const RequestId head = line.front();
      const Resources need = state_.job(head).request.CoreDemand();
      if (!Fits(cores + need, total)) break;
      line.erase(line.begin());
      Admit(head, now);
      cores += need;
    }
  }
  Rebalance(now);
}

void FlexibleScheduler::Rebalance(double now) {
  const Resources total = state_.cluster.Total();

  // Admission: grow the serving set only while it cannot saturate the
  // cluster on its own. Running out of either dimension counts as
  // saturation.
  SortLine(state_.waiting, now);
  Resources full = FullSum(state_.serving);
  Resources cores = CoreSum(state_.serving);
  auto& line = state_.waiting;
  std::size_t admitted = 0;
  while (admitted < line.size() && StrictlyBelow(full, total)) {
    const Request& head = state_.job(line[admitted]).request;
    if (!Fits(cores + head.CoreDemand(), total)) break;
    Admit(head.id, now);
    cores += head.CoreDemand();
    full += head.FullDemand();
    ++admitted;
  }
  line.erase(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(admitted));

  // Grants are recomputed from scratch in policy order; a request may lose
  // elastic components it held before.
  SortLine(state_.serving, now);
  Resources avail = total - cores;
  for (RequestId id : state_.serving) {
    Job& j = state_.job(id);
    j.run.granted_elastic = MaxElasticGrant(j.request, avail);
    avail -= j.request.ElasticDemand(j.run.granted_elastic);
  }
  RecomputeAssignment();
}

// --- Rigid ----------------------------------------------------------------

Resources RigidScheduler::MinimumFootprint(const Request& req) const {
  return req.FullDemand();
}

void RigidScheduler::HandleArrival(RequestId id, double now) {
  state_.waiting.push_back(id);
  AdmitFromHead(now);
}

void RigidScheduler::HandleDeparture(double now) { AdmitFromHead(now); }

void RigidScheduler::AdmitFromHead(double now) {
  SortLine(state_.waiting, now);
  auto& line = state_.waiting;
  std::size_t admitted = 0;
  while (admitted < line.size()) {
    Job& head = state_.job(line[admitted]);
    if (!Fits(head.request.FullDemand(), state_.free)) break;
    head.run.granted_elastic = head.request.n_elastic;
    Admit(head.request.id, now);
    state_.free -= head.request.FullDemand();
    ++admitted;
  }
  line.erase(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(admitted));
  RecomputeAssignment();
}

// --- Malleable ------------------------------------------------------------

void MalleableScheduler::HandleArrival(RequestId id, double now) {
  state_.waiting.push_back(id);
  GrowThenAdmit(now);
}

void MalleableScheduler::HandleDeparture(double now) { GrowThenAdmit(now); }

void MalleableScheduler::GrowThenAdmit(double now) {
  // Running requests are topped up first, in policy order.
  SortLine(state_.serving, now);
  Resources avail = state_.free;
  for (RequestId id : state_.serving) {
    Job& j = state_.job(id);
    const int current = j.run.granted_elastic;
    Request remaining = j.request;
    remaining.n_elastic = j.request.n_elastic - current;
    const int extra = MaxElasticGrant(remaining, avail);
    j.run.granted_elastic = current + extra;
    avail -= j.request.ElasticDemand(extra);
  }

  SortLine(state_.waiting, now);
  auto& line = state_.waiting;
  std::size_t admitted = 0;
  while (admitted < line.size()) {
    Job& head = state_.job(line[admitted]);
    if (!Fits(head.request.CoreDemand(), avail)) break;
    avail -= head.request.CoreDemand();
    head.run.granted_elastic = MaxElasticGrant(head.request, avail);
    avail -= head.request.ElasticDemand(head.run.granted_elastic);
    Admit(head.request.id, now);
    ++admitted;
  }
  line.erase(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(admitted));
  RecomputeAssignment();
}

std::unique_ptr<Scheduler> MakeScheduler(const SchedulerConfig& config,
                                         const ClusterSpec& cluster) {
  switch (config.kind) {
    case SchedulerKind::kFlexible:
      return std::make_unique<FlexibleScheduler>(config, cluster);
    case SchedulerKind::kRigid:
      if (config.preemption) throw InputError("preemption requires the flexible scheduler");
      return std::make_unique<RigidScheduler>(config, cluster);
    case SchedulerKind::kMalleable:
      if (config.preemption) throw InputError("preemption requires the flexible scheduler");
      return std::make_unique<MalleableScheduler>(config, cluster);
  }
  throw InputError("unknown scheduler kind");
}

}  // namespace flexsched

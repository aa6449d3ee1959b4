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

// Sorting disciplines for the waiting lines and the serving set.
//
// Every policy maps a request to a SortKey. Keys compare by class rank
// (higher first), then by the policy value, then by arrival time and id.
// FIFO, SJF and SRPT serve the smallest value first; HRRN serves the largest
// value first, since its value is a response ratio that grows with waiting.
//
// Size definitions by dimensionality:
//   1D  runTime / remainingRunTime / (1 + waitTime / runTime)
//   2D  the 1D quantity times the number of requested services (SRPT_2:
//       services not yet granted)
//   3D  the 1D quantity times the sum of cpu * ram over those services

#ifndef FLEXSCHED_POLICY_H
#define FLEXSCHED_POLICY_H

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexsched/domain.h"

namespace flexsched {

enum class PolicyFamily { kFifo, kSjf, kSrpt1, kSrpt2, kHrrn };
enum class SizeDimension { k1D, k2D, k3D };

struct PolicyId {
  PolicyFamily family = PolicyFamily::kFifo;
  SizeDimension dimension = SizeDimension::k1D;

  // Accepts fifo, sjf, srpt1, srpt2 (srpt is an alias of srpt1) and hrrn,
  // optionally suffixed with -1d, -2d or -3d.
  static PolicyId Parse(std::string_view name);
  // Canonical name, e.g. "sjf-2d". FIFO is always "fifo".
  std::string Name() const;
  bool ServesLargestFirst() const { return family == PolicyFamily::kHrrn; }

  friend bool operator==(const PolicyId&, const PolicyId&) = default;
};

struct SortKey {
  int class_rank = 0;
  double value = 0.0;
  double arrival = 0.0;
  RequestId id = 0;
};

// `run` may be null for a request the scheduler has not seen yet. A request
// counts as running once its RunState has a start time.
SortKey MakeSortKey(const PolicyId& policy, const Request& req,
                    const RunState* run, double now);

// True iff `a` must be served before `b`.
bool Precedes(const PolicyId& policy, const SortKey& a, const SortKey& b);

struct Candidate {
  const Request* request = nullptr;
  const RunState* run = nullptr;
};

// Indices of `candidates` in service order.
std::vector<std::size_t> Order(const PolicyId& policy,
                               std::span<const Candidate> candidates, double now);

}  // namespace flexsched

#endif  // FLEXSCHED_POLICY_H

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

#include "flexsched/policy.h"

#include <algorithm>
#include <numeric>

namespace flexsched {
namespace {

double SizeOf(SizeDimension dim, const Request& req, int services) {
  switch (dim) {
    case SizeDimension::k1D:
      return 1.0;
    case SizeDimension::k2D:
      return static_cast<double>(services);
    case SizeDimension::k3D:
      return static_cast<double>(services) * req.per_component.cpu *
             req.per_component.ram;
  }
  return 1.0;
}

}  // namespace

PolicyId PolicyId::Parse(std::string_view name) {
  PolicyId id;
  std::string_view base = name;
  if (auto dash = name.rfind('-'); dash != std::string_view::npos) {
    std::string_view suffix = name.substr(dash + 1);
    base = name.substr(0, dash);
    if (suffix == "1d") {
      id.dimension = SizeDimension::k1D;
    } else if (suffix == "2d") {
      id.dimension = SizeDimension::k2D;
    } else if (suffix == "3d") {
      id.dimension = SizeDimension::k3D;
    } else {
      throw InputError("unknown policy size suffix in '" + std::string(name) + "'");
    }
  }
  if (base == "fifo") {
    id.family = PolicyFamily::kFifo;
    id.dimension = SizeDimension::k1D;
  } else if (base == "sjf") {
    id.family = PolicyFamily::kSjf;
  } else if (base == "srpt" || base == "srpt1") {
    id.family = PolicyFamily::kSrpt1;
  } else if (base == "srpt2") {
    id.family = PolicyFamily::kSrpt2;
  } else if (base == "hrrn") {
    id.family = PolicyFamily::kHrrn;
  } else {
    throw InputError("unknown policy '" + std::string(name) + "'");
  }
  return id;
}

std::string PolicyId::Name() const {
  std::string base;
  switch (family) {
    case PolicyFamily::kFifo:
      return "fifo";
    case PolicyFamily::kSjf:
      base = "sjf";
      break;
    case PolicyFamily::kSrpt1:
      base = "srpt1";
      break;
    case PolicyFamily::kSrpt2:
      base = "srpt2";
      break;
    case PolicyFamily::kHrrn:
      base = "hrrn";
      break;
  }
  switch (dimension) {
    case SizeDimension::k1D:
      return base + "-1d";
    case SizeDimension::k2D:
      return base + "-2d";
    case SizeDimension::k3D:
      return base + "-3d";
  }
  return base;
}

SortKey MakeSortKey(const PolicyId& policy, const Request& req,
                    const RunState* run, double now) {
  const bool running = run != nullptr && run->Started();
  const double wait =
      running ? *run->start_time - req.submit_time : now - req.submit_time;
  if (wait < -kEpsilon) {
    throw InputError("request " + std::to_string(req.id) +
                     " has negative waiting time (clock inversion)");
  }

  SortKey key;
  key.class_rank = req.priority_class;
  key.arrival = req.submit_time;
  key.id = req.id;

  const double run_time = req.nominal_runtime;
  const double remaining =
      running ? run->RemainingWork() / req.Services() : req.nominal_runtime;
  const int unscheduled =
      running ? req.Services() - run->granted_elastic : req.Services();

  switch (policy.family) {
    case PolicyFamily::kFifo:
      key.value = req.submit_time;
      break;
    case PolicyFamily::kSjf:
      key.value = run_time * SizeOf(policy.dimension, req, req.Services());
      break;
    case PolicyFamily::kSrpt1:
      key.value = remaining * SizeOf(policy.dimension, req, req.Services());
      break;
    case PolicyFamily::kSrpt2:
      key.value = remaining * SizeOf(policy.dimension, req, unscheduled);
      break;
    case PolicyFamily::kHrrn:
      key.value = (1.0 + std::max(wait, 0.0) / run_time) *
                  SizeOf(policy.dimension, req, req.Services());
      break;
  }
  return key;
}

bool Precedes(const PolicyId& policy, const SortKey& a, const SortKey& b) {
  if (a.class_rank != b.class_rank) return a.class_rank > b.class_rank;
  if (a.value != b.value) {
    return policy.ServesLargestFirst() ? a.value > b.value : a.value < b.value;
  }
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.id < b.id;
}

std::vector<std::size_t> Order(const PolicyId& policy,
                               std::span<const Candidate> candidates, double now) {
  std::vector<SortKey> keys;
  keys.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    keys.push_back(MakeSortKey(policy, *c.request, c.run, now));
  }
  std::vector<std::size_t> perm(candidates.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return Precedes(policy, keys[a], keys[b]);
  });
  return perm;
}

}  // namespace flexsched

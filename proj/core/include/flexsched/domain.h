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

// Value types shared by the scheduling library: resource vectors, application
// requests, per-request execution state, the cluster and the virtual
// assignment produced by a scheduler.

#ifndef FLEXSCHED_DOMAIN_H
#define FLEXSCHED_DOMAIN_H

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flexsched {

// Absolute tolerance used for every floating point comparison on resources
// and time.
inline constexpr double kEpsilon = 1e-9;

using RequestId = std::uint64_t;

// Malformed or inconsistent input (configuration, trace rows, requests).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request whose demand can never be satisfied by the cluster. It is
// recorded and dropped rather than scheduled.
class RejectedRequest : public std::runtime_error {
 public:
  RejectedRequest(RequestId id, const std::string& what)
      : std::runtime_error(what), id_(id) {}
  RequestId id() const { return id_; }

 private:
  RequestId id_;
};

// A broken internal invariant. Always a bug in the library.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A simulation that cannot finish, e.g. a request blocked forever.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two-dimensional resource quantity: fractional CPU cores and RAM in MB.
struct Resources {
  double cpu = 0.0;
  double ram = 0.0;

  Resources& operator+=(const Resources& o) {
    cpu += o.cpu;
    ram += o.ram;
    return *this;
  }
  Resources& operator-=(const Resources& o) {
    cpu -= o.cpu;
    ram -= o.ram;
    return *this;
  }
  friend Resources operator+(Resources a, const Resources& b) { return a += b; }
  friend Resources operator-(Resources a, const Resources& b) { return a -= b; }
  friend Resources operator*(double k, const Resources& r) {
    return {k * r.cpu, k * r.ram};
  }
  friend bool operator==(const Resources&, const Resources&) = default;

  bool Valid() const;
};

// True iff `demand` is within `capacity` in every dimension. An exact fit
// counts as a fit.
bool Fits(const Resources& demand, const Resources& capacity);

// True iff `used` is strictly below `capacity` in every dimension.
bool StrictlyBelow(const Resources& used, const Resources& capacity);

std::string ToString(const Resources& r);

enum class AppClass { kBatchElastic, kBatchRigid, kInteractive };

std::string_view ToString(AppClass c);
// Trace labels: batch_elastic, batch_rigid, interactive.
AppClass ParseAppClass(std::string_view s);
// Short report labels: B-E, B-R, Int.
std::string_view ShortLabel(AppClass c);

// An analytic application request. Core and elastic components share the
// same per-component demand.
struct Request {
  RequestId id = 0;
  double submit_time = 0.0;
  AppClass app_class = AppClass::kBatchElastic;
  int priority_class = 0;
  int n_core = 1;
  int n_elastic = 0;
  Resources per_component;
  double nominal_runtime = 1.0;

  int Services() const { return n_core + n_elastic; }
  Resources CoreDemand() const { return static_cast<double>(n_core) * per_component; }
  Resources FullDemand() const {
    return static_cast<double>(Services()) * per_component;
  }
  Resources ElasticDemand(int granted) const {
    return static_cast<double>(granted) * per_component;
  }
  // Component-seconds needed to complete: runtime x all components.
  double TotalWork() const { return nominal_runtime * Services(); }

  friend bool operator==(const Request&, const Request&) = default;
};

// Throws InputError if the request breaks a structural invariant.
void ValidateRequest(const Request& req);

// Mutable execution record of one request.
struct RunState {
  RequestId request_id = 0;
  double total_work = 0.0;
  double progress = 0.0;
  int granted_elastic = 0;
  double last_update = 0.0;
  std::optional<double> start_time;
  std::optional<double> finish_time;

  static RunState For(const Request& req);

  bool Started() const { return start_time.has_value(); }
  double RemainingWork() const { return total_work - progress; }
};

// Components currently producing work for `req` under `run`.
inline int ProgressRate(const Request& req, const RunState& run) {
  return req.n_core + run.granted_elastic;
}

struct ClusterSpec {
  int n_machines = 1;
  Resources per_machine;

  Resources Total() const {
    return static_cast<double>(n_machines) * per_machine;
  }
  void Validate() const;
};

// The scheduler's declarative output: granted elastic components per serving
// request plus the aggregate resources they hold.
struct Assignment {
  std::map<RequestId, int> grants;
  Resources allocated;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

}  // namespace flexsched

#endif  // FLEXSCHED_DOMAIN_H

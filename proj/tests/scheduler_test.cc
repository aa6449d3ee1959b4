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

#include <gtest/gtest.h>

#include <numeric>

#include "flexsched/engine.h"
#include "support/test_support.h"

namespace flexsched {
namespace {

using testing::FourRequestExample;
using testing::MakeRequest;
using testing::TenUnitCluster;

constexpr RequestId kA = 1, kB = 2, kC = 3, kD = 4;

std::map<RequestId, int> Grants(const Scheduler& s) { return s.state().assignment.grants; }

// Marks `id` as finished so the scheduler accepts its departure.
void Complete(Scheduler& s, RequestId id) {
  RunState& run = s.mutable_state().job(id).run;
  run.progress = run.total_work;
}

class FlexibleExampleTest : public ::testing::Test {
 protected:
  FlexibleExampleTest()
      : sched_({SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster()) {}

  void ArriveAll() {
    for (const Request& r : FourRequestExample()) sched_.OnArrival(r, 0);
  }

  FlexibleScheduler sched_;
};

TEST_F(FlexibleExampleTest, FirstArrivalGetsEverything) {
  sched_.OnArrival(FourRequestExample()[0], 0);
  EXPECT_EQ(sched_.state().serving, (std::vector<RequestId>{kA}));
  EXPECT_EQ(Grants(sched_), (std::map<RequestId, int>{{kA, 4}}));
  EXPECT_EQ(sched_.state().free, (Resources{3, 3}));
}

TEST_F(FlexibleExampleTest, AdmissionStopsOnceServingSetSaturates) {
  ArriveAll();
  EXPECT_EQ(sched_.state().serving, (std::vector<RequestId>{kA, kB}));
  EXPECT_EQ(sched_.state().waiting, (std::vector<RequestId>{kC, kD}));
  EXPECT_EQ(Grants(sched_), (std::map<RequestId, int>{{kA, 4}, {kB, 0}}));
  EXPECT_EQ(sched_.state().assignment.allocated, (Resources{10, 10}));
  sched_.CheckInvariants();
}

TEST_F(FlexibleExampleTest, DeparturesReassignInOrder) {
  ArriveAll();
  Complete(sched_, kA);
  sched_.OnDeparture(kA, 10);
  EXPECT_EQ(sched_.state().serving, (std::vector<RequestId>{kB, kC}));
  EXPECT_EQ(Grants(sched_), (std::map<RequestId, int>{{kB, 2}, {kC, 2}}));

  Complete(sched_, kB);
  sched_.OnDeparture(kB, 14);
  // C keeps 4 of its 5 elastic components so that D's cores fit.
  EXPECT_EQ(sched_.state().serving, (std::vector<RequestId>{kC, kD}));
  EXPECT_EQ(Grants(sched_), (std::map<RequestId, int>{{kC, 4}, {kD, 0}}));
  EXPECT_EQ(*sched_.state().job(kD).run.start_time, 14);
  sched_.CheckInvariants();

  Complete(sched_, kC);
  sched_.OnDeparture(kC, 158.0 / 7);
  Complete(sched_, kD);
  sched_.OnDeparture(kD, 192.0 / 7);
  EXPECT_TRUE(sched_.state().serving.empty());
  EXPECT_TRUE(sched_.state().waiting.empty());
  EXPECT_TRUE(sched_.state().jobs.empty());
  EXPECT_EQ(sched_.state().free, TenUnitCluster().Total());
}

TEST_F(FlexibleExampleTest, RebalanceOnEmptyStateIsEmpty) {
  sched_.Rebalance(0);
  EXPECT_TRUE(sched_.state().assignment.grants.empty());
  EXPECT_EQ(sched_.state().free, TenUnitCluster().Total());
}

TEST_F(FlexibleExampleTest, RebalanceAdmitsWhenCoresFit) {
  // S = [C], L = [D] with C holding everything.
  auto reqs = FourRequestExample();
  sched_.OnArrival(reqs[2], 0);
  sched_.mutable_state().waiting.push_back(kD);
  sched_.mutable_state().jobs.emplace(kD, Job{reqs[3], RunState::For(reqs[3])});
  sched_.Rebalance(1);
  EXPECT_EQ(sched_.state().serving, (std::vector<RequestId>{kC, kD}));
  EXPECT_EQ(Grants(sched_), (std::map<RequestId, int>{{kC, 4}, {kD, 0}}));
}

TEST(FlexibleSchedulerTest, SaturatedServingSetBlocksAdmission) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster());
  s.OnArrival(MakeRequest(1, 2, 8, {1, 1}, 10), 0);
  s.OnArrival(MakeRequest(2, 1, 0, {1, 1}, 10), 0);
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{1}));
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{2}));
}

TEST(FlexibleSchedulerTest, ExactFitIsAdmitted) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster());
  s.OnArrival(MakeRequest(1, 7, 0, {1, 1}, 10), 0);
  s.OnArrival(MakeRequest(2, 3, 0, {1, 1}, 10), 0);
  EXPECT_EQ(s.state().serving.size(), 2u);
  EXPECT_EQ(s.state().free, (Resources{0, 0}));
}

TEST(FlexibleSchedulerTest, EitherDimensionSaturates) {
  // CPU has room but RAM is fully requested, so no further admission.
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, false}, ClusterSpec{1, {10, 10}});
  s.OnArrival(MakeRequest(1, 1, 1, {1, 5}, 10), 0);
  s.OnArrival(MakeRequest(2, 1, 0, {1, 1}, 10), 0);
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{1}));
}

TEST(FlexibleSchedulerTest, ArrivalBehindTheHeadDoesNotTriggerAdmission) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster());
  s.OnArrival(MakeRequest(1, 5, 0, {1, 1}, 10), 0);
  s.OnArrival(MakeRequest(2, 6, 0, {1, 1}, 10), 1);  // head, does not fit
  s.OnArrival(MakeRequest(3, 1, 0, {1, 1}, 10), 2);  // would fit, but behind 2
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{1}));
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{2, 3}));
}

TEST(FlexibleSchedulerTest, PreemptiveArrivalReclaimsElasticResources) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, true}, TenUnitCluster());
  for (const Request& r : FourRequestExample()) s.OnArrival(r, 0);
  s.OnArrival(MakeRequest(5, 3, 0, {1, 1}, 2, /*submit=*/5, /*priority=*/1), 5);
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{5, kA, kB}));
  EXPECT_EQ(Grants(s), (std::map<RequestId, int>{{5, 0}, {kA, 1}, {kB, 0}}));
  EXPECT_TRUE(s.state().priority_waiting.empty());
  s.CheckInvariants();
}

TEST(FlexibleSchedulerTest, PreemptiveArrivalThatCannotFitWaitsInPriorityLine) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, true}, TenUnitCluster());
  for (const Request& r : FourRequestExample()) s.OnArrival(r, 0);
  // Needs 5 cores; only 4 elastic units are reclaimable.
  s.OnArrival(MakeRequest(5, 5, 0, {1, 1}, 2, 5, 1), 5);
  EXPECT_EQ(s.state().priority_waiting, (std::vector<RequestId>{5}));
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{kA, kB}));

  // A's departure leaves B's 3 cores; the priority line goes first.
  Complete(s, kA);
  s.OnDeparture(kA, 10);
  EXPECT_TRUE(s.state().priority_waiting.empty());
  EXPECT_EQ(s.state().serving.front(), 5u);
  EXPECT_EQ(s.state().job(5).run.start_time, 10);
  s.CheckInvariants();
}

TEST(FlexibleSchedulerTest, LowerPriorityArrivalFallsThroughWhenPreemptive) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, true}, TenUnitCluster());
  for (const Request& r : FourRequestExample()) s.OnArrival(r, 0);
  s.OnArrival(MakeRequest(5, 1, 0, {1, 1}, 2, 5), 5);
  EXPECT_EQ(s.state().waiting.back(), 5u);
  EXPECT_TRUE(s.state().priority_waiting.empty());
}

TEST(FlexibleSchedulerTest, AgingCanPromoteAnOlderRequestAtAnArrival) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId::Parse("hrrn"), false},
                      TenUnitCluster());
  s.OnArrival(MakeRequest(1, 6, 0, {1, 1}, 100), 0);
  s.OnArrival(MakeRequest(2, 5, 0, {1, 1}, 100), 0);      // head, does not fit
  s.OnArrival(MakeRequest(3, 3, 0, {1, 1}, 1, 0.5), 0.5);  // behind 2 for now
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{2, 3}));
  // At t=2 request 3's response ratio (2.5) has overtaken request 2's (1.02).
  s.OnArrival(MakeRequest(4, 5, 0, {1, 1}, 1000, 2), 2);
  EXPECT_EQ(s.state().serving.size(), 2u);
  EXPECT_EQ(s.state().job(3).run.start_time, 2);
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{2, 4}));
}

TEST(FlexibleSchedulerTest, PolicyOrderAloneDoesNotPreempt) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId::Parse("srpt1"), true},
                      TenUnitCluster());
  s.OnArrival(MakeRequest(1, 2, 8, {1, 1}, 100), 0);
  // Much shorter than request 1, but of the same priority class.
  s.OnArrival(MakeRequest(2, 2, 0, {1, 1}, 1, 1), 1);
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{1}));
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{2}));
  EXPECT_TRUE(s.state().priority_waiting.empty());
}

TEST(SchedulerTest, RejectsDuplicatesAndOversizedRequests) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster());
  s.OnArrival(MakeRequest(1, 1, 0, {1, 1}, 10), 0);
  EXPECT_THROW(s.OnArrival(MakeRequest(1, 1, 0, {1, 1}, 10), 0), InputError);
  EXPECT_THROW(s.OnArrival(MakeRequest(2, 11, 0, {1, 1}, 10), 0), RejectedRequest);
  // Elastic components beyond the cluster are fine for the flexible scheduler.
  EXPECT_NO_THROW(s.OnArrival(MakeRequest(3, 2, 20, {1, 1}, 10), 0));

  RigidScheduler r({SchedulerKind::kRigid, PolicyId{}, false}, TenUnitCluster());
  EXPECT_THROW(r.OnArrival(MakeRequest(3, 2, 20, {1, 1}, 10), 0), RejectedRequest);
}

TEST(SchedulerTest, DepartureOfUnknownOrUnfinishedRequestIsAViolation) {
  FlexibleScheduler s({SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster());
  s.OnArrival(MakeRequest(1, 1, 0, {1, 1}, 10), 0);
  EXPECT_THROW(s.OnDeparture(7, 1), InvariantViolation);
  EXPECT_THROW(s.OnDeparture(1, 1), InvariantViolation);
}

TEST(SchedulerTest, PreemptionOnlyWithFlexible) {
  EXPECT_THROW(MakeScheduler({SchedulerKind::kRigid, PolicyId{}, true}, TenUnitCluster()),
               InputError);
  EXPECT_THROW(MakeScheduler({SchedulerKind::kMalleable, PolicyId{}, true}, TenUnitCluster()),
               InputError);
  EXPECT_NO_THROW(MakeScheduler({SchedulerKind::kFlexible, PolicyId{}, true}, TenUnitCluster()));
  EXPECT_EQ(ParseSchedulerKind("malleable"), SchedulerKind::kMalleable);
  EXPECT_THROW(ParseSchedulerKind("greedy"), InputError);
}

TEST(MaxElasticGrantTest, LimitedByTightestDimension) {
  Request r = MakeRequest(1, 1, 10, {2, 3}, 1);
  EXPECT_EQ(MaxElasticGrant(r, {100, 100}), 10);
  EXPECT_EQ(MaxElasticGrant(r, {7, 100}), 3);
  EXPECT_EQ(MaxElasticGrant(r, {100, 7}), 2);
  EXPECT_EQ(MaxElasticGrant(r, {0, 0}), 0);
  EXPECT_EQ(MaxElasticGrant(r, {-1e-12, 5}), 0);
}

TEST(RigidSchedulerTest, NoBackfillPastABlockedHead) {
  RigidScheduler s({SchedulerKind::kRigid, PolicyId{}, false}, TenUnitCluster());
  for (const Request& r : FourRequestExample()) s.OnArrival(r, 0);
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{kA}));
  EXPECT_EQ(Grants(s), (std::map<RequestId, int>{{kA, 4}}));
  // A 1-unit request would fit in the 3 free units but sits behind B.
  s.OnArrival(MakeRequest(9, 1, 0, {1, 1}, 1), 1);
  EXPECT_EQ(s.state().serving, (std::vector<RequestId>{kA}));
}

TEST(MalleableSchedulerTest, GrowsServingRequestsBeforeAdmitting) {
  MalleableScheduler s({SchedulerKind::kMalleable, PolicyId{}, false}, TenUnitCluster());
  for (const Request& r : FourRequestExample()) s.OnArrival(r, 0);
  EXPECT_EQ(Grants(s), (std::map<RequestId, int>{{kA, 4}, {kB, 0}}));

  Complete(s, kA);
  s.OnDeparture(kA, 10);
  EXPECT_EQ(Grants(s), (std::map<RequestId, int>{{kB, 2}, {kC, 2}}));

  Complete(s, kB);
  s.OnDeparture(kB, 14);
  // C grows to its full size and D's cores no longer fit.
  EXPECT_EQ(Grants(s), (std::map<RequestId, int>{{kC, 5}}));
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{kD}));
}

TEST(MalleableSchedulerTest, NeverShrinksAGrant) {
  MalleableScheduler s({SchedulerKind::kMalleable, PolicyId::Parse("sjf"), false},
                       TenUnitCluster());
  s.OnArrival(MakeRequest(1, 2, 8, {1, 1}, 100), 0);
  s.OnArrival(MakeRequest(2, 1, 0, {1, 1}, 1), 1);  // shorter, but nothing is reclaimed
  EXPECT_EQ(Grants(s), (std::map<RequestId, int>{{1, 8}}));
  EXPECT_EQ(s.state().waiting, (std::vector<RequestId>{2}));
}

// All three schedulers coincide when there is nothing elastic to move.
TEST(SchedulerEquivalenceTest, InelasticWorkloadsScheduleIdentically) {
  const ClusterSpec cluster{1, {10, 10}};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto reqs = testing::RandomSmallWorkload(seed, cluster, 40);
    for (auto& r : reqs) {
      r.n_elastic = 0;
      r.app_class = AppClass::kBatchRigid;
    }
    for (const char* policy : {"fifo", "sjf", "srpt1", "hrrn", "sjf-3d", "hrrn-2d"}) {
      const PolicyId p = PolicyId::Parse(policy);
      const auto rigid = flexsched::Run(reqs, {SchedulerKind::kRigid, p, false}, cluster);
      const auto flexible = flexsched::Run(reqs, {SchedulerKind::kFlexible, p, false}, cluster);
      const auto malleable = flexsched::Run(reqs, {SchedulerKind::kMalleable, p, false}, cluster);
      ASSERT_EQ(rigid.completed.size(), flexible.completed.size());
      for (std::size_t i = 0; i < rigid.completed.size(); ++i) {
        EXPECT_NEAR(rigid.completed[i].start, flexible.completed[i].start, 1e-9);
        EXPECT_NEAR(rigid.completed[i].finish, flexible.completed[i].finish, 1e-9);
        EXPECT_NEAR(rigid.completed[i].finish, malleable.completed[i].finish, 1e-9);
      }
    }
  }
}

// Mean turnaround of a unit-demand instance computed by the fixed-step
// re-simulator, not by the event engine.
double SteppedMeanTurnaround(const std::vector<Request>& reqs, SchedulerKind kind) {
  const auto finish = testing::SteppedFinishTimes(reqs, {kind, PolicyId{}, false},
                                                  TenUnitCluster(), /*dt=*/0.5);
  double sum = 0;
  for (const Request& r : reqs) sum += finish.at(r.id) - r.submit_time;
  return sum / static_cast<double>(reqs.size());
}

std::vector<std::pair<int, int>> UnitShapes() {
  std::vector<std::pair<int, int>> shapes;
  for (int core = 1; core <= 10; ++core) {
    for (int elastic = 0; core + elastic <= 10; ++elastic) shapes.emplace_back(core, elastic);
  }
  return shapes;
}

std::vector<Request> UnitInstance(const std::vector<std::pair<int, int>>& shapes) {
  std::vector<Request> reqs;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    reqs.push_back(
        MakeRequest(i + 1, shapes[i].first, shapes[i].second, {1, 1}, /*runtime=*/10));
  }
  return reqs;
}

// Exhaustive over every one- and two-request instance with unit components,
// demands up to the 10-unit cluster, equal runtimes and a common submit time.
TEST(FlexibleVersusRigidTest, NeverWorseOnTwoRequestInstances) {
  const auto shapes = UnitShapes();
  int checked = 0;
  for (const auto& a : shapes) {
    auto one = UnitInstance({a});
    ASSERT_LE(SteppedMeanTurnaround(one, SchedulerKind::kFlexible),
              SteppedMeanTurnaround(one, SchedulerKind::kRigid) + 1e-9);
    for (const auto& b : shapes) {
      auto two = UnitInstance({a, b});
      const double flexible = SteppedMeanTurnaround(two, SchedulerKind::kFlexible);
      const double rigid = SteppedMeanTurnaround(two, SchedulerKind::kRigid);
      ASSERT_LE(flexible, rigid + 1e-9)
          << "(" << a.first << "," << a.second << ") (" << b.first << "," << b.second << ")";
      ++checked;
    }
  }
  EXPECT_EQ(checked, 55 * 55);
}

// The same comparison does not extend to three requests: a core-light head
// that saturates the cluster is followed by a pair that shares it badly.
TEST(FlexibleVersusRigidTest, ThreeRequestCounterexample) {
  auto reqs = UnitInstance({{1, 9}, {1, 8}, {5, 5}});
  // Rigid: one at a time, finishing at 10, 20, 30.
  EXPECT_NEAR(SteppedMeanTurnaround(reqs, SchedulerKind::kRigid), 20.0, 1e-9);
  // Flexible: the second and third run together from t=10 at rates 5 and 5,
  // the second finishes at 28, the third then speeds up to 10 and ends at 29.
  EXPECT_NEAR(SteppedMeanTurnaround(reqs, SchedulerKind::kFlexible), (10.0 + 28 + 29) / 3, 1e-9);
  const auto engine = flexsched::Run(reqs, {SchedulerKind::kFlexible, PolicyId{}, false}, TenUnitCluster());
  EXPECT_NEAR(engine.completed[1].finish, 28, 1e-9);
  EXPECT_NEAR(engine.completed[2].finish, 29, 1e-9);
}

// Two requests with unequal runtimes and a staggered second arrival still
// never do worse than rigid; checked on the event engine.
TEST(FlexibleVersusRigidTest, NeverWorseOnStaggeredTwoRequestInstances) {
  auto mean = [](const std::vector<Request>& reqs, SchedulerKind kind) {
    const auto res = flexsched::Run(reqs, {kind, PolicyId{}, false}, TenUnitCluster());
    double sum = 0;
    for (const auto& c : res.completed) sum += c.finish - c.submit;
    return sum / static_cast<double>(reqs.size());
  };
  const auto shapes = UnitShapes();
  for (const auto& a : shapes) {
    for (const auto& b : shapes) {
      for (double ta : {10.0, 100.0}) {
        for (double tb : {10.0, 100.0}) {
          for (double submit : {0.0, 1.0, 5.0}) {
            std::vector<Request> reqs{MakeRequest(1, a.first, a.second, {1, 1}, ta),
                                      MakeRequest(2, b.first, b.second, {1, 1}, tb, submit)};
            ASSERT_LE(mean(reqs, SchedulerKind::kFlexible),
                      mean(reqs, SchedulerKind::kRigid) + 1e-9);
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace flexsched

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "spfrcs/fairshare.hpp"
#include "testutil.hpp"

using namespace spfrcs;
using namespace spfrcs::testutil;

namespace {

// a -e1-> b -e2-> c with flow A on {e1} and flow B on {e1,e2}
Instance two_link_instance(double c1, double c2) {
  Instance instance;
  instance.topology.nodes = {"a", "b", "c"};
  instance.topology.links = {L(1, "a", "b", c1), L(2, "b", "c", c2)};
  instance.flows = {F(0, {1}, 1.0), F(1, {1, 2}, 1.0)};
  return instance;
}

}  // namespace

TEST_CASE("three flows on one shared link split it evenly") {
  Instance instance = funnel_instance(12.9);
  Allocation alloc = allocate(instance, {});
  for (int id : {0, 1, 2}) {
    CHECK(std::abs(alloc.rates.at(id) - 4.3) <= 1e-9);
    CHECK(alloc.bottleneck.at(id) == 3);
  }
  CHECK(check_maxmin(instance, {}, alloc));
}

TEST_CASE("a lone flow exhausts its only link") {
  Instance instance;
  instance.topology.nodes = {"a", "b"};
  instance.topology.links = {L(0, "a", "b", 10.0)};
  instance.flows = {F(0, {0}, 2.0)};
  Allocation alloc = allocate(instance, {});
  CHECK(alloc.rates.at(0) == doctest::Approx(10.0));
  CHECK(alloc.bottleneck.at(0) == 0);
}

TEST_CASE("the tighter downstream link becomes the bottleneck") {
  Instance instance = two_link_instance(10.0, 4.0);
  Allocation alloc = allocate(instance, {});
  CHECK(std::abs(alloc.rates.at(1) - 4.0) <= 1e-9);
  CHECK(alloc.bottleneck.at(1) == 2);
  CHECK(std::abs(alloc.rates.at(0) - 6.0) <= 1e-9);
  CHECK(alloc.bottleneck.at(0) == 1);
  CHECK(check_maxmin(instance, {}, alloc));
}

TEST_CASE("controlled flows consume their pinned rate first") {
  Instance instance;
  instance.topology.nodes = {"a", "b"};
  instance.topology.links = {L(0, "a", "b", 10.0)};
  instance.flows = {F(0, {0}, 2.0), F(1, {0}, 1.0)};
  StatusMap statuses{{0, ControlStatus::pinned(7.0)}};
  Allocation alloc = allocate(instance, statuses);
  CHECK(alloc.rates.at(0) == doctest::Approx(7.0));
  CHECK(std::abs(alloc.rates.at(1) - 3.0) <= 1e-9);
  CHECK(check_maxmin(instance, statuses, alloc));
  CHECK(!alloc.bottleneck.count(0));
}

TEST_CASE("overloading pinned rates is a hard error naming the link") {
  Instance instance;
  instance.topology.nodes = {"a", "b"};
  instance.topology.links = {L(7, "a", "b", 10.0)};
  instance.flows = {F(0, {7}, 2.0), F(1, {7}, 1.0)};
  StatusMap statuses{{0, ControlStatus::pinned(6.0)},
                     {1, ControlStatus::pinned(5.0)}};
  try {
    allocate(instance, statuses);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.link_id() == 7);
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
}

TEST_CASE("unsatisfied_flows compares rates against demands") {
  Instance instance = funnel_instance(12.9, {7.5, 2.5, 2.5});

  SUBCASE("rates equal to demands are satisfied (boundary inclusive)") {
    Allocation alloc;
    for (const Flow& f : instance.flows) alloc.rates[f.id] = f.demand;
    CHECK(unsatisfied_flows(instance, alloc).empty());
  }

  SUBCASE("the even split starves only the big demand") {
    Allocation alloc = allocate(instance, {});
    CHECK(unsatisfied_flows(instance, alloc) == std::set<int>{0});
  }

  SUBCASE("no flows, nothing unsatisfied") {
    Instance empty;
    empty.topology = instance.topology;
    CHECK(unsatisfied_flows(empty, {}).empty());
  }

  SUBCASE("a missing rate is a contract violation") {
    Allocation alloc;
    CHECK_THROWS_AS(unsatisfied_flows(instance, alloc),
                    std::invalid_argument);
  }
}

TEST_CASE("check_maxmin rejects an all-zero allocation") {
  Instance instance = two_link_instance(10.0, 4.0);
  Allocation zero;
  for (const Flow& f : instance.flows) zero.rates[f.id] = 0.0;
  CHECK(!check_maxmin(instance, {}, zero));
}

TEST_CASE("allocate is deterministic and id-permutation equivariant") {
  Instance instance = two_link_instance(10.0, 4.0);
  Allocation a = allocate(instance, {});
  Allocation b = allocate(instance, {});
  CHECK(a == b);

  Instance swapped = instance;
  swapped.flows[0].id = 1;
  swapped.flows[1].id = 0;
  Allocation c = allocate(swapped, {});
  CHECK(c.rates.at(1) == a.rates.at(0));
  CHECK(c.rates.at(0) == a.rates.at(1));
}

TEST_CASE("allocate output always passes the max-min checker") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 400; ++i) {
    RandomCase rc = random_case(rng);
    REQUIRE(validate_instance(rc.instance).empty());
    Allocation alloc = allocate(rc.instance, rc.statuses);
    CHECK(check_maxmin(rc.instance, rc.statuses, alloc));
    // every link a bottleneck flow points at is exhausted
    for (const auto& [flow_id, link_id] : alloc.bottleneck) {
      (void)flow_id;
      double used = 0.0;
      for (const Flow& f : rc.instance.flows)
        if (std::find(f.path.begin(), f.path.end(), link_id) != f.path.end())
          used += alloc.rates.at(f.id);
      CHECK(rc.instance.topology.find_link(link_id)->capacity - used <=
            1e-7);
    }
  }
}

TEST_CASE("raising any uncontrolled rate falsifies the checker") {
  std::mt19937_64 rng(77);
  int perturbed = 0;
  for (int i = 0; i < 200; ++i) {
    RandomCase rc = random_case(rng);
    Allocation alloc = allocate(rc.instance, rc.statuses);
    for (const auto& [flow_id, link_id] : alloc.bottleneck) {
      (void)link_id;
      Allocation bumped = alloc;
      bumped.rates.at(flow_id) += 1e-6;
      CHECK(!check_maxmin(rc.instance, rc.statuses, bumped));
      ++perturbed;
    }
  }
  CHECK(perturbed > 200);
}

TEST_CASE("raises inside the residual slack leave the allocation unchanged") {
  std::mt19937_64 rng(4242);
  int exercised = 0;
  for (int i = 0; i < 300 && exercised < 60; ++i) {
    RandomCase rc = random_case(rng);
    if (rc.statuses.empty()) continue;
    Allocation alloc = allocate(rc.instance, rc.statuses);

    for (auto& [flow_id, status] : rc.statuses) {
      const Flow* flow = rc.instance.find_flow(flow_id);
      double slack = 1e18;
      for (int link_id : flow->path) {
        double used = 0.0;
        for (const Flow& f : rc.instance.flows)
          if (std::find(f.path.begin(), f.path.end(), link_id) !=
              f.path.end())
            used += alloc.rates.at(f.id);
        slack = std::min(
            slack, rc.instance.topology.find_link(link_id)->capacity - used);
      }
      if (slack < 1e-6) continue;

      StatusMap raised = rc.statuses;
      raised.at(flow_id).rate = status.rate + 0.9 * slack;
      Allocation after = allocate(rc.instance, raised);
      for (const auto& [id, rate] : alloc.rates) {
        if (id == flow_id) continue;
        if (rc.statuses.count(id)) continue;  // other pinned flows unchanged
        CHECK(std::abs(after.rates.at(id) - rate) <= 1e-7);
      }
      ++exercised;
    }
  }
  CHECK(exercised >= 60);
}

// Raising a pinned rate can *increase* a far-away uncontrolled flow: the
// squeezed neighbor releases capacity on its other links. Frozen example:
// k pinned on A squeezes u, and v picks up what u can no longer carry on B.
TEST_CASE("pinned-rate increases can redistribute toward other flows") {
  Instance instance;
  instance.topology.nodes = {"a", "b", "c"};
  instance.topology.links = {L(0, "a", "b", 10.0), L(1, "b", "c", 6.0)};
  instance.flows = {F(0, {0, 1}, 1.0),   // u
                    F(1, {0}, 2.0),      // k, pinned
                    F(2, {1}, 1.0)};     // v

  StatusMap low{{1, ControlStatus::pinned(2.0)}};
  Allocation before = allocate(instance, low);
  CHECK(std::abs(before.rates.at(0) - 3.0) <= 1e-9);
  CHECK(std::abs(before.rates.at(2) - 3.0) <= 1e-9);
  CHECK(check_maxmin(instance, low, before));

  StatusMap high{{1, ControlStatus::pinned(8.0)}};
  Allocation after = allocate(instance, high);
  CHECK(std::abs(after.rates.at(0) - 2.0) <= 1e-9);
  CHECK(std::abs(after.rates.at(2) - 4.0) <= 1e-9);  // v: 3 -> 4
  CHECK(check_maxmin(instance, high, after));
}

#ifndef MRPLAN_ANALYTIC_HPP
#define MRPLAN_ANALYTIC_HPP

#include <cstdint>

#include "mrplan/model.hpp"

namespace mrplan {

// Aggregate demand of one job: total container-milliseconds of work plus the
// single-job full-parallelism floor, together with the per-stage figures the
// wave bound needs.
struct DemandSummary {
  double total_work = 0.0;   // ms * containers
  double min_service = 0.0;  // ms
  std::int64_t n_map = 1;
  std::int64_t n_reduce = 0;
  double map_avg = 0.0;
  double reduce_avg = 0.0;  // includes typical shuffle
};

DemandSummary demand(const JobProfile& profile);

// Balanced closed-network bound on job response time for c containers:
// max(single-job wave time, H * W / c - Z). Nonincreasing in c.
double t_approx(const DemandSummary& summary, std::int64_t containers,
                std::int64_t h_users, double think_time);

struct ContainerEstimate {
  std::int64_t containers = 1;
  bool feasible = true;  // false when even the cap misses the deadline
};

// Smallest c with t_approx(c) <= deadline, by doubling plus binary search.
ContainerEstimate initial_containers(const DemandSummary& summary,
                                     std::int64_t h_users, double think_time,
                                     double deadline,
                                     std::int64_t c_max = 1'000'000);

struct PricingSplit {
  std::int64_t reserved = 0;
  std::int64_t spot = 0;
};

// Cheapest (R, s) with R + s = vms and s <= eta/(1-eta) * R. Ties between
// spot and reserved prices resolve toward reserved.
PricingSplit pricing_split(std::int64_t vms, double eta, Money sigma, Money pi);

// Spot-cap constraint s <= eta/(1-eta) * R, rearranged to dodge the division
// and with a tiny slack for the equality-at-the-cap case.
inline bool spot_cap_ok(std::int64_t spot, std::int64_t reserved, double eta) {
  return static_cast<double>(spot) * (1.0 - eta) <=
         eta * static_cast<double>(reserved) + 1e-9;
}

}  // namespace mrplan

#endif

#include "mrplan/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrplan {

DemandSummary demand(const JobProfile& profile) {
  DemandSummary s;
  s.n_map = profile.n_map;
  s.n_reduce = profile.n_reduce;
  s.map_avg = static_cast<double>(profile.map_avg);
  s.reduce_avg =
      static_cast<double>(profile.reduce_avg + profile.shuffle_typ_avg);
  s.total_work = static_cast<double>(profile.n_map) * s.map_avg +
                 static_cast<double>(profile.n_reduce) * s.reduce_avg;
  s.min_service = profile.n_reduce >= 1 ? s.map_avg + s.reduce_avg : s.map_avg;
  return s;
}

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

// Single-job completion time with c containers: full waves of each stage.
double wave_time(const DemandSummary& s, std::int64_t c) {
  double t = static_cast<double>(ceil_div(s.n_map, c)) * s.map_avg;
  if (s.n_reduce > 0)
    t += static_cast<double>(ceil_div(s.n_reduce, c)) * s.reduce_avg;
  return t;
}

}  // namespace

double t_approx(const DemandSummary& summary, std::int64_t containers,
                std::int64_t h_users, double think_time) {
  if (containers < 1) throw std::invalid_argument("containers must be >= 1");
  double bottleneck = static_cast<double>(h_users) * summary.total_work /
                          static_cast<double>(containers) -
                      think_time;
  return std::max(wave_time(summary, containers), bottleneck);
}

ContainerEstimate initial_containers(const DemandSummary& summary,
                                     std::int64_t h_users, double think_time,
                                     double deadline, std::int64_t c_max) {
  if (deadline <= 0.0) throw std::invalid_argument("deadline must be > 0");
  auto fits = [&](std::int64_t c) {
    return t_approx(summary, c, h_users, think_time) <= deadline;
  };
  if (fits(1)) return {1, true};
  if (!fits(c_max)) return {c_max, false};

  // double until feasible, then binary search the boundary
  std::int64_t lo = 1, hi = 2;
  while (hi < c_max && !fits(hi)) {
    lo = hi;
    hi = std::min(hi * 2, c_max);
  }
  while (lo + 1 < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (fits(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {hi, true};
}

PricingSplit pricing_split(std::int64_t vms, double eta, Money sigma, Money pi) {
  if (vms < 0) throw std::invalid_argument("vms must be >= 0");
  if (eta < 0.0 || eta >= 1.0)
    throw std::domain_error("eta must lie in [0,1)");
  if (sigma < pi) {
    auto s = static_cast<std::int64_t>(
        std::floor(eta * static_cast<double>(vms) + 1e-9));
    return {vms - s, s};
  }
  return {vms, 0};
}

}  // namespace mrplan

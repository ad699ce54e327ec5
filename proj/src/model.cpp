#include "mrplan/model.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mrplan {

std::string Money::str() const {
  char buf[32];
  std::int64_t whole = raw_ / kScale;
  std::int64_t frac = raw_ % kScale;
  if (raw_ < 0 && frac != 0) {
    frac = -frac;
    if (whole == 0) {
      std::snprintf(buf, sizeof(buf), "-0.%04lld", static_cast<long long>(frac));
      std::string s(buf);
      while (s.back() == '0') s.pop_back();
      return s;
    }
  }
  if (frac == 0) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(whole));
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%lld.%04lld", static_cast<long long>(whole),
                static_cast<long long>(frac < 0 ? -frac : frac));
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  return s;
}

const VmType* Problem::find_vm(const std::string& id) const {
  for (const auto& v : catalog)
    if (v.id == id) return &v;
  return nullptr;
}

const ApplicationClass* Problem::find_class(const std::string& id) const {
  for (const auto& c : classes)
    if (c.id == id) return &c;
  return nullptr;
}

Money cost(Solution& solution, const Problem& problem) {
  Money total;
  for (const auto& cs : solution.per_class) {
    const VmType* vm = problem.find_vm(cs.vm_type);
    if (!vm) {
      throw std::invalid_argument("class '" + cs.class_id +
                                  "' references unknown VM type '" +
                                  cs.vm_type + "'");
    }
    total += vm->sigma * cs.spot + vm->pi * cs.reserved;
  }
  solution.hourly_cost = total;
  return total;
}

double accuracy(double simulated_tau, double measured_t) {
  if (measured_t <= 0.0)
    throw std::domain_error("measured response time must be positive");
  return (simulated_tau - measured_t) / measured_t;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Error;
  });
}

namespace {

void check_profile(const JobProfile& p, const std::string& path,
                   std::vector<Diagnostic>& out) {
  auto err = [&](const std::string& field, const std::string& msg) {
    out.push_back({Severity::Error, path + "." + field, msg});
  };
  auto warn = [&](const std::string& field, const std::string& msg) {
    out.push_back({Severity::Warning, path + "." + field, msg});
  };

  if (p.n_map < 1) err("n_map", "n_map must be >= 1");
  if (p.n_reduce < 0) err("n_reduce", "n_reduce must be >= 0");
  struct Dur {
    const char* name;
    Millis v;
  } durs[] = {{"map_avg_ms", p.map_avg},
              {"reduce_avg_ms", p.reduce_avg},
              {"shuffle_typ_avg_ms", p.shuffle_typ_avg},
              {"map_max_ms", p.map_max},
              {"reduce_max_ms", p.reduce_max},
              {"shuffle_first_max_ms", p.shuffle_first_max},
              {"shuffle_typ_max_ms", p.shuffle_typ_max}};
  for (const auto& d : durs)
    if (d.v < 0) err(d.name, "durations must be >= 0");
  if (p.map_max < p.map_avg) err("map_max_ms", "max below average");
  if (p.reduce_max < p.reduce_avg) err("reduce_max_ms", "max below average");
  if (p.shuffle_typ_max < p.shuffle_typ_avg)
    err("shuffle_typ_max_ms", "max below average");

  auto check_samples = [&](const std::optional<std::vector<Millis>>& samples,
                           Millis declared_avg, const char* field) {
    if (!samples) return;
    if (samples->empty()) {
      err(field, "sample list must be non-empty when present");
      return;
    }
    double mean = std::accumulate(samples->begin(), samples->end(), 0.0) /
                  static_cast<double>(samples->size());
    if (declared_avg > 0 &&
        std::abs(mean - static_cast<double>(declared_avg)) >
            0.10 * static_cast<double>(declared_avg)) {
      warn(field, "sample mean deviates more than 10% from declared average");
    }
  };
  check_samples(p.map_samples, p.map_avg, "map_samples_ms");
  check_samples(p.reduce_samples, p.reduce_avg, "reduce_samples_ms");
}

}  // namespace

std::vector<Diagnostic> validate(const Problem& problem) {
  std::vector<Diagnostic> out;

  std::set<std::string> vm_ids;
  for (std::size_t j = 0; j < problem.catalog.size(); ++j) {
    const VmType& v = problem.catalog[j];
    std::string path = "catalog[" + std::to_string(j) + "]";
    if (v.id.empty())
      out.push_back({Severity::Error, path + ".id", "empty VM type id"});
    if (!vm_ids.insert(v.id).second)
      out.push_back(
          {Severity::Error, path + ".id", "duplicate VM type id '" + v.id + "'"});
    if (v.containers < 1)
      out.push_back(
          {Severity::Error, path + ".containers", "containers must be >= 1"});
    if (v.sigma < Money{})
      out.push_back({Severity::Error, path + ".sigma_per_hour",
                     "spot price must be >= 0"});
    if (v.pi < Money{})
      out.push_back({Severity::Error, path + ".pi_per_hour",
                     "reserved price must be >= 0"});
  }

  if (problem.classes.empty())
    out.push_back({Severity::Error, "classes", "at least one class required"});

  std::set<std::string> class_ids;
  for (std::size_t k = 0; k < problem.classes.size(); ++k) {
    const ApplicationClass& c = problem.classes[k];
    std::string path = "classes[" + std::to_string(k) + "]";
    if (c.id.empty())
      out.push_back({Severity::Error, path + ".id", "empty class id"});
    if (!class_ids.insert(c.id).second)
      out.push_back(
          {Severity::Error, path + ".id", "duplicate class id '" + c.id + "'"});
    if (c.h_users < 1)
      out.push_back({Severity::Error, path + ".h_users", "h_users must be >= 1"});
    if (c.think_time < 0)
      out.push_back(
          {Severity::Error, path + ".think_time_ms", "think time must be >= 0"});
    if (c.deadline <= 0)
      out.push_back(
          {Severity::Error, path + ".deadline_ms", "deadline must be > 0"});
    if (c.spot_fraction_cap < 0.0 || c.spot_fraction_cap >= 1.0)
      out.push_back({Severity::Error, path + ".eta",
                     "eta must lie in [0,1); eta = 1 makes the spot bound "
                     "unbounded"});
    if (c.profiles.empty())
      out.push_back({Severity::Error, path + ".profiles",
                     "at least one candidate profile required"});
    for (const auto& [vm_id, profile] : c.profiles) {
      std::string ppath = path + ".profiles." + vm_id;
      if (!vm_ids.count(vm_id))
        out.push_back({Severity::Error, ppath,
                       "references VM type '" + vm_id + "' not in catalog"});
      check_profile(profile, ppath, out);
    }
  }
  return out;
}

}  // namespace mrplan

#ifndef MRPLAN_MODEL_HPP
#define MRPLAN_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrplan/money.hpp"

namespace mrplan {

using Millis = std::int64_t;

// A purchasable machine shape. `containers` is the number of task slots a
// single VM contributes to its class's capacity pool.
struct VmType {
  std::string id;
  std::int64_t containers = 1;
  Money sigma;  // spot hourly price
  Money pi;     // effective reserved hourly price
};

// Per (class, VM type) statistical characterization of a MapReduce job.
// Durations in ms. Sample lists, when present, drive empirical replay.
struct JobProfile {
  std::int64_t n_map = 1;
  std::int64_t n_reduce = 0;
  Millis map_avg = 0;
  Millis reduce_avg = 0;
  Millis shuffle_typ_avg = 0;
  Millis map_max = 0;
  Millis reduce_max = 0;
  Millis shuffle_first_max = 0;  // carried for schema completeness, unused
  Millis shuffle_typ_max = 0;
  std::optional<std::vector<Millis>> map_samples;
  std::optional<std::vector<Millis>> reduce_samples;
};

struct ApplicationClass {
  std::string id;
  std::int64_t h_users = 1;
  Millis think_time = 0;  // mean of exponential
  Millis deadline = 0;
  double spot_fraction_cap = 0.0;  // eta, in [0,1)
  std::map<std::string, JobProfile> profiles;  // keyed by VmType id
};

struct Problem {
  std::vector<VmType> catalog;
  std::vector<ApplicationClass> classes;
  std::string currency = "EUR";  // opaque free-text unit

  const VmType* find_vm(const std::string& id) const;
  const ApplicationClass* find_class(const std::string& id) const;
};

struct ClassSolution {
  std::string class_id;
  std::string vm_type;
  std::int64_t vms = 0;
  std::int64_t reserved = 0;
  std::int64_t spot = 0;
  double predicted_time = 0.0;  // ms
  double ci_half_width = 0.0;   // ms
  bool feasible = false;
};

struct Solution {
  std::vector<ClassSolution> per_class;
  Money hourly_cost;
  bool partial = false;  // true when some class failed to reach feasibility
  std::uint64_t seed = 0;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity;
  std::string path;  // JSON-style path to the offending field
  std::string message;
};

// Hourly renting cost of a solution: sum over classes of
// sigma * spot + pi * reserved. Also stored back into the solution.
// Unknown VM type ids throw std::invalid_argument naming the class.
Money cost(Solution& solution, const Problem& problem);

// Relative prediction error (simulated - measured) / measured.
// Negative values signal a non-conservative prediction.
// measured_t <= 0 throws std::domain_error.
double accuracy(double simulated_tau, double measured_t);

// Checks every type invariant; empty result means the problem is well formed.
// Errors make the problem unusable, warnings do not.
std::vector<Diagnostic> validate(const Problem& problem);

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace mrplan

#endif

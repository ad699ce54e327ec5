#ifndef MRPLAN_SWEEP_HPP
#define MRPLAN_SWEEP_HPP

#include <string>
#include <vector>

#include "mrplan/json_io.hpp"
#include "mrplan/model.hpp"
#include "mrplan/optimizer.hpp"

namespace mrplan {

enum class SweepAxis { Deadline, HUsers };

// One-parameter scenario study: re-optimize the whole problem for every
// value of the chosen axis on the chosen class.
struct SweepSpec {
  Problem base_problem;
  SweepAxis axis = SweepAxis::Deadline;
  std::string class_id;
  std::vector<std::int64_t> values;  // strictly monotone
};

struct SweepRow {
  std::int64_t axis_value;
  ClassSolution swept_class;
  Money hourly_cost;
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                const OptimizerConfig& config);

// Header is part of the external contract:
// axis_value,vm_type,vms,reserved,spot,hourly_cost,predicted_time_ms,feasible
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct ValidationRow {
  std::string label;
  double measured_t = 0.0;    // ms
  double simulated_tau = 0.0; // ms
  double theta = 0.0;         // relative error, Eq.-style (tau - T) / T
  bool simulation_failed = false;
};

struct ValidationInput {
  std::string label;
  double measured_t = 0.0;
  NetworkSpec network;
  SimParams params;
};

std::vector<ValidationRow> run_validate(const std::vector<ValidationInput>& rows);

// label,measured_t_ms,simulated_tau_ms,theta_percent
std::string validation_csv(const std::vector<ValidationRow>& rows);

double mean_abs_theta(const std::vector<ValidationRow>& rows);

}  // namespace mrplan

#endif

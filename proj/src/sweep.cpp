#include "mrplan/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mrplan {

namespace {

std::string fmt_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

void check_spec(const SweepSpec& spec) {
  if (spec.values.empty())
    throw std::invalid_argument("sweep values must be non-empty");
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    inc = inc && spec.values[i] > spec.values[i - 1];
    dec = dec && spec.values[i] < spec.values[i - 1];
  }
  if (!inc && !dec)
    throw std::invalid_argument("sweep values must be strictly monotone");
  if (!spec.base_problem.find_class(spec.class_id))
    throw std::invalid_argument("sweep class '" + spec.class_id +
                                "' not found in problem");
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                const OptimizerConfig& config) {
  check_spec(spec);
  std::vector<SweepRow> rows;
  rows.reserve(spec.values.size());

  for (std::int64_t value : spec.values) {
    Problem p = spec.base_problem;
    for (auto& cls : p.classes) {
      if (cls.id != spec.class_id) continue;
      if (spec.axis == SweepAxis::Deadline)
        cls.deadline = value;
      else
        cls.h_users = value;
    }
    Solution sol = optimize(p, config);
    SweepRow row;
    row.axis_value = value;
    row.hourly_cost = sol.hourly_cost;
    for (const auto& cs : sol.per_class)
      if (cs.class_id == spec.class_id) row.swept_class = cs;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "axis_value,vm_type,vms,reserved,spot,hourly_cost,predicted_time_ms,"
      "feasible\n";
  for (const auto& r : rows) {
    const ClassSolution& cs = r.swept_class;
    out += std::to_string(r.axis_value) + "," + cs.vm_type + "," +
           std::to_string(cs.vms) + "," + std::to_string(cs.reserved) + "," +
           std::to_string(cs.spot) + "," + r.hourly_cost.str() + "," +
           fmt_ms(cs.predicted_time) + "," + (cs.feasible ? "true" : "false") +
           "\n";
  }
  return out;
}

std::vector<ValidationRow> run_validate(const std::vector<ValidationInput>& rows) {
  std::vector<ValidationRow> out;
  out.reserve(rows.size());
  for (const auto& in : rows) {
    ValidationRow row;
    row.label = in.label;
    row.measured_t = in.measured_t;
    if (in.measured_t <= 0.0)
      throw std::domain_error("row '" + in.label +
                              "': measured time must be positive");
    try {
      SimEstimate est = estimate_response_time(in.network, in.params);
      row.simulated_tau = est.mean_response;
      row.theta = accuracy(row.simulated_tau, row.measured_t);
    } catch (const SimulationAborted&) {
      row.simulation_failed = true;  // recorded, run continues
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
  std::string out = "label,measured_t_ms,simulated_tau_ms,theta_percent\n";
  for (const auto& r : rows) {
    if (r.simulation_failed) {
      out += r.label + "," + fmt_ms(r.measured_t) + ",failed,failed\n";
      continue;
    }
    out += r.label + "," + fmt_ms(r.measured_t) + "," + fmt_ms(r.simulated_tau) +
           "," + fmt_ms(r.theta * 100.0) + "\n";
  }
  return out;
}

double mean_abs_theta(const std::vector<ValidationRow>& rows) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& r : rows) {
    if (r.simulation_failed) continue;
    sum += std::abs(r.theta);
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace mrplan

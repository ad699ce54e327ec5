#ifndef MRPLAN_OPTIMIZER_HPP
#define MRPLAN_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "mrplan/analytic.hpp"
#include "mrplan/model.hpp"
#include "mrplan/simulator.hpp"

namespace mrplan {

struct EvaluationRecord {
  std::string class_id;
  std::string vm_type;
  std::int64_t vms = 0;
  std::int64_t containers = 0;
  SimEstimate estimate;
  bool feasible = false;
  bool search_converged = true;  // false when max_hc_steps ran out
};

enum class EvaluatorKind { Simulation, Analytic };

struct OptimizerConfig {
  SimParams sim_params;
  std::int64_t max_hc_steps = 500;
  bool cache_enabled = true;
  EvaluatorKind evaluator = EvaluatorKind::Simulation;
  ServicePolicy service_policy = ServicePolicy::Exponential;
  // feasible iff mean + half_width <= deadline; set false for mean-only
  bool conservative_margin = true;
  std::uint64_t master_seed = 42;
  bool parallel = true;
};

// (class_id, vm_type, vms, feasible, hourly class cost) per hill-climb step.
using ProgressFn = std::function<void(const std::string&, const std::string&,
                                      std::int64_t, bool, Money)>;

// Response-time evaluator shared by one optimize() run. Memoizes per
// (class, type, vms, seed); thread safe.
class Evaluator {
 public:
  Evaluator(const Problem& problem, const OptimizerConfig& config);

  EvaluationRecord evaluate(const ApplicationClass& cls, const VmType& vm,
                            std::int64_t vms);

  // Seed used for every size of this (class, type) pair: common random
  // numbers across the hill climb.
  std::uint64_t pair_seed(const std::string& class_id,
                          const std::string& vm_id) const;

  std::uint64_t cache_hits() const { return hits_; }
  std::uint64_t simulations_run() const { return runs_; }

 private:
  const Problem& problem_;
  OptimizerConfig config_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, SimEstimate> cache_;
  std::uint64_t hits_ = 0;
  std::uint64_t runs_ = 0;
};

// Algorithm: climb to feasibility one VM at a time, or descend from a
// feasible start until infeasible and step back. Noise guard: on the first
// infeasible size below a feasible one, up to 3 further sizes are probed and
// the smallest feasible one is kept.
EvaluationRecord hill_climb(const ApplicationClass& cls, const VmType& vm,
                            std::int64_t start_vms, const OptimizerConfig& config,
                            Evaluator& evaluator,
                            const ProgressFn& progress = nullptr);

// Runs hill_climb from the analytic start for every candidate type and keeps
// the cheapest feasible one (ties: cost, then fewer VMs, then id).
ClassSolution select_vm_type(const ApplicationClass& cls, const Problem& problem,
                             const OptimizerConfig& config, Evaluator& evaluator,
                             const ProgressFn& progress = nullptr);

// Per-class optimization, independently and in parallel across classes.
Solution optimize(const Problem& problem, const OptimizerConfig& config,
                  const ProgressFn& progress = nullptr);

}  // namespace mrplan

#endif

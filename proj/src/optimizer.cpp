#include "mrplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mrplan {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

const JobProfile& profile_for(const ApplicationClass& cls, const VmType& vm) {
  auto it = cls.profiles.find(vm.id);
  if (it == cls.profiles.end())
    throw std::invalid_argument("class '" + cls.id + "' has no profile for VM type '" +
                                vm.id + "'");
  return it->second;
}

bool is_feasible(const SimEstimate& est, const ApplicationClass& cls,
                 bool conservative) {
  double margin = conservative ? est.half_width : 0.0;
  return est.mean_response + margin <= static_cast<double>(cls.deadline);
}

Money class_cost(const VmType& vm, const PricingSplit& split) {
  return vm.sigma * split.spot + vm.pi * split.reserved;
}

}  // namespace

Evaluator::Evaluator(const Problem& problem, const OptimizerConfig& config)
    : problem_(problem), config_(config) {}

std::uint64_t Evaluator::pair_seed(const std::string& class_id,
                                   const std::string& vm_id) const {
  return config_.master_seed ^ fnv1a(class_id + "\x1f" + vm_id);
}

EvaluationRecord Evaluator::evaluate(const ApplicationClass& cls,
                                     const VmType& vm, std::int64_t vms) {
  if (vms < 1) throw std::invalid_argument("vms must be >= 1");
  const JobProfile& profile = profile_for(cls, vm);
  std::int64_t containers = vms * vm.containers;

  EvaluationRecord rec;
  rec.class_id = cls.id;
  rec.vm_type = vm.id;
  rec.vms = vms;
  rec.containers = containers;

  if (config_.evaluator == EvaluatorKind::Analytic) {
    DemandSummary s = demand(profile);
    rec.estimate.mean_response =
        t_approx(s, containers, cls.h_users, static_cast<double>(cls.think_time));
    rec.estimate.half_width = 0.0;
    rec.estimate.converged = true;
  } else {
    std::uint64_t seed = pair_seed(cls.id, vm.id);
    std::string key = cls.id + "\x1f" + vm.id + "\x1f" + std::to_string(vms) +
                      "\x1f" + std::to_string(seed);
    if (config_.cache_enabled) {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++hits_;
        rec.estimate = it->second;
        rec.feasible = is_feasible(rec.estimate, cls, config_.conservative_margin);
        return rec;
      }
    }
    NetworkSpec spec = build_network(profile, containers, cls.h_users,
                                     cls.think_time, config_.service_policy);
    SimParams params = config_.sim_params;
    params.seed = seed;
    rec.estimate = estimate_response_time(spec, params);
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++runs_;
      if (config_.cache_enabled) cache_.emplace(key, rec.estimate);
    }
  }
  rec.feasible = is_feasible(rec.estimate, cls, config_.conservative_margin);
  return rec;
}

EvaluationRecord hill_climb(const ApplicationClass& cls, const VmType& vm,
                            std::int64_t start_vms, const OptimizerConfig& config,
                            Evaluator& evaluator, const ProgressFn& progress) {
  if (start_vms < 1) throw std::invalid_argument("start_vms must be >= 1");

  auto report = [&](const EvaluationRecord& rec) {
    if (progress) {
      PricingSplit split =
          pricing_split(rec.vms, cls.spot_fraction_cap, vm.sigma, vm.pi);
      progress(cls.id, vm.id, rec.vms, rec.feasible, class_cost(vm, split));
    }
  };

  std::int64_t steps = 0;
  EvaluationRecord rec = evaluator.evaluate(cls, vm, start_vms);
  report(rec);

  if (!rec.feasible) {
    // pursuit of feasibility: grow one VM at a time
    while (!rec.feasible && steps < config.max_hc_steps) {
      ++steps;
      rec = evaluator.evaluate(cls, vm, rec.vms + 1);
      report(rec);
    }
    if (!rec.feasible) rec.search_converged = false;
    return rec;
  }

  // cost optimization: shrink while feasible, keep the smallest feasible size
  EvaluationRecord best = rec;
  while (best.vms > 1) {
    if (steps >= config.max_hc_steps) {
      best.search_converged = false;
      break;
    }
    ++steps;
    EvaluationRecord cand = evaluator.evaluate(cls, vm, best.vms - 1);
    report(cand);
    if (cand.feasible) {
      best = cand;
      continue;
    }
    // noise guard: probe a few sizes past the first infeasible one
    bool recovered = false;
    for (std::int64_t probe = cand.vms - 1;
         probe >= 1 && probe >= cand.vms - 3 && steps < config.max_hc_steps;
         --probe) {
      ++steps;
      EvaluationRecord pc = evaluator.evaluate(cls, vm, probe);
      report(pc);
      if (pc.feasible) {
        best = pc;
        recovered = true;
        break;
      }
    }
    if (!recovered) break;
  }
  return best;
}

ClassSolution select_vm_type(const ApplicationClass& cls, const Problem& problem,
                             const OptimizerConfig& config, Evaluator& evaluator,
                             const ProgressFn& progress) {
  if (cls.profiles.empty())
    throw std::invalid_argument("class '" + cls.id + "' has no candidate profiles");

  struct Candidate {
    EvaluationRecord rec;
    PricingSplit split;
    Money cost;
  };
  std::vector<Candidate> candidates;

  for (const auto& [vm_id, profile] : cls.profiles) {
    const VmType* vm = problem.find_vm(vm_id);
    if (!vm)
      throw std::invalid_argument("class '" + cls.id +
                                  "' references unknown VM type '" + vm_id + "'");
    DemandSummary summary = demand(profile);
    ContainerEstimate ce =
        initial_containers(summary, cls.h_users,
                           static_cast<double>(cls.think_time),
                           static_cast<double>(cls.deadline));
    std::int64_t start =
        ce.feasible ? std::max<std::int64_t>(1, ceil_div(ce.containers, vm->containers))
                    : 1;
    EvaluationRecord rec = hill_climb(cls, *vm, start, config, evaluator, progress);
    PricingSplit split =
        pricing_split(rec.vms, cls.spot_fraction_cap, vm->sigma, vm->pi);
    candidates.push_back({std::move(rec), split, class_cost(*vm, split)});
  }

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.rec.vms != b.rec.vms) return a.rec.vms < b.rec.vms;
    return a.rec.vm_type < b.rec.vm_type;
  };

  const Candidate* chosen = nullptr;
  for (const auto& c : candidates)
    if (c.rec.feasible && (!chosen || better(c, *chosen))) chosen = &c;

  if (!chosen) {
    // class-level infeasibility: report the attempt closest to the deadline
    for (const auto& c : candidates)
      if (!chosen ||
          c.rec.estimate.mean_response < chosen->rec.estimate.mean_response)
        chosen = &c;
  }

  ClassSolution cs;
  cs.class_id = cls.id;
  cs.vm_type = chosen->rec.vm_type;
  cs.vms = chosen->rec.vms;
  cs.reserved = chosen->split.reserved;
  cs.spot = chosen->split.spot;
  cs.predicted_time = chosen->rec.estimate.mean_response;
  cs.ci_half_width = chosen->rec.estimate.half_width;
  cs.feasible = chosen->rec.feasible;
  return cs;
}

Solution optimize(const Problem& problem, const OptimizerConfig& config,
                  const ProgressFn& progress) {
  auto diags = validate(problem);
  if (has_errors(diags)) {
    std::string msg = "invalid problem:";
    for (const auto& d : diags)
      if (d.severity == Severity::Error) msg += " [" + d.path + "] " + d.message + ";";
    throw std::invalid_argument(msg);
  }

  Evaluator evaluator(problem, config);
  Solution solution;
  solution.seed = config.master_seed;
  solution.per_class.resize(problem.classes.size());

  if (config.parallel && problem.classes.size() > 1) {
    std::vector<std::future<ClassSolution>> futures;
    futures.reserve(problem.classes.size());
    for (const auto& cls : problem.classes) {
      futures.push_back(std::async(std::launch::async, [&, cp = &cls]() {
        return select_vm_type(*cp, problem, config, evaluator, progress);
      }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i)
      solution.per_class[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < problem.classes.size(); ++i)
      solution.per_class[i] =
          select_vm_type(problem.classes[i], problem, config, evaluator, progress);
  }

  solution.partial = std::any_of(
      solution.per_class.begin(), solution.per_class.end(),
      [](const ClassSolution& cs) { return !cs.feasible; });
  cost(solution, problem);
  return solution;
}

}  // namespace mrplan

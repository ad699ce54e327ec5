// Command-line front end: optimize, simulate, sweep, validate.
// Exit codes: 0 success, 1 infeasible/partial, 2 input error, 3 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mrplan/json_io.hpp"
#include "mrplan/optimizer.hpp"
#include "mrplan/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

void print_diagnostics(const std::vector<mrplan::Diagnostic>& diags) {
  for (const auto& d : diags) {
    std::cerr << (d.severity == mrplan::Severity::Error ? "error" : "warning")
              << ": " << d.path << ": " << d.message << "\n";
  }
}

mrplan::Problem load_problem(const std::string& path, bool strict) {
  auto parsed = mrplan::parse_problem(read_file(path), strict);
  print_diagnostics(parsed.diagnostics);
  if (mrplan::has_errors(parsed.diagnostics))
    throw std::invalid_argument("problem file failed validation");
  return std::move(parsed.problem);
}

struct CommonOpts {
  std::uint64_t seed = 42;
  double ci_target = 0.05;
  std::string evaluator = "simulation";
  bool verbose = false;
};

mrplan::OptimizerConfig make_config(const CommonOpts& opts) {
  mrplan::OptimizerConfig config;
  config.master_seed = opts.seed;
  config.sim_params.target_rel_half_width = opts.ci_target;
  config.evaluator = opts.evaluator == "analytic"
                         ? mrplan::EvaluatorKind::Analytic
                         : mrplan::EvaluatorKind::Simulation;
  return config;
}

mrplan::ProgressFn make_progress(const CommonOpts& opts) {
  if (!opts.verbose) return nullptr;
  return [](const std::string& cls, const std::string& vm, std::int64_t vms,
            bool feasible, mrplan::Money cost) {
    std::cerr << "hc " << cls << "/" << vm << " vms=" << vms
              << (feasible ? " feasible" : " infeasible") << " cost="
              << cost.str() << "/h\n";
  };
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "master random seed");
  cmd->add_option("--ci-target", opts.ci_target,
                  "target relative confidence-interval half width");
  cmd->add_option("--evaluator", opts.evaluator,
                  "response-time evaluator: simulation|analytic")
      ->check(CLI::IsMember({"simulation", "analytic"}));
  cmd->add_flag("--verbose", opts.verbose, "log each hill-climb step");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-minimal cloud cluster sizing for MapReduce workloads"};
  app.require_subcommand(1);

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "solve a provisioning problem");
  std::string opt_input, opt_output;
  bool opt_strict = false;
  CommonOpts opt_opts;
  opt_cmd->add_option("--input", opt_input, "problem JSON file")->required();
  opt_cmd->add_option("--output", opt_output, "solution JSON file")->required();
  opt_cmd->add_flag("--strict", opt_strict, "reject unknown JSON fields");
  add_common(opt_cmd, opt_opts);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "simulate one network");
  std::string sim_input, sim_trace;
  sim_cmd->add_option("--input", sim_input, "network JSON file")->required();
  sim_cmd->add_option("--trace", sim_trace, "write a TSV event trace here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "one-parameter scenario study");
  std::string sw_input, sw_output, sw_axis, sw_class, sw_values;
  bool sw_strict = false;
  CommonOpts sw_opts;
  sweep_cmd->add_option("--input", sw_input, "problem JSON file")->required();
  sweep_cmd->add_option("--axis", sw_axis, "deadline|h_users")
      ->required()
      ->check(CLI::IsMember({"deadline", "h_users"}));
  sweep_cmd->add_option("--class", sw_class, "class id to sweep")->required();
  sweep_cmd->add_option("--values", sw_values, "comma-separated axis values")
      ->required();
  sweep_cmd->add_option("--output", sw_output, "CSV output file")->required();
  sweep_cmd->add_flag("--strict", sw_strict, "reject unknown JSON fields");
  add_common(sweep_cmd, sw_opts);

  // validate
  auto* val_cmd = app.add_subcommand("validate", "compare measurements against "
                                                 "simulated response times");
  std::string val_input, val_output;
  val_cmd->add_option("--input", val_input, "rows JSON file")->required();
  val_cmd->add_option("--output", val_output, "CSV output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*opt_cmd) {
      mrplan::Problem problem = load_problem(opt_input, opt_strict);
      mrplan::OptimizerConfig config = make_config(opt_opts);
      mrplan::Solution solution =
          mrplan::optimize(problem, config, make_progress(opt_opts));
      write_file(opt_output,
                 mrplan::emit_solution(solution, problem.currency).dump(2) + "\n");
      if (solution.partial) {
        std::cerr << "solution is partial: some classes missed their deadline\n";
        return kExitInfeasible;
      }
      return kExitOk;
    }

    if (*sim_cmd) {
      auto [spec, params] = mrplan::parse_network_text(read_file(sim_input));
      if (!sim_trace.empty()) {
        std::ofstream trace(sim_trace);
        if (!trace)
          throw std::runtime_error("cannot open trace file: " + sim_trace);
        // trace covers exactly the completions the estimator consumes
        mrplan::Simulation sim(spec, params.seed, &trace);
        sim.run(params.warmup_jobs + params.batch_size * params.max_batches,
                params.max_events);
      }
      mrplan::SimEstimate est = mrplan::estimate_response_time(spec, params);
      std::cout << mrplan::emit_estimate(est, params.seed).dump(2) << "\n";
      return kExitOk;
    }

    if (*sweep_cmd) {
      mrplan::SweepSpec spec;
      spec.base_problem = load_problem(sw_input, sw_strict);
      spec.axis = sw_axis == "deadline" ? mrplan::SweepAxis::Deadline
                                        : mrplan::SweepAxis::HUsers;
      spec.class_id = sw_class;
      std::stringstream ss(sw_values);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) spec.values.push_back(std::stoll(tok));
      auto rows = mrplan::run_sweep(spec, make_config(sw_opts));
      write_file(sw_output, mrplan::sweep_csv(rows));
      bool any_infeasible = false;
      for (const auto& r : rows) any_infeasible |= !r.swept_class.feasible;
      return any_infeasible ? kExitInfeasible : kExitOk;
    }

    if (*val_cmd) {
      mrplan::json j = mrplan::json::parse(read_file(val_input));
      std::vector<mrplan::ValidationInput> inputs;
      for (const auto& row : j.at("rows")) {
        mrplan::ValidationInput in;
        in.label = row.at("label").get<std::string>();
        in.measured_t = row.at("measured_t_ms").get<double>();
        std::tie(in.network, in.params) =
            mrplan::parse_network(row.at("network"));
        inputs.push_back(std::move(in));
      }
      auto rows = mrplan::run_validate(inputs);
      write_file(val_output, mrplan::validation_csv(rows));
      std::cout << "mean |theta| = " << mrplan::mean_abs_theta(rows) * 100.0
                << "%\n";
      return kExitOk;
    }
  } catch (const mrplan::JsonSyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

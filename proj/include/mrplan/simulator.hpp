#ifndef MRPLAN_SIMULATOR_HPP
#define MRPLAN_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrplan/distribution.hpp"
#include "mrplan/model.hpp"

namespace mrplan {

// Fully instantiated closed queueing network for one class on one VM type:
// delay station (think), fork into map tasks, finite capacity region with
// priority admission, external map join, external reduce fork, reduce join.
struct NetworkSpec {
  std::int64_t h_users = 1;
  double think_time = 0.0;  // ms, mean of exponential
  std::int64_t n_map = 1;
  std::int64_t n_reduce = 0;
  ServiceDistribution map_service;
  ServiceDistribution reduce_service;  // ignored when n_reduce == 0
  std::int64_t capacity = 1;           // containers: FCR + multi-server limit
  bool deterministic_think = false;    // test configurations only
};

struct SimParams {
  std::uint64_t seed = 42;
  std::int64_t warmup_jobs = 50;
  std::int64_t batch_size = 50;
  std::int64_t max_batches = 200;
  double confidence = 0.95;
  double target_rel_half_width = 0.05;
  std::uint64_t max_events = 500'000'000ull;  // hard cap, aborts the run
};

struct SimEstimate {
  double mean_response = 0.0;  // ms
  double half_width = 0.0;     // ms
  std::int64_t completions = 0;
  bool converged = false;
};

struct SimulationAborted : std::runtime_error {
  SimulationAborted(std::string msg, std::vector<double> partial)
      : std::runtime_error(std::move(msg)), partial_responses(std::move(partial)) {}
  std::vector<double> partial_responses;
};

enum class ServicePolicy { Exponential, Empirical, Deterministic };

// Instantiates the network for a profile. Shuffle work is folded into the
// reduce service: means added, or each reduce sample shifted by the typical
// shuffle average for empirical replay.
NetworkSpec build_network(const JobProfile& profile, std::int64_t capacity,
                          std::int64_t h_users, Millis think_time,
                          ServicePolicy policy);

// Test/instrumentation hook, called after every state change.
struct SimObservation {
  double time;
  std::int64_t busy;
  std::int64_t map_waiting;
  std::int64_t reduce_waiting;
  std::int64_t thinking;
  std::int64_t jobs_in_flight;
};
using SimObserver = std::function<void(const SimObservation&)>;

class Simulation {
 public:
  Simulation(const NetworkSpec& spec, std::uint64_t seed,
             std::ostream* trace = nullptr, SimObserver observer = nullptr);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Runs until `count` more jobs complete; returns their response times in
  // completion order. Throws SimulationAborted past the event cap.
  std::vector<double> run(std::int64_t count, std::uint64_t max_events);

  std::uint64_t events_processed() const;

 private:
  struct Impl;
  Impl* impl_;
};

// One independent replication: the first `completions` job response times.
std::vector<double> run_replication(const NetworkSpec& spec,
                                    const SimParams& params,
                                    std::int64_t completions,
                                    std::ostream* trace = nullptr);

// Batch-means estimate of the mean job response time. Deterministic for a
// fixed (spec, params.seed).
SimEstimate estimate_response_time(const NetworkSpec& spec,
                                   const SimParams& params);

}  // namespace mrplan

#endif

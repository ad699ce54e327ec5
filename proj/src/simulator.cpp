#include "mrplan/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <unordered_map>

namespace mrplan {

namespace {

ServiceDistribution make_service(ServicePolicy policy, double mean,
                                 const std::optional<std::vector<Millis>>& samples,
                                 double sample_shift, const char* stage) {
  switch (policy) {
    case ServicePolicy::Deterministic:
      return ServiceDistribution::deterministic(mean);
    case ServicePolicy::Exponential:
      return ServiceDistribution::exponential(mean);
    case ServicePolicy::Empirical: {
      if (!samples || samples->empty())
        throw std::invalid_argument(std::string("empirical service requested for ") +
                                    stage + " stage but no samples in profile");
      std::vector<double> s;
      s.reserve(samples->size());
      for (Millis v : *samples) s.push_back(static_cast<double>(v) + sample_shift);
      return ServiceDistribution::empirical(std::move(s));
    }
  }
  return {};
}

}  // namespace

NetworkSpec build_network(const JobProfile& profile, std::int64_t capacity,
                          std::int64_t h_users, Millis think_time,
                          ServicePolicy policy) {
  if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  NetworkSpec spec;
  spec.h_users = h_users;
  spec.think_time = static_cast<double>(think_time);
  spec.n_map = profile.n_map;
  spec.n_reduce = profile.n_reduce;
  spec.capacity = capacity;
  spec.map_service = make_service(policy, static_cast<double>(profile.map_avg),
                                  profile.map_samples, 0.0, "map");
  if (profile.n_reduce > 0) {
    double reduce_mean =
        static_cast<double>(profile.reduce_avg + profile.shuffle_typ_avg);
    spec.reduce_service =
        make_service(policy, reduce_mean, profile.reduce_samples,
                     static_cast<double>(profile.shuffle_typ_avg), "reduce");
  }
  return spec;
}

namespace {

enum class EventKind { ThinkDone, MapDone, ReduceDone };

struct Event {
  double time;
  std::uint64_t seq;  // FIFO tie-break for simultaneous events
  EventKind kind;
  std::int64_t job;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    return seq > o.seq;
  }
};

struct Job {
  double submit_time;
  std::int64_t maps_left;
  std::int64_t reduces_left;
};

}  // namespace

struct Simulation::Impl {
  const NetworkSpec spec;
  std::ostream* trace;
  SimObserver observer;

  RngStream think_rng, map_rng, reduce_rng;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;
  std::uint64_t seq = 0;
  std::uint64_t processed = 0;
  double now = 0.0;

  std::unordered_map<std::int64_t, Job> jobs;
  std::int64_t next_job = 0;
  std::deque<std::int64_t> map_wait, reduce_wait;  // job ids, one entry per task
  std::int64_t busy = 0;
  std::int64_t thinking = 0;

  explicit Impl(const NetworkSpec& s, std::uint64_t seed, std::ostream* tr,
                SimObserver obs)
      : spec(s),
        trace(tr),
        observer(std::move(obs)),
        think_rng(RngStream::substream(seed, 0)),
        map_rng(RngStream::substream(seed, 1)),
        reduce_rng(RngStream::substream(seed, 2)) {
    if (spec.capacity < 1) throw std::invalid_argument("capacity must be >= 1");
    if (spec.n_map < 1) throw std::invalid_argument("n_map must be >= 1");
    thinking = spec.h_users;
    for (std::int64_t u = 0; u < spec.h_users; ++u) schedule_think();
  }

  double think_draw() {
    if (spec.deterministic_think || spec.think_time <= 0.0)
      return spec.think_time;
    return -spec.think_time * std::log(think_rng.next_open01());
  }

  void push(double t, EventKind k, std::int64_t job) {
    events.push(Event{t, seq++, k, job});
  }

  void schedule_think() { push(now + think_draw(), EventKind::ThinkDone, -1); }

  void emit_trace(const char* kind, std::int64_t job, const char* task_kind) {
    if (trace) {
      (*trace) << now << '\t' << kind << '\t' << job << '\t' << task_kind
               << '\t' << busy << '\n';
    }
  }

  void observe() {
    if (observer) {
      observer(SimObservation{
          now, busy, static_cast<std::int64_t>(map_wait.size()),
          static_cast<std::int64_t>(reduce_wait.size()), thinking,
          static_cast<std::int64_t>(jobs.size())});
    }
  }

  // FCR admission: all waiting reduce tasks go before any map task.
  void admit() {
    while (busy < spec.capacity) {
      if (!reduce_wait.empty()) {
        std::int64_t j = reduce_wait.front();
        reduce_wait.pop_front();
        ++busy;
        push(now + sample(spec.reduce_service, reduce_rng),
             EventKind::ReduceDone, j);
        emit_trace("admit", j, "reduce");
      } else if (!map_wait.empty()) {
        std::int64_t j = map_wait.front();
        map_wait.pop_front();
        ++busy;
        push(now + sample(spec.map_service, map_rng), EventKind::MapDone, j);
        emit_trace("admit", j, "map");
      } else {
        break;
      }
    }
  }

  void complete_job(std::int64_t j, std::vector<double>& responses) {
    responses.push_back(now - jobs.at(j).submit_time);
    jobs.erase(j);
    emit_trace("job_complete", j, "-");
    ++thinking;
    schedule_think();
  }

  // Processes events until `count` more jobs finish.
  std::vector<double> run(std::int64_t count, std::uint64_t max_events) {
    std::vector<double> responses;
    responses.reserve(static_cast<std::size_t>(count));
    while (static_cast<std::int64_t>(responses.size()) < count) {
      if (events.empty())
        throw std::logic_error("event list drained in a closed network");
      if (processed >= max_events)
        throw SimulationAborted("event cap reached after " +
                                    std::to_string(processed) + " events",
                                std::move(responses));
      Event ev = events.top();
      events.pop();
      ++processed;
      now = ev.time;

      switch (ev.kind) {
        case EventKind::ThinkDone: {
          --thinking;
          std::int64_t j = next_job++;
          jobs.emplace(j, Job{now, spec.n_map, 0});
          for (std::int64_t t = 0; t < spec.n_map; ++t) map_wait.push_back(j);
          emit_trace("submit", j, "-");
          admit();
          break;
        }
        case EventKind::MapDone: {
          --busy;  // map join is outside the FCR: container freed here
          emit_trace("task_done", ev.job, "map");
          Job& job = jobs.at(ev.job);
          if (--job.maps_left == 0) {
            if (spec.n_reduce == 0) {
              complete_job(ev.job, responses);
            } else {
              // reduce fork, also outside the FCR
              job.reduces_left = spec.n_reduce;
              for (std::int64_t t = 0; t < spec.n_reduce; ++t)
                reduce_wait.push_back(ev.job);
            }
          }
          admit();
          break;
        }
        case EventKind::ReduceDone: {
          --busy;
          emit_trace("task_done", ev.job, "reduce");
          Job& job = jobs.at(ev.job);
          if (--job.reduces_left == 0) complete_job(ev.job, responses);
          admit();
          break;
        }
      }
      observe();
    }
    return responses;
  }
};

Simulation::Simulation(const NetworkSpec& spec, std::uint64_t seed,
                       std::ostream* trace, SimObserver observer)
    : impl_(new Impl(spec, seed, trace, std::move(observer))) {}

Simulation::~Simulation() { delete impl_; }

std::vector<double> Simulation::run(std::int64_t count, std::uint64_t max_events) {
  return impl_->run(count, max_events);
}

std::uint64_t Simulation::events_processed() const { return impl_->processed; }

std::vector<double> run_replication(const NetworkSpec& spec,
                                    const SimParams& params,
                                    std::int64_t completions,
                                    std::ostream* trace) {
  Simulation sim(spec, params.seed, trace);
  return sim.run(completions, params.max_events);
}

SimEstimate estimate_response_time(const NetworkSpec& spec,
                                   const SimParams& params) {
  if (params.batch_size < 10)
    throw std::invalid_argument("batch_size must be >= 10");
  if (params.max_batches < 2)
    throw std::invalid_argument("max_batches must be >= 2");

  Simulation sim(spec, params.seed, nullptr);
  SimEstimate est;
  std::vector<double> batch_means;
  bool aborted = false;

  auto run_chunk = [&](std::int64_t n) {
    try {
      return sim.run(n, params.max_events);
    } catch (const SimulationAborted& e) {
      aborted = true;
      return e.partial_responses;
    }
  };

  if (params.warmup_jobs > 0) run_chunk(params.warmup_jobs);

  while (!aborted &&
         static_cast<std::int64_t>(batch_means.size()) < params.max_batches) {
    std::vector<double> batch = run_chunk(params.batch_size);
    if (static_cast<std::int64_t>(batch.size()) < params.batch_size) break;
    double sum = 0.0;
    for (double r : batch) sum += r;
    batch_means.push_back(sum / static_cast<double>(params.batch_size));
    est.completions += params.batch_size;

    std::size_t k = batch_means.size();
    if (k < 2) {
      est.mean_response = batch_means[0];
      est.half_width = std::numeric_limits<double>::infinity();
      continue;
    }
    double mean = 0.0;
    for (double m : batch_means) mean += m;
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double m : batch_means) ss += (m - mean) * (m - mean);
    double var = ss / static_cast<double>(k - 1);
    boost::math::students_t dist(static_cast<double>(k - 1));
    double tq = boost::math::quantile(dist, 0.5 + params.confidence / 2.0);
    est.mean_response = mean;
    est.half_width = tq * std::sqrt(var / static_cast<double>(k));
    if (mean > 0.0 &&
        est.half_width / mean <= params.target_rel_half_width) {
      est.converged = true;
      return est;
    }
  }
  if (batch_means.size() < 2)
    est.half_width = std::numeric_limits<double>::infinity();
  est.converged = false;
  return est;
}

}  // namespace mrplan

#include "mrplan/json_io.hpp"

#include <cmath>
#include <set>

namespace mrplan {

namespace {

// nlohmann reports a byte offset; turn it into line/column for the message.
[[noreturn]] void rethrow_with_position(const std::string& text,
                                        const nlohmann::json::parse_error& e) {
  std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw JsonSyntaxError("JSON parse error at line " + std::to_string(line) +
                        ", column " + std::to_string(col) + ": " + e.what());
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    rethrow_with_position(text, e);
  }
}

class FieldReader {
 public:
  FieldReader(const json& obj, std::string path, bool strict,
              std::vector<Diagnostic>& diags)
      : obj_(obj), path_(std::move(path)), strict_(strict), diags_(diags) {}

  ~FieldReader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) {
        diags_.push_back({strict_ ? Severity::Error : Severity::Warning,
                          join(key), "unknown field"});
      }
    }
  }

  bool object_ok() {
    if (!obj_.is_object()) {
      diags_.push_back({Severity::Error, path_, "expected a JSON object"});
      return false;
    }
    return true;
  }

  const json* get(const char* key, bool required) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required)
        diags_.push_back({Severity::Error, join(key), "missing required field"});
      return nullptr;
    }
    return &*it;
  }

  std::string str(const char* key, bool required, const std::string& dflt = "") {
    const json* v = get(key, required);
    if (!v) return dflt;
    if (!v->is_string()) {
      diags_.push_back({Severity::Error, join(key), "expected a string"});
      return dflt;
    }
    return v->get<std::string>();
  }

  std::int64_t integer(const char* key, bool required, std::int64_t dflt = 0) {
    const json* v = get(key, required);
    if (!v) return dflt;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      diags_.push_back({Severity::Error, join(key), "expected an integer"});
      return dflt;
    }
    return v->get<std::int64_t>();
  }

  double real(const char* key, bool required, double dflt = 0.0) {
    const json* v = get(key, required);
    if (!v) return dflt;
    if (!v->is_number()) {
      diags_.push_back({Severity::Error, join(key), "expected a number"});
      return dflt;
    }
    return v->get<double>();
  }

  // Durations accept fractional milliseconds on input, stored as integer ms.
  Millis millis(const char* key, bool required, Millis dflt = 0) {
    const json* v = get(key, required);
    if (!v) return dflt;
    if (!v->is_number()) {
      diags_.push_back({Severity::Error, join(key), "expected a number (ms)"});
      return dflt;
    }
    return static_cast<Millis>(std::llround(v->get<double>()));
  }

  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& obj() const { return obj_; }

 private:
  const json& obj_;
  std::string path_;
  bool strict_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> seen_;
};

JobProfile parse_profile(const json& j, const std::string& path, bool strict,
                         std::vector<Diagnostic>& diags) {
  JobProfile p;
  FieldReader r(j, path, strict, diags);
  if (!r.object_ok()) return p;
  p.n_map = r.integer("n_map", true, 1);
  p.n_reduce = r.integer("n_reduce", false, 0);
  p.map_avg = r.millis("map_avg_ms", true);
  p.reduce_avg = r.millis("reduce_avg_ms", p.n_reduce > 0);
  p.shuffle_typ_avg = r.millis("shuffle_typ_avg_ms", false);
  p.map_max = r.millis("map_max_ms", false, p.map_avg);
  p.reduce_max = r.millis("reduce_max_ms", false, p.reduce_avg);
  p.shuffle_first_max = r.millis("shuffle_first_max_ms", false);
  p.shuffle_typ_max = r.millis("shuffle_typ_max_ms", false, p.shuffle_typ_avg);

  auto samples = [&](const char* key) -> std::optional<std::vector<Millis>> {
    const json* v = r.get(key, false);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
      diags.push_back({Severity::Error, r.join(key), "expected an array of ms"});
      return std::nullopt;
    }
    std::vector<Millis> out;
    for (const auto& e : *v) {
      if (!e.is_number()) {
        diags.push_back({Severity::Error, r.join(key), "expected numbers (ms)"});
        return std::nullopt;
      }
      out.push_back(static_cast<Millis>(std::llround(e.get<double>())));
    }
    return out;
  };
  p.map_samples = samples("map_samples_ms");
  p.reduce_samples = samples("reduce_samples_ms");
  return p;
}

}  // namespace

ProblemParse parse_problem(const std::string& text, bool strict) {
  json j = parse_text(text);
  ProblemParse out;
  auto& diags = out.diagnostics;

  FieldReader root(j, "", strict, diags);
  if (!root.object_ok()) return out;
  out.problem.currency = root.str("currency", false, "EUR");

  if (const json* catalog = root.get("catalog", true)) {
    if (!catalog->is_array()) {
      diags.push_back({Severity::Error, "catalog", "expected an array"});
    } else {
      for (std::size_t i = 0; i < catalog->size(); ++i) {
        std::string path = "catalog[" + std::to_string(i) + "]";
        FieldReader r((*catalog)[i], path, strict, diags);
        if (!r.object_ok()) continue;
        VmType vm;
        vm.id = r.str("id", true);
        vm.containers = r.integer("containers", true, 1);
        vm.sigma = Money::from_double(r.real("sigma_per_hour", true));
        vm.pi = Money::from_double(r.real("pi_per_hour", true));
        out.problem.catalog.push_back(std::move(vm));
      }
    }
  }

  if (const json* classes = root.get("classes", true)) {
    if (!classes->is_array()) {
      diags.push_back({Severity::Error, "classes", "expected an array"});
    } else {
      for (std::size_t i = 0; i < classes->size(); ++i) {
        std::string path = "classes[" + std::to_string(i) + "]";
        FieldReader r((*classes)[i], path, strict, diags);
        if (!r.object_ok()) continue;
        ApplicationClass cls;
        cls.id = r.str("id", true);
        cls.h_users = r.integer("h_users", true, 1);
        cls.think_time = r.millis("think_time_ms", false, 0);
        cls.deadline = r.millis("deadline_ms", true);
        cls.spot_fraction_cap = r.real("eta", false, 0.0);
        if (const json* profiles = r.get("profiles", true)) {
          if (!profiles->is_object()) {
            diags.push_back(
                {Severity::Error, path + ".profiles", "expected an object"});
          } else {
            for (const auto& [vm_id, pj] : profiles->items()) {
              cls.profiles.emplace(
                  vm_id,
                  parse_profile(pj, path + ".profiles." + vm_id, strict, diags));
            }
          }
        }
        out.problem.classes.push_back(std::move(cls));
      }
    }
  }

  if (!has_errors(diags)) {
    auto model_diags = validate(out.problem);
    diags.insert(diags.end(), model_diags.begin(), model_diags.end());
  }
  return out;
}

json emit_solution(const Solution& solution, const std::string& currency) {
  json j;
  j["status"] = solution.partial ? "partial" : "ok";
  j["hourly_cost"] = solution.hourly_cost.to_double();
  j["currency"] = currency;
  j["seed"] = solution.seed;
  j["tool_version"] = kToolVersion;
  j["classes"] = json::array();
  for (const auto& cs : solution.per_class) {
    json c;
    c["id"] = cs.class_id;
    c["vm_type"] = cs.vm_type;
    c["vms"] = cs.vms;
    c["reserved"] = cs.reserved;
    c["spot"] = cs.spot;
    c["predicted_time_ms"] = cs.predicted_time;
    c["ci_half_width_ms"] = cs.ci_half_width;
    c["feasible"] = cs.feasible;
    j["classes"].push_back(std::move(c));
  }
  return j;
}

Solution parse_solution(const std::string& text) {
  json j = parse_text(text);
  Solution s;
  s.partial = j.at("status").get<std::string>() == "partial";
  s.hourly_cost = Money::from_double(j.at("hourly_cost").get<double>());
  s.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("classes")) {
    ClassSolution cs;
    cs.class_id = c.at("id").get<std::string>();
    cs.vm_type = c.at("vm_type").get<std::string>();
    cs.vms = c.at("vms").get<std::int64_t>();
    cs.reserved = c.at("reserved").get<std::int64_t>();
    cs.spot = c.at("spot").get<std::int64_t>();
    cs.predicted_time = c.at("predicted_time_ms").get<double>();
    cs.ci_half_width = c.at("ci_half_width_ms").get<double>();
    cs.feasible = c.at("feasible").get<bool>();
    s.per_class.push_back(std::move(cs));
  }
  return s;
}

namespace {

ServiceDistribution parse_service(const json& j, const std::string& path) {
  if (!j.is_object())
    throw std::invalid_argument(path + ": expected an object");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "deterministic")
    return ServiceDistribution::deterministic(j.at("mean_ms").get<double>());
  if (kind == "exponential")
    return ServiceDistribution::exponential(j.at("mean_ms").get<double>());
  if (kind == "empirical") {
    std::vector<double> samples = j.at("samples_ms").get<std::vector<double>>();
    if (samples.empty())
      throw std::invalid_argument(path + ".samples_ms: must be non-empty");
    return ServiceDistribution::empirical(std::move(samples));
  }
  throw std::invalid_argument(path + ".kind: unknown kind '" + kind + "'");
}

}  // namespace

std::pair<NetworkSpec, SimParams> parse_network(const json& j,
                                                const std::string& path) {
  auto p = [&](const char* k) { return path.empty() ? k : path + "." + k; };
  NetworkSpec spec;
  spec.h_users = j.at("h_users").get<std::int64_t>();
  spec.think_time = j.value("think_time_ms", 0.0);
  spec.n_map = j.at("n_map").get<std::int64_t>();
  spec.n_reduce = j.value("n_reduce", std::int64_t{0});
  spec.capacity = j.at("capacity").get<std::int64_t>();
  spec.deterministic_think = j.value("deterministic_think", false);
  spec.map_service = parse_service(j.at("map_service"), p("map_service"));
  if (spec.n_reduce > 0)
    spec.reduce_service =
        parse_service(j.at("reduce_service"), p("reduce_service"));

  SimParams params;
  if (j.contains("sim")) {
    const json& s = j["sim"];
    params.seed = s.value("seed", params.seed);
    params.warmup_jobs = s.value("warmup_jobs", params.warmup_jobs);
    params.batch_size = s.value("batch_size", params.batch_size);
    params.max_batches = s.value("max_batches", params.max_batches);
    params.confidence = s.value("confidence", params.confidence);
    params.target_rel_half_width =
        s.value("target_rel_half_width", params.target_rel_half_width);
    params.max_events = s.value("max_events", params.max_events);
  }
  return {spec, params};
}

std::pair<NetworkSpec, SimParams> parse_network_text(const std::string& text) {
  return parse_network(parse_text(text));
}

json emit_estimate(const SimEstimate& est, std::uint64_t seed) {
  json j;
  j["mean_response_ms"] = est.mean_response;
  j["ci_half_width_ms"] = est.half_width;
  j["completions"] = est.completions;
  j["converged"] = est.converged;
  j["seed"] = seed;
  j["tool_version"] = kToolVersion;
  return j;
}

}  // namespace mrplan

#include "afpp/io.hpp"

#include "afpp/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <tuple>

#ifndef AFPP_GIT_DESCRIBE
#define AFPP_GIT_DESCRIBE "unknown"
#endif

namespace afpp::io {
namespace {

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw DomainError("key '" + key + "' must be a number");
  return j.get<double>();
}

State state_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw DomainError("key '" + key + "' must be [x, y]");
  return {number(j[0], key), number(j[1], key)};
}

json state_to(State s) { return json::array({s.x, s.y}); }

}  // namespace

std::string_view git_describe() noexcept { return AFPP_GIT_DESCRIBE; }

json to_json(const ModelParams& p) {
  return {{"gamma", p.gamma}, {"alpha", p.alpha}, {"xi", p.xi},
          {"epsilon", p.epsilon}, {"m", p.m}, {"delta", p.delta}};
}

ModelParams params_from_json(const json& j, const ModelParams& defaults) {
  if (!j.is_object()) throw DomainError("params must be a JSON object");
  ModelParams p = defaults;
  for (const auto& [key, value] : j.items()) {
    Param which;
    try {
      which = param_from_string(key);
    } catch (const DomainError&) {
      throw DomainError("unknown parameter key '" + key + "'");
    }
    p = with(p, which, number(value, key));
  }
  return p;
}

json to_json(const control::ControlProblem& prob) {
  return {{"params", to_json(prob.params)},
          {"control", std::string(control::to_string(prob.control))},
          {"bounds", json::array({prob.u_min, prob.u_max})},
          {"initial", state_to(prob.initial)},
          {"target", state_to(prob.target)},
          {"mesh_size", prob.mesh_size},
          {"in_transformed_time", prob.in_transformed_time}};
}

control::ControlProblem control_problem_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("control problem must be a JSON object");
  control::ControlProblem prob;
  bool have_bounds = false;
  if (j.contains("control")) {
    if (!j["control"].is_string()) throw DomainError("key 'control' must be a string");
    prob.control = control::control_kind_from_string(j["control"].get<std::string>());
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "params") {
      prob.params = params_from_json(value);
    } else if (key == "control") {
      continue;
    } else if (key == "bounds") {
      if (!value.is_array() || value.size() != 2) throw DomainError("key 'bounds' must be [u_min, u_max]");
      prob.u_min = number(value[0], key);
      prob.u_max = number(value[1], key);
      have_bounds = true;
    } else if (key == "initial") {
      prob.initial = state_from(value, key);
    } else if (key == "target") {
      prob.target = state_from(value, key);
    } else if (key == "mesh_size") {
      if (!value.is_number_integer()) throw DomainError("key 'mesh_size' must be an integer");
      prob.mesh_size = value.get<int>();
    } else if (key == "in_transformed_time") {
      if (!value.is_boolean()) throw DomainError("key 'in_transformed_time' must be a boolean");
      prob.in_transformed_time = value.get<bool>();
    } else {
      throw DomainError("unknown control problem key '" + key + "'");
    }
  }
  if (!have_bounds) std::tie(prob.u_min, prob.u_max) = control::default_bounds(prob.control);
  prob.validate();
  return prob;
}

json summary_json(const control::ControlSolution& sol) {
  const auto& s = sol.nlp_stats;
  json j = {{"S_opt", sol.S_opt},
            {"T_opt", sol.T_opt},
            {"switching_times", sol.switching_times_t},
            {"switching_times_s", sol.switching_times_s},
            {"nlp_stats",
             {{"status", s.status},
              {"iterations", s.iterations},
              {"qp_iterations", s.qp_iterations},
              {"variables", s.variables},
              {"constraints", s.constraints},
              {"objective", s.objective},
              {"stationarity", s.stationarity},
              {"constraint_violation", s.constraint_violation},
              {"complementarity", s.complementarity},
              {"max_defect", s.max_defect},
              {"endpoint_mismatch", s.endpoint_mismatch}}}};
  if (sol.warning) j["warning"] = *sol.warning;
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

json metadata(std::string_view command, const json& params, const json& tolerances, double wall_seconds,
              bool truncated) {
  return {{"command", std::string(command)},
          {"params", params},
          {"tolerances", tolerances},
          {"git_describe", std::string(git_describe())},
          {"wall_time_s", wall_seconds},
          {"truncated", truncated}};
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_csv(const std::filesystem::path& path, const json& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  out << "# " << meta.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& meta, const json& body) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  json j = body;
  j["meta"] = meta;
  out << j.dump(2) << '\n';
}

}  // namespace afpp::io

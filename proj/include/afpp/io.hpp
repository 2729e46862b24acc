#pragma once

#include "afpp/model.hpp"
#include "afpp/optimal_control.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace afpp::io {

using json = nlohmann::json;

std::string_view git_describe() noexcept;

json to_json(const ModelParams& p);

/// Strict: every key must be a parameter name with a numeric value. Missing
/// keys keep the values of `defaults`. Throws DomainError naming the key.
ModelParams params_from_json(const json& j, const ModelParams& defaults = {});

json to_json(const control::ControlProblem& prob);

/// Keys: params, control, bounds [lo, hi], initial [x, y], target [x, y],
/// mesh_size, in_transformed_time. Unknown keys are rejected.
control::ControlProblem control_problem_from_json(const json& j);

json summary_json(const control::ControlSolution& sol);

/// Parses a JSON file; DomainError on I/O or syntax failure.
json read_json_file(const std::filesystem::path& path);

/// Metadata block written ahead of every artifact.
json metadata(std::string_view command, const json& params, const json& tolerances, double wall_seconds,
              bool truncated);

/// Shortest round-trip decimal form.
std::string fmt(double v);

/// "# <metadata json>" line, the header row, then the rows.
void write_csv(const std::filesystem::path& path, const json& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

/// {"meta": meta, ...body}.
void write_json(const std::filesystem::path& path, const json& meta, const json& body);

}  // namespace afpp::io

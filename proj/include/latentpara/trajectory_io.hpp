#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentpara/attack_driver.hpp"

namespace latentpara {

/// One JSON object per iteration, self-contained (carries sample_id and the
/// original query/IoU so a single line can be read on its own).
nlohmann::ordered_json iteration_to_json(const AttackTrajectory& trajectory,
                                         const IterationRecord& iteration);

std::string trajectory_to_jsonl(const AttackTrajectory& trajectory);

/// <dir>/<sample_id>.jsonl
std::filesystem::path trajectory_path(const std::filesystem::path& dir, const std::string& sample_id);

void write_trajectory(const std::filesystem::path& dir, const AttackTrajectory& trajectory);

/// Reads iterations back. Completion status and the error text live in the
/// run manifest, not in the trajectory file, so they are not restored here.
AttackTrajectory read_trajectory(const std::filesystem::path& path);

}  // namespace latentpara

#include "latentpara/trajectory_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace latentpara {

using nlohmann::ordered_json;

ordered_json iteration_to_json(const AttackTrajectory& trajectory, const IterationRecord& it) {
  ordered_json candidates = ordered_json::array();
  for (const auto& c : it.candidates) {
    candidates.push_back(ordered_json{{"latent_hash", c.latent_hash},
                                      {"text", c.text},
                                      {"iou", c.iou},
                                      {"reward", c.reward},
                                      {"logp_old", c.logp_old},
                                      {"logp_new", c.logp_new},
                                      {"advantage", c.advantage},
                                      {"ratio", c.ratio},
                                      {"surrogate", c.surrogate}});
  }
  return ordered_json{{"sample_id", trajectory.sample_id},
                      {"t", it.t},
                      {"original_text", trajectory.original_text},
                      {"original_iou", trajectory.original_iou},
                      {"mean_text", it.mean_text},
                      {"mean_iou", it.mean_iou},
                      {"losses",
                       {{"total", it.losses.total},
                        {"policy", it.losses.policy},
                        {"value", it.losses.value},
                        {"sim", it.losses.sim}}},
                      {"updated", it.updated},
                      {"dropped", it.dropped},
                      {"candidates", std::move(candidates)}};
}

std::string trajectory_to_jsonl(const AttackTrajectory& trajectory) {
  std::string out;
  for (const auto& it : trajectory.iterations) {
    out += iteration_to_json(trajectory, it).dump();
    out += '\n';
  }
  return out;
}

std::filesystem::path trajectory_path(const std::filesystem::path& dir, const std::string& sample_id) {
  return dir / (sample_id + ".jsonl");
}

void write_trajectory(const std::filesystem::path& dir, const AttackTrajectory& trajectory) {
  const auto path = trajectory_path(dir, trajectory.sample_id);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trajectory " + path.string());
  out << trajectory_to_jsonl(trajectory);
}

AttackTrajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory " + path.string());
  AttackTrajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      traj.sample_id = j.at("sample_id").get<std::string>();
      traj.original_text = j.at("original_text").get<std::string>();
      traj.original_iou = j.at("original_iou").get<double>();
      traj.has_original_iou = true;
      IterationRecord it;
      it.t = j.at("t").get<std::size_t>();
      it.mean_text = j.at("mean_text").get<std::string>();
      it.mean_iou = j.at("mean_iou").get<double>();
      const auto& l = j.at("losses");
      it.losses = {l.at("total").get<double>(), l.at("policy").get<double>(),
                   l.at("value").get<double>(), l.at("sim").get<double>()};
      it.updated = j.at("updated").get<bool>();
      it.dropped = j.at("dropped").get<std::size_t>();
      for (const auto& c : j.at("candidates")) {
        CandidateRecord r;
        r.latent_hash = c.at("latent_hash").get<std::string>();
        r.text = c.at("text").get<std::string>();
        r.iou = c.at("iou").get<double>();
        r.reward = c.at("reward").get<double>();
        r.logp_old = c.at("logp_old").get<double>();
        r.logp_new = c.at("logp_new").get<double>();
        r.advantage = c.at("advantage").get<double>();
        r.ratio = c.at("ratio").get<double>();
        r.surrogate = c.at("surrogate").get<double>();
        it.candidates.push_back(std::move(r));
      }
      traj.iterations.push_back(std::move(it));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace latentpara

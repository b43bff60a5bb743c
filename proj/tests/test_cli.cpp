#include <gtest/gtest.h>

#include <json.hpp>

#include "analysis_oracle.hpp"
#include "test_support.hpp"

namespace lpt = latentpara::testing;
using nlohmann::json;

namespace {

const std::string kFixtures = LATENTPARA_FIXTURES;
const std::string kEpoch = "SOURCE_DATE_EPOCH=1700000000";

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

// Small synthetic dataset plus a fast attack config.
struct AttackSetup {
  lpt::TempDir dir;
  std::string dataset;
  std::string config;
  AttackSetup() {
    dataset = (dir / "dataset.jsonl").string();
    config = (dir / "config.json").string();
    const auto r = lpt::run_cli({"make-synthetic-dataset", "--out", dataset, "--count", "3", "--seed", "5"});
    if (r.status != 0) throw std::runtime_error("dataset: " + r.err);
    lpt::write_file(config, R"({"schema_version":1,"attack":{"candidates":6,"iterations":4,"sigma_init":0.5,
      "lambda_sim":0.0,"lr_mu":0.2,"seed":77}})");
  }
};

lpt::CliResult attack(const AttackSetup& s, const std::string& out, const std::string& parallelism) {
  return lpt::run_cli({"attack", "--dataset", s.dataset, "--config", s.config, "--out", out, "--run-id", "r",
                       "--parallelism", parallelism},
                      kEpoch);
}

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(lpt::run_cli({"--help"}).status, 0);
  EXPECT_EQ(lpt::run_cli({"attack"}).status, 1);
  EXPECT_EQ(lpt::run_cli({"no-such-command"}).status, 1);
}

TEST(CliAttack, MissingConfigIsUsageError) {
  AttackSetup s;
  const auto r = lpt::run_cli({"attack", "--dataset", s.dataset, "--config", (s.dir / "nope.json").string(),
                               "--out", (s.dir / "run").string()});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("nope.json"), std::string::npos);
}

TEST(CliAttack, UnknownConfigKeyIsUsageError) {
  AttackSetup s;
  lpt::write_file(s.config, R"({"schema_version":1,"attack":{"candidatez":3}})");
  EXPECT_EQ(lpt::run_cli({"attack", "--dataset", s.dataset, "--config", s.config, "--out",
                          (s.dir / "run").string()})
                .status,
            1);
}

TEST(CliAttack, WritesManifestAndTrajectories) {
  AttackSetup s;
  const auto out = s.dir / "run";
  const auto r = attack(s, out.string(), "1");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto manifest = json::parse(lpt::read_file(out / "manifest.json"));
  EXPECT_EQ(manifest["run_id"], "r");
  EXPECT_EQ(manifest["samples"].size(), 3u);
  std::size_t trajectories = 0;
  for (const auto& [path, content] : lpt::snapshot_tree(out)) trajectories += path != "manifest.json";
  EXPECT_EQ(trajectories, 3u);
  EXPECT_NE(r.out.find("3/3 samples complete"), std::string::npos);
  // A second attack into the same directory needs --force.
  EXPECT_EQ(attack(s, out.string(), "1").status, 1);
}

TEST(CliAttack, ByteIdenticalAcrossRunsAndParallelism) {
  AttackSetup s;
  ASSERT_EQ(attack(s, (s.dir / "a").string(), "1").status, 0);
  ASSERT_EQ(attack(s, (s.dir / "b").string(), "1").status, 0);
  ASSERT_EQ(attack(s, (s.dir / "c").string(), "8").status, 0);
  const auto a = lpt::snapshot_tree(s.dir / "a");
  EXPECT_EQ(a, lpt::snapshot_tree(s.dir / "b"));
  EXPECT_EQ(a, lpt::snapshot_tree(s.dir / "c"));
}

TEST(CliAttack, SeedFlagChangesTrajectories) {
  AttackSetup s;
  ASSERT_EQ(attack(s, (s.dir / "a").string(), "1").status, 0);
  ASSERT_EQ(lpt::run_cli({"attack", "--dataset", s.dataset, "--config", s.config, "--out",
                          (s.dir / "b").string(), "--run-id", "r", "--seed", "78"},
                         kEpoch)
                .status,
            0);
  EXPECT_NE(lpt::snapshot_tree(s.dir / "a"), lpt::snapshot_tree(s.dir / "b"));
}

TEST(CliEval, FixturePoolMetrics) {
  lpt::TempDir dir;
  const auto r = lpt::run_cli({"eval", "--candidates", fixture("eval_candidates.jsonl"), "--originals",
                               fixture("eval_originals.jsonl"), "--out", (dir / "ev").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(lpt::read_file(dir / "ev/metrics.csv"), "mSR,SR_5,SR_10\n0.501650,0.666667,0.666667\n");
  const auto first = lpt::snapshot_tree(dir / "ev");
  ASSERT_EQ(lpt::run_cli({"eval", "--candidates", fixture("eval_candidates.jsonl"), "--originals",
                          fixture("eval_originals.jsonl"), "--out", (dir / "ev").string()})
                .status,
            0);
  EXPECT_EQ(lpt::snapshot_tree(dir / "ev"), first);
}

TEST(CliEval, EmptyAndMalformedInputs) {
  lpt::TempDir dir;
  lpt::write_file(dir / "empty.jsonl", "");
  EXPECT_EQ(lpt::run_cli({"eval", "--candidates", (dir / "empty.jsonl").string(), "--originals",
                          fixture("eval_originals.jsonl"), "--out", (dir / "a").string()})
                .status,
            1);
  lpt::write_file(dir / "mixed.jsonl", lpt::read_file(fixture("eval_candidates.jsonl")) + "{broken\n");
  const auto r = lpt::run_cli({"eval", "--candidates", (dir / "mixed.jsonl").string(), "--originals",
                               fixture("eval_originals.jsonl"), "--out", (dir / "b").string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(lpt::read_file(dir / "b/metrics.csv"), "mSR,SR_5,SR_10\n0.501650,0.666667,0.666667\n");
  EXPECT_EQ(lpt::run_cli({"eval", "--out", (dir / "c").string()}).status, 1);
  EXPECT_EQ(lpt::run_cli({"eval", "--candidates", fixture("eval_candidates.jsonl"), "--out",
                          (dir / "d").string()})
                .status,
            1);
}

TEST(CliEval, EvaluatesARun) {
  AttackSetup s;
  ASSERT_EQ(attack(s, (s.dir / "run").string(), "1").status, 0);
  const auto r = lpt::run_cli({"eval", "--run", (s.dir / "run").string(), "--out", (s.dir / "ev").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto curve = json::parse(lpt::read_file(s.dir / "ev/curve.json"));
  EXPECT_EQ(curve["grid"].size(), 101u);
  EXPECT_EQ(curve["samples"], 3);
}

TEST(CliUnify, ZeroInputsIsUsageError) {
  lpt::TempDir dir;
  EXPECT_EQ(lpt::run_cli({"unify", "--out", (dir / "u").string()}).status, 1);
}

TEST(CliUnify, DisjointWinnersKeepTheirLabels) {
  lpt::TempDir dir;
  lpt::write_file(dir / "a.jsonl",
                  "{\"sample_id\":\"s1\",\"text\":\"Find the red cup on the kitchen table please.\",\"iou\":0.1,"
                  "\"source_attack\":\"alpha\"}\n"
                  "{\"sample_id\":\"s2\",\"text\":\"Show me the small dog near the front door.\",\"iou\":0.7,"
                  "\"source_attack\":\"alpha\"}\n");
  lpt::write_file(dir / "b.jsonl",
                  "{\"sample_id\":\"s1\",\"text\":\"Find the red cup on the kitchen table now.\",\"iou\":0.5,"
                  "\"source_attack\":\"beta\"}\n"
                  "{\"sample_id\":\"s2\",\"text\":\"Show me the small dog near the back door.\",\"iou\":0.2,"
                  "\"source_attack\":\"beta\"}\n");
  const auto r = lpt::run_cli({"unify", (dir / "a.jsonl").string(), (dir / "b.jsonl").string(), "--originals",
                               fixture("eval_originals.jsonl"), "--out", (dir / "u").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  std::map<std::string, std::string> winner;
  std::istringstream lines(lpt::read_file(dir / "u/winners.jsonl"));
  for (std::string line; std::getline(lines, line);) {
    const auto j = json::parse(line);
    if (j["status"] == "success") winner[j["sample_id"]] = j["source_attack"];
  }
  EXPECT_EQ(winner["s1"], "alpha");
  EXPECT_EQ(winner["s2"], "beta");
}

TEST(CliAnalyze, PerfectClusters) {
  lpt::TempDir dir;
  lpt::write_file(dir / "e.jsonl",
                  "{\"vector\":[1,0,0],\"label\":\"a\",\"length\":3}\n"
                  "{\"vector\":[1,0.01,0],\"label\":\"a\",\"length\":4}\n"
                  "{\"vector\":[0,1,0],\"label\":\"b\",\"length\":5}\n"
                  "{\"vector\":[0.01,1,0.02],\"label\":\"b\",\"length\":7}\n");
  const auto r = lpt::run_cli({"analyze", "--embeddings", (dir / "e.jsonl").string(), "--out",
                               (dir / "out").string(), "--top-k", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = json::parse(lpt::read_file(dir / "out/report.json"));
  EXPECT_EQ(report["nnr"], 1.0);
  EXPECT_TRUE(report["csr"].is_number());
  EXPECT_EQ(report["per_dim_r"].size(), 3u);
  const auto csv = lpt::read_file(dir / "out/top_dimensions.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(CliAnalyze, SingletonsAndSingleLabel) {
  lpt::TempDir dir;
  lpt::write_file(dir / "single.jsonl",
                  "{\"vector\":[1,0],\"label\":\"a\",\"length\":1}\n"
                  "{\"vector\":[0,1],\"label\":\"b\",\"length\":2}\n");
  EXPECT_EQ(lpt::run_cli({"analyze", "--embeddings", (dir / "single.jsonl").string(), "--out",
                          (dir / "o1").string()})
                .status,
            1);
  lpt::write_file(dir / "one.jsonl",
                  "{\"vector\":[1,0],\"label\":\"a\",\"length\":1}\n"
                  "{\"vector\":[0.9,0.2],\"label\":\"a\",\"length\":2}\n");
  const auto r = lpt::run_cli({"analyze", "--embeddings", (dir / "one.jsonl").string(), "--out",
                               (dir / "o2").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = json::parse(lpt::read_file(dir / "o2/report.json"));
  EXPECT_TRUE(report["csr"].is_null());
  EXPECT_FALSE(report["warnings"].empty());
}

TEST(CliSynthBench, ReportAndDeterminism) {
  lpt::TempDir dir;
  const auto r = lpt::run_cli({"synth-bench", "--out", (dir / "a").string()}, kEpoch);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = json::parse(lpt::read_file(dir / "a/report.json"));
  EXPECT_EQ(report["grid"].size(), 101u);
  EXPECT_EQ(report["samples"].size(), 3u);
  EXPECT_EQ(lpt::run_cli({"synth-bench", "--out", (dir / "a").string()}, kEpoch).status, 1);
  ASSERT_EQ(lpt::run_cli({"synth-bench", "--out", (dir / "b").string(), "--parallelism", "8"}, kEpoch).status, 0);
  EXPECT_EQ(lpt::snapshot_tree(dir / "a"), lpt::snapshot_tree(dir / "b"));
}

TEST(CliConformance, SyntheticEndpointPasses) {
  const auto r = lpt::run_cli({"conformance", "--endpoint", "synthetic"});
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(CliConformance, ServeSyntheticOverStdio) {
  lpt::TempDir dir;
  ASSERT_EQ(lpt::run_cli({"make-synthetic-dataset", "--out", (dir / "d.jsonl").string(), "--count", "1"}).status, 0);
  const auto self = lpt::shell_quote(LATENTPARA_CLI) + " serve-synthetic --dataset " +
                    lpt::shell_quote((dir / "d.jsonl").string());
  const auto first = json::parse(lpt::read_file(dir / "d.jsonl").substr(0, lpt::read_file(dir / "d.jsonl").find('\n')));
  const auto r = lpt::run_cli({"conformance", "--endpoint", "cmd:" + self, "--sample-id",
                               first["sample_id"].get<std::string>()});
  EXPECT_EQ(r.status, 0) << r.out << r.err;
}

TEST(CliAnalyze, SixteenPointFixtureMatchesBruteForce) {
  lpt::TempDir dir;
  const auto r = lpt::run_cli({"analyze", "--embeddings", fixture("embeddings16.jsonl"), "--out",
                               (dir / "out").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = json::parse(lpt::read_file(dir / "out/report.json"));
  std::vector<latentpara::LabeledEmbedding> points;
  std::istringstream lines(lpt::read_file(fixture("embeddings16.jsonl")));
  for (std::string line; std::getline(lines, line);) {
    const auto j = json::parse(line);
    points.push_back({j["vector"].get<std::vector<double>>(), j["label"].get<std::string>(), j["length"].get<double>()});
  }
  ASSERT_EQ(points.size(), 16u);
  EXPECT_EQ(report["nnr"].get<double>(), lpt::brute_force_nnr(points));
  EXPECT_EQ(report["csr"].get<double>(), lpt::brute_force_csr(points));
}

TEST(CliUnify, SingleInputMatchesEval) {
  lpt::TempDir dir;
  ASSERT_EQ(lpt::run_cli({"eval", "--candidates", fixture("eval_candidates.jsonl"), "--originals",
                          fixture("eval_originals.jsonl"), "--out", (dir / "ev").string()})
                .status,
            0);
  ASSERT_EQ(lpt::run_cli({"unify", fixture("eval_candidates.jsonl"), "--originals", fixture("eval_originals.jsonl"),
                          "--out", (dir / "u").string()})
                .status,
            0);
  EXPECT_EQ(lpt::read_file(dir / "u/curve.json"), lpt::read_file(dir / "ev/curve.json"));
  EXPECT_EQ(lpt::read_file(dir / "u/metrics.csv"), lpt::read_file(dir / "ev/metrics.csv"));
}

TEST(CliConfig, ShippedConfigsLoad) {
  lpt::TempDir dir;
  for (const char* name : {"default.json", "synth_bench.json"}) {
    const auto r = lpt::run_cli({"eval", "--config", kFixtures + "/../../configs/" + name, "--candidates",
                                 fixture("eval_candidates.jsonl"), "--originals", fixture("eval_originals.jsonl"),
                                 "--out", (dir / name).string()});
    EXPECT_EQ(r.status, 0) << name << ": " << r.err;
  }
}

TEST(CliConfig, EnvironmentOverridesApply) {
  lpt::TempDir dir;
  const auto r = lpt::run_cli({"eval", "--candidates", fixture("eval_candidates.jsonl"), "--originals",
                               fixture("eval_originals.jsonl"), "--out", (dir / "ev").string()},
                              "LATENTPARA_EVAL__COSINE_THRESHOLD=0.99");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(lpt::read_file(dir / "ev/metrics.csv"), "mSR,SR_5,SR_10\n0.000000,0.000000,0.000000\n");
  EXPECT_EQ(lpt::run_cli({"eval", "--candidates", fixture("eval_candidates.jsonl"), "--originals",
                          fixture("eval_originals.jsonl"), "--out", (dir / "ev2").string()},
                         "LATENTPARA_EVAL__NOPE=1")
                .status,
            1);
}

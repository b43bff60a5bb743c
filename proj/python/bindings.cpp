#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latentpara/commands.hpp"
#include "latentpara/config.hpp"
#include "latentpara/errors.hpp"
#include "latentpara/eval_protocol.hpp"
#include "latentpara/latent_analysis.hpp"
#include "latentpara/latent_policy.hpp"
#include "latentpara/mask.hpp"
#include "latentpara/ppo.hpp"
#include "latentpara/run_store.hpp"
#include "latentpara/text_checks.hpp"

namespace py = pybind11;
namespace lp = latentpara;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

lp::BinaryMask to_mask(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("mask must be a 2-D array");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  std::vector<std::uint8_t> bits(a.data(), a.data() + w * h);
  for (auto& b : bits) b = b ? 1 : 0;
  return lp::BinaryMask(w, h, std::move(bits));
}

std::vector<lp::LabeledEmbedding> to_embeddings(const Array& vectors, const std::vector<std::string>& labels,
                                                std::optional<std::vector<double>> lengths) {
  if (vectors.ndim() != 2) throw py::value_error("vectors must be a 2-D array");
  const auto n = static_cast<std::size_t>(vectors.shape(0));
  const auto d = static_cast<std::size_t>(vectors.shape(1));
  if (labels.size() != n) throw py::value_error("one label per vector is required");
  if (lengths && lengths->size() != n) throw py::value_error("one length per vector is required");
  std::vector<lp::LabeledEmbedding> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].vector.assign(vectors.data() + i * d, vectors.data() + (i + 1) * d);
    out[i].label = labels[i];
    out[i].length = lengths ? (*lengths)[i] : 1.0;
  }
  return out;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent-space PPO paraphrase attacks: core routines";
  m.attr("__version__") = LATENTPARA_VERSION;

  py::register_exception<lp::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lp::OracleError>(m, "OracleError", PyExc_RuntimeError);

  m.def("softplus", &lp::softplus, py::arg("x"));
  m.def("compute_reward", &lp::compute_reward, py::arg("iou"));
  m.def("importance_ratio", &lp::importance_ratio, py::arg("logp_new"), py::arg("logp_old"));
  m.def("clipped_surrogate", &lp::clipped_surrogate, py::arg("rho"), py::arg("advantage"),
        py::arg("eps_clip") = 0.2);
  m.def(
      "normalize_advantages",
      [](const std::vector<double>& rewards, const std::vector<double>& baselines, double eps_adv) {
        return lp::normalize_advantages(rewards, baselines, eps_adv);
      },
      py::arg("rewards"), py::arg("baselines"), py::arg("eps_adv") = 1e-8);

  m.def(
      "mask_iou",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& b) {
        return lp::mask_iou(to_mask(a), to_mask(b));
      },
      py::arg("a"), py::arg("b"));

  m.def("regex_consistency", [](const std::string& o, const std::string& p) { return lp::regex_consistency(o, p); },
        py::arg("original"), py::arg("paraphrase"));
  m.def(
      "cosine_similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) { return lp::cosine_similarity(a, b); },
      py::arg("a"), py::arg("b"));
  m.def("relative_iou_drop", &lp::relative_iou_drop, py::arg("original_iou"), py::arg("adv_iou"));
  m.def(
      "sr_curve",
      [](const std::vector<std::optional<double>>& drops) {
        const auto c = lp::sr_curve(drops);
        py::dict out;
        out["grid"] = c.grid;
        out["sr"] = c.sr;
        out["msr"] = c.msr;
        out["sr5"] = c.sr5;
        out["sr10"] = c.sr10;
        return out;
      },
      py::arg("best_drops"));

  m.def(
      "nnr",
      [](const Array& v, const std::vector<std::string>& labels, bool normalize) {
        return lp::nnr(to_embeddings(v, labels, std::nullopt), normalize);
      },
      py::arg("vectors"), py::arg("labels"), py::arg("normalize") = true);
  m.def(
      "csr",
      [](const Array& v, const std::vector<std::string>& labels, bool normalize) {
        return lp::csr(to_embeddings(v, labels, std::nullopt), normalize);
      },
      py::arg("vectors"), py::arg("labels"), py::arg("normalize") = false);
  m.def(
      "pearson_all_dims",
      [](const Array& v, const std::vector<double>& lengths, bool normalize) {
        const std::vector<std::string> labels(lengths.size());
        return lp::pearson_all_dims(to_embeddings(v, labels, lengths), normalize);
      },
      py::arg("vectors"), py::arg("lengths"), py::arg("normalize") = true);

  m.def("default_config", [] { return parse_json(lp::config_to_json(lp::ToolConfig{}).dump()); });
  m.def("synth_bench_config", [] { return parse_json(lp::config_to_json(lp::synth_bench_config()).dump()); });

  m.def(
      "synth_bench",
      [](const std::string& out_dir, std::size_t samples, std::optional<std::uint64_t> seed,
         std::optional<std::size_t> parallelism, bool force) {
        lp::SynthBenchOptions o;
        o.out_dir = out_dir;
        o.samples = samples;
        o.force = force;
        o.common.seed = seed;
        o.common.parallelism = parallelism;
        std::ostringstream out, err;
        int status;
        {
          py::gil_scoped_release release;
          status = lp::cmd_synth_bench(o, out, err);
        }
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("out_dir"), py::arg("samples") = 3, py::arg("seed") = py::none(),
      py::arg("parallelism") = py::none(), py::arg("force") = false,
      "Run the synthetic benchmark; returns (exit_status, stdout, stderr).");
}

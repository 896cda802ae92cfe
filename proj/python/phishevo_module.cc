// Copyright 2026 The phishevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phishevo/common.h"
#include "phishevo/attacks.h"
#include "phishevo/detector.h"
#include "phishevo/isolation_forest.h"
#include "phishevo/lda.h"
#include "phishevo/mann_whitney.h"
#include "phishevo/ngram.h"
#include "phishevo/persuasion.h"
#include "phishevo/pipeline.h"
#include "phishevo/tfidf.h"
#include "phishevo/validate.h"

namespace py = pybind11;
using namespace phishevo;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
std::string dumps(const nlohmann::ordered_json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "phishevo native core";
  m.attr("__version__") = PHISHEVO_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<MissingArtifactError>(m, "MissingArtifactError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<BackendError>(m, "BackendError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("f_beta",
        py::overload_cast<double, double, double>(&detector::f_beta),
        py::arg("precision"), py::arg("recall"), py::arg("beta"));

  m.def("mann_whitney", [](const std::vector<double>& a, const std::vector<double>& b) {
    const auto r = textstats::mann_whitney(a, b);
    return py::dict(py::arg("u") = r.u, py::arg("u_a") = r.u_a, py::arg("u_b") = r.u_b,
                    py::arg("z") = r.z, py::arg("p") = r.p);
  });
  m.def("midranks", [](const std::vector<double>& v) { return textstats::midranks(v); });
  m.def("average_path_length", &textstats::average_path_length, py::arg("m"));

  py::class_<textstats::IsolationForest>(m, "IsolationForest")
      .def_static(
          "fit",
          [](const std::vector<std::vector<double>>& rows, std::size_t trees, std::size_t psi,
             std::uint64_t seed, double threshold) {
            textstats::IsoForestConfig c;
            c.trees = trees;
            c.psi = psi;
            c.seed = seed;
            c.threshold = threshold;
            return textstats::IsolationForest::fit(rows, c);
          },
          py::arg("rows"), py::arg("trees") = 100, py::arg("psi") = 256, py::arg("seed") = 0,
          py::arg("threshold") = 0.6)
      .def("score",
           [](const textstats::IsolationForest& f, const std::vector<double>& row) {
             const auto s = f.score(row);
             return py::make_tuple(s.score, s.signed_score, s.anomaly);
           })
      .def("mean_path_length", &textstats::IsolationForest::mean_path_length)
      .def_property_readonly("psi", &textstats::IsolationForest::psi)
      .def("to_json", [](const textstats::IsolationForest& f) { return dumps(f.to_json()); });

  m.def(
      "perplexity",
      [](const std::vector<std::string>& train, const std::string& text, int n, double alpha) {
        return textstats::perplexity(textstats::fit_ngram(train, n, alpha), text);
      },
      py::arg("train"), py::arg("text"), py::arg("n") = 2, py::arg("alpha") = 1.0);

  m.def(
      "tfidf",
      [](const std::vector<std::string>& docs, std::size_t max_features) {
        auto t = textstats::tfidf(docs, max_features);
        return py::make_tuple(t.vocabulary, t.rows);
      },
      py::arg("docs"), py::arg("max_features") = 2000);

  m.def(
      "select_k",
      [](const std::vector<std::string>& docs, const std::vector<std::size_t>& ks,
         std::uint64_t seed, std::size_t iters, std::size_t top_n) {
        auto r = textstats::select_k(docs, ks, seed, iters, top_n);
        return py::make_tuple(r.best_k, r.to_csv());
      },
      py::arg("docs"), py::arg("ks"), py::arg("seed") = 0, py::arg("iters") = 500,
      py::arg("top_n") = 10);

  m.def("parse_verdict", [](const std::string& text) {
    const auto v = validate::parse_verdict(text);
    return py::dict(py::arg("is_phishing") = v.is_phishing,
                    py::arg("phishing_score") = v.phishing_score,
                    py::arg("rationales") = v.rationales);
  });

  m.def(
      "dps",
      [](const std::string& body, const std::filesystem::path& lexicon, double k) {
        return dumps(persuasion::dps(body, persuasion::load_lexicon(lexicon), k).to_json());
      },
      py::arg("body"), py::arg("lexicon"), py::arg("k") = persuasion::kDefaultSaturation);

  m.def("bigram_jaccard", &attacks::bigram_jaccard);

  m.def(
      "run_pipeline",
      [](std::optional<std::filesystem::path> config, const std::vector<std::string>& overrides,
         const std::string& phases, std::optional<std::filesystem::path> from) {
        pipeline::RunOptions opts;
        opts.steps = pipeline::steps_for_phases(phases);
        opts.from = std::move(from);
        py::gil_scoped_release release;
        auto r = pipeline::run_pipeline(pipeline::load_config(config, overrides), opts);
        return r.run_dir;
      },
      py::arg("config") = std::nullopt, py::arg("overrides") = std::vector<std::string>{},
      py::arg("phases") = "ABCD", py::arg("from_dir") = std::nullopt);

  m.def("emit_report",
        [](const std::filesystem::path& run_dir) { return dumps(pipeline::emit_report(run_dir)); });
}

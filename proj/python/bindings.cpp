// Copyright 2026 The qdfair Authors
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

#include <iostream>
#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>
#include <pybind11/iostream.h>

#include "qdfair/analysis.hpp"
#include "qdfair/baseline.hpp"
#include "qdfair/cli.hpp"
#include "qdfair/cmame.hpp"
#include "qdfair/error.hpp"
#include "qdfair/ingest.hpp"
#include "qdfair/sampler.hpp"
#include "qdfair/synth.hpp"

namespace py = pybind11;
using namespace qdfair;

namespace {

py::dict group_dict(const GroupStats& g) {
  py::dict d;
  d["cases"] = g.cases;
  d["positives"] = g.positives;
  d["rate"] = g.rate();
  return d;
}

py::dict report_dict(const SampleReport& r) {
  py::dict d;
  for (const auto& g : r.groups) d[py::str(g.group)] = group_dict(g);
  for (const auto& g : r.cells) d[py::str(g.group)] = group_dict(g);
  return d;
}

py::dict summary_dict(const ModelSummary& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["ratio_x"] = m.ratio_x;
  d["ratio_y"] = m.ratio_y;
  d["deviation"] = m.deviation();
  return d;
}

py::dict elite_dict(const Elite& e) {
  py::dict d;
  d["cell"] = py::make_tuple(e.cell.i, e.cell.j);
  d["accuracy"] = e.accuracy;
  d["ratio_x"] = e.descriptors.ratio_x;
  d["ratio_y"] = e.descriptors.ratio_y;
  d["genome"] = e.genome.values;
  return d;
}

ScenarioSpec resolve_scenario(const std::string& text) {
  if (std::filesystem::is_regular_file(text)) return ScenarioSpec::load(text);
  return ScenarioSpec::builtin(text);
}

}  // namespace

PYBIND11_MODULE(_qdfair, m) {
  m.doc() = "Quality-diversity search over classifier weights with fairness descriptors";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  py::class_<Architecture>(m, "Architecture")
      .def(py::init([](std::vector<int> sizes, double slope, double threshold) {
             Architecture a{std::move(sizes), slope, threshold};
             a.validate();
             return a;
           }),
           py::arg("layer_sizes"), py::arg("leaky_slope") = 0.01, py::arg("threshold") = 0.5)
      .def_static("parse", &Architecture::parse)
      .def_readonly("layer_sizes", &Architecture::layer_sizes)
      .def_readonly("leaky_slope", &Architecture::leaky_slope)
      .def_readonly("threshold", &Architecture::threshold)
      .def_property_readonly("n_inputs", &Architecture::n_inputs)
      .def("__str__", &Architecture::to_string)
      .def("__eq__", [](const Architecture& a, const Architecture& b) { return a == b; });

  m.def("genome_length", &genome_length);

  py::class_<Dataset>(m, "Dataset")
      .def_static(
          "from_arrays",
          [](Eigen::MatrixXd x, std::vector<std::uint8_t> y, std::vector<std::uint8_t> xa,
             std::vector<std::uint8_t> ya) { return Dataset::from_arrays(std::move(x), y, xa, ya); },
          py::arg("features"), py::arg("labels"), py::arg("mask_xa"), py::arg("mask_ya"))
      .def_readonly("features", &Dataset::features)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("mask_xa", &Dataset::mask_xa)
      .def_readonly("mask_xb", &Dataset::mask_xb)
      .def_readonly("mask_ya", &Dataset::mask_ya)
      .def_readonly("mask_yb", &Dataset::mask_yb)
      .def_readonly("feature_names", &Dataset::feature_names)
      .def_readonly("label_x", &Dataset::label_x)
      .def_readonly("label_y", &Dataset::label_y)
      .def_property_readonly("n_cases", &Dataset::n_cases)
      .def_property_readonly("n_features", &Dataset::n_features)
      .def("audit", [](const Dataset& d) { return report_dict(audit(d)); });

  m.def(
      "load_dataset",
      [](const std::filesystem::path& data, const std::filesystem::path& schema) {
        return encode(load_csv(data), SchemaSpec::load(schema));
      },
      py::arg("data"), py::arg("schema"));

  m.def(
      "write_synthetic_table",
      [](const std::filesystem::path& path, std::size_t rows, std::uint64_t seed) {
        save_csv(synthetic_promotion_table(rows, seed), path);
      },
      py::arg("path"), py::arg("rows") = 54808, py::arg("seed") = 0);

  m.def(
      "sample",
      [](const Dataset& source, const std::string& scenario, std::optional<std::uint64_t> seed) {
        ScenarioSpec spec = resolve_scenario(scenario);
        if (seed) spec.seed = *seed;
        SampleResult r = qdfair::sample(source, spec);
        return py::make_tuple(std::move(r.dataset), report_dict(r.report), r.rows);
      },
      py::arg("source"), py::arg("scenario"), py::arg("seed") = py::none());
  m.def("scenario_names", &ScenarioSpec::builtin_names);

  m.def(
      "forward",
      [](const Eigen::VectorXd& genome, const Architecture& arch, const Eigen::MatrixXd& features) {
        ForwardResult r = forward(Genome(genome), arch, features);
        return py::make_tuple(r.probabilities, r.predictions);
      },
      py::arg("genome"), py::arg("arch"), py::arg("features"));

  py::class_<Evaluation>(m, "Evaluation")
      .def_readonly("accuracy", &Evaluation::accuracy)
      .def_readonly("ratio_x", &Evaluation::ratio_x)
      .def_readonly("ratio_y", &Evaluation::ratio_y)
      .def_readonly("mean_xa", &Evaluation::mean_xa)
      .def_readonly("mean_xb", &Evaluation::mean_xb)
      .def_readonly("mean_ya", &Evaluation::mean_ya)
      .def_readonly("mean_yb", &Evaluation::mean_yb);

  m.def(
      "evaluate",
      [](const Eigen::VectorXd& genome, const Architecture& arch, const Dataset& d, double eps) {
        return evaluate(Genome(genome), arch, d, eps);
      },
      py::arg("genome"), py::arg("arch"), py::arg("dataset"), py::arg("epsilon") = kDefaultEpsilon);

  py::class_<Archive>(m, "Archive")
      .def_property_readonly("size", &Archive::size)
      .def_property_readonly("bins", [](const Archive& a) { return a.grid().bins; })
      .def_property_readonly("range", [](const Archive& a) { return py::make_tuple(a.grid().lo, a.grid().hi); })
      .def_property_readonly("clamped_insertions", &Archive::clamped_insertions)
      .def_readonly("label_x", &Archive::label_x)
      .def_readonly("label_y", &Archive::label_y)
      .def("elites",
           [](const Archive& a) {
             py::list out;
             for (const Elite* e : a.elites()) out.append(elite_dict(*e));
             return out;
           })
      .def("best", [](const Archive& a) { return elite_dict(a.best()); })
      .def("save", [](const Archive& a, const std::filesystem::path& p) { save_archive(a, p); })
      .def_static("load", [](const std::filesystem::path& p) { return load_archive(p); })
      .def("__len__", &Archive::size)
      .def("__eq__", [](const Archive& a, const Archive& b) { return a == b; });

  m.def(
      "run",
      [](const Dataset& dataset, const Architecture& arch, std::size_t evals, std::size_t emitters,
         double sigma0, std::uint64_t seed, std::size_t patience, int bins, double lo, double hi,
         double epsilon, std::size_t workers, std::function<void(std::size_t, std::size_t, double)> progress) {
        RunConfig rc;
        rc.arch = arch;
        rc.n_evaluations = evals;
        rc.emitter_count = emitters;
        rc.sigma0 = sigma0;
        rc.seed = seed;
        rc.patience = patience;
        rc.grid = GridSpec{bins, lo, hi};
        rc.epsilon = epsilon;
        rc.workers = workers;
        ProgressFn fn;
        if (progress) {
          fn = [&](const GenerationStats& s) {
            py::gil_scoped_acquire hold;
            progress(s.evaluations, s.archive_size, s.best_accuracy);
          };
        }
        py::gil_scoped_release release;
        return run(rc, dataset, fn);
      },
      py::arg("dataset"), py::arg("arch"), py::arg("evals") = 100000, py::arg("emitters") = 5,
      py::arg("sigma0") = 0.5, py::arg("seed") = 0, py::arg("patience") = 5, py::arg("bins") = 30,
      py::arg("lo") = 0.0, py::arg("hi") = 2.0, py::arg("epsilon") = kDefaultEpsilon, py::arg("workers") = 1,
      py::arg("progress") = nullptr);

  m.def("deviation", py::overload_cast<double, double>(&deviation));
  m.def(
      "in_fair_zone",
      [](double x, double y, double lower, double upper) {
        FairZone z{lower, upper};
        z.validate();
        return in_fair_zone(x, y, z);
      },
      py::arg("ratio_x"), py::arg("ratio_y"), py::arg("lower") = 0.8, py::arg("upper") = 1.25);

  m.def(
      "tradeoff",
      [](const Archive& a, double lower, double upper) {
        const TradeoffReport r = tradeoff(a, FairZone{lower, upper});
        py::dict d;
        d["best"] = summary_dict(r.best);
        d["best_fair"] = r.best_fair ? py::object(summary_dict(*r.best_fair)) : py::none();
        d["accuracy_gap"] = r.accuracy_gap() ? py::object(py::float_(*r.accuracy_gap())) : py::none();
        d["deviation_reduction"] =
            r.deviation_reduction() ? py::object(py::float_(*r.deviation_reduction())) : py::none();
        d["clamped_insertions"] = r.clamped_insertions;
        return d;
      },
      py::arg("archive"), py::arg("lower") = 0.8, py::arg("upper") = 1.25);

  m.def("heatmap", [](const Archive& a) { return heatmap_grid(a); });
  m.def(
      "export_heatmap",
      [](const Archive& a, const std::filesystem::path& prefix, double lower, double upper) {
        heatmap_export(a, prefix, FairZone{lower, upper});
      },
      py::arg("archive"), py::arg("prefix"), py::arg("lower") = 0.8, py::arg("upper") = 1.25);
  m.def("pearson", [](std::vector<double> x, std::vector<double> y) { return pearson(x, y); });

  m.def(
      "train",
      [](const Dataset& d, const Architecture& arch, double lr, std::size_t epochs, std::size_t folds,
         std::uint64_t seed) {
        TrainConfig c;
        c.learning_rate = lr;
        c.epochs = epochs;
        c.folds = folds;
        c.seed = seed;
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(d, arch, c);
        }
        return py::make_tuple(r.genome.values, r.cv_accuracy, r.fold_accuracies);
      },
      py::arg("dataset"), py::arg("arch"), py::arg("learning_rate") = 0.05, py::arg("epochs") = 500,
      py::arg("folds") = 10, py::arg("seed") = 0);

  m.def(
      "main",
      [](std::vector<std::string> args) {
        py::scoped_ostream_redirect out(std::cout, py::module_::import("sys").attr("stdout"));
        py::scoped_ostream_redirect err(std::cerr, py::module_::import("sys").attr("stderr"));
        return cli::run(args, std::cout, std::cerr);
      },
      py::arg("args"));
}

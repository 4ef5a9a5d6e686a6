#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.hpp"
#include "conecusp/metric.hpp"
#include "conecusp/parallel.hpp"
#include "conecusp/schwarzian.hpp"

namespace py = pybind11;
using namespace conecusp;

namespace {

MeromorphicSum from_pairs(const std::vector<std::pair<Complex, Complex>>& pairs) {
  std::vector<Term> terms;
  terms.reserve(pairs.size());
  for (const auto& [a, z] : pairs) terms.push_back({a, z});
  return MeromorphicSum(std::move(terms));
}

py::dict report_dict(const SingularityReport& r) {
  py::dict d;
  d["location"] = r.location;
  d["kind"] = std::string(to_string(r.kind));
  d["source"] = std::string(to_string(r.source));
  d["theta"] = r.theta;
  d["angle"] = r.angle();
  d["c2"] = r.c2;
  d["c1"] = r.c1;
  d["indicial"] = r.indicial;
  d["multiplicity"] = r.multiplicity;
  d["flag"] = r.flag;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Meromorphic sums, developing maps and the induced hyperbolic metrics";
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<MeromorphicSum>(m, "Sum")
      .def(py::init(&from_pairs), py::arg("terms"),
           "Finite sum of residue / (z - pole) from (residue, pole) pairs.")
      .def_static("h0", &MeromorphicSum::h0, py::arg("tail_start"))
      .def_property_readonly("terms",
                             [](const MeromorphicSum& h) {
                               std::vector<std::pair<Complex, Complex>> out;
                               for (const auto& t : h.terms()) out.emplace_back(t.residue, t.pole);
                               return out;
                             })
      .def_property_readonly("is_finite", &MeromorphicSum::is_finite)
      .def_property_readonly("separation", &MeromorphicSum::separation)
      .def("__len__", &MeromorphicSum::size)
      .def("__call__", [](const MeromorphicSum& h, Complex z) { return eval(h, z).value; })
      .def("derivatives", [](const MeromorphicSum& h, Complex z) {
        const auto d = eval_derivatives(h, z, 2);
        return std::vector<Complex>(d.values.begin(), d.values.end());
      });

  m.def("truncate", [](const MeromorphicSum& h, Complex center, double radius, double tol) {
    auto t = truncate(h, Disc{center, radius}, tol);
    return py::make_tuple(t.sum, t.error, t.last_index);
  }, py::arg("h"), py::arg("center"), py::arg("radius"), py::arg("tol") = 1e-10);

  m.def("locate_zeros", [](const MeromorphicSum& h, Complex center, double radius, double tol) {
    ZeroSearchOptions opt;
    opt.tol = tol;
    py::list out;
    for (const auto& z : locate_zeros(h, Disc{center, radius}, opt)) {
      py::dict d;
      d["location"] = z.location;
      d["multiplicity"] = z.multiplicity;
      d["residual"] = z.refinement_residual;
      out.append(d);
    }
    return out;
  }, py::arg("h"), py::arg("center"), py::arg("radius"), py::arg("tol") = 1e-12);

  m.def("winding_count", [](const MeromorphicSum& h, Complex center, double radius,
                            std::size_t nodes) { return winding_count(h, Circle(center, radius, nodes)).count; },
        py::arg("h"), py::arg("center"), py::arg("radius"), py::arg("nodes") = 64,
        "Zeros minus poles inside the circle.");

  m.def("schwarzian", &schwarzian_from_h, py::arg("h"), py::arg("z"));
  m.def("indicial_exponents", &indicial_exponents, py::arg("c2"));
  m.def("classify", [](const MeromorphicSum& h, Complex center, double radius, double class_tol) {
    ClassifyOptions opt;
    opt.class_tol = class_tol;
    py::list out;
    for (const auto& r : classify_all(h, Disc{center, radius}, opt)) out.append(report_dict(r));
    return out;
  }, py::arg("h"), py::arg("center"), py::arg("radius"), py::arg("class_tol") = 1e-6);

  py::class_<DevelopingMap>(m, "DevelopingMap")
      .def(py::init([](const MeromorphicSum& h, std::optional<Complex> base) {
             return base ? DevelopingMap(h, *base) : DevelopingMap(h);
           }),
           py::arg("h"), py::arg("base") = py::none())
      .def_property_readonly("base", &DevelopingMap::base)
      .def("integral", [](const DevelopingMap& map, Complex z) { return map.integral(z).value; })
      .def("f", [](const DevelopingMap& map, double lambda, Complex z) {
        return map.sample(lambda, z).value;
      }, py::arg("lam"), py::arg("z"));

  m.def("monodromy", [](const MeromorphicSum& h, std::size_t index) {
    const auto r = monodromy(h, index);
    return py::make_tuple(r.translation, r.raw);
  }, py::arg("h"), py::arg("index"));

  m.def("estimate_lambda0", [](const DevelopingMap& map, Complex center, double radius,
                               double resolution) {
    const auto e = estimate_lambda0(map, Disc{center, radius}, resolution);
    py::dict d;
    d["value"] = e.value;
    d["margin"] = e.margin;
    d["argmax"] = e.argmax;
    d["points"] = e.points;
    return d;
  }, py::arg("map"), py::arg("center"), py::arg("radius"), py::arg("resolution") = 0.05);

  py::class_<DensityField>(m, "DensityField")
      .def(py::init<DevelopingMap, double>(), py::arg("map"), py::arg("lam"))
      .def_property_readonly("lam", &DensityField::lambda)
      .def("u", &DensityField::u, py::arg("z"));

  m.def("curvature_check", [](const DensityField& field, const std::vector<Complex>& points,
                              double stencil, const std::vector<Complex>& singular) {
    const auto r = curvature_check(field, points, stencil, singular);
    py::dict d;
    d["max_abs_deviation"] = r.max_abs_deviation;
    d["curvature"] = py::array_t<double>(r.curvature.size(), r.curvature.data());
    return d;
  }, py::arg("field"), py::arg("points"), py::arg("stencil") = 0.0,
        py::arg("singular") = std::vector<Complex>{});

  m.def("measure_cone_angle", [](const DensityField& field, Complex p, double r1, double r2,
                                 std::size_t nodes) {
    return measure_cone_angle(field, p, r1, r2, nodes).theta;
  }, py::arg("field"), py::arg("p"), py::arg("r1"), py::arg("r2"), py::arg("nodes") = 512);

  m.def("sample_grid", [](const DensityField& field, std::array<double, 4> window, double spacing,
                          std::optional<std::vector<Complex>> zeros) {
    GridOptions opt;
    if (zeros) {
      opt.zeros = *zeros;
      opt.locate = false;
    }
    const auto g = sample_grid(field, Rect{window[0], window[1], window[2], window[3]}, spacing, opt);
    py::array_t<double> u({g.ny, g.nx});
    py::array_t<bool> mask({g.ny, g.nx});
    auto uu = u.mutable_unchecked<2>();
    auto mm = mask.mutable_unchecked<2>();
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
      for (std::size_t ix = 0; ix < g.nx; ++ix) {
        uu(iy, ix) = g.u[iy * g.nx + ix];
        mm(iy, ix) = g.mask[iy * g.nx + ix] != 0;
      }
    }
    return py::make_tuple(u, mask);
  }, py::arg("field"), py::arg("window"), py::arg("spacing"), py::arg("zeros") = py::none(),
        "u and mask as (ny, nx) arrays; window is (x_min, x_max, y_min, y_max).");

  m.def("rouche_report", [](int n) {
    const auto r = cli::rouche_report(n);
    return py::module_::import("json").attr("loads")(cli::to_text(cli::to_json(r)));
  }, py::arg("n"));

  m.def("set_threads", &set_thread_count, py::arg("n"));

  m.def("run", [](const std::string& command, std::optional<std::string> config,
                  std::optional<std::string> config_text, std::optional<std::string> out,
                  unsigned threads, std::vector<std::string> tol, std::uint64_t seed, int n_max) {
    cli::RunOptions opt;
    opt.config_path = std::move(config);
    opt.config_text = std::move(config_text);
    opt.out_dir = std::move(out);
    opt.threads = threads;
    opt.tol_overrides = std::move(tol);
    opt.seed = seed;
    opt.n_max = n_max;
    const auto o = cli::run(command, opt);
    return py::make_tuple(o.exit_code, o.out, o.err);
  }, py::arg("command"), py::arg("config") = py::none(), py::arg("config_text") = py::none(),
        py::arg("out") = py::none(), py::arg("threads") = 1,
        py::arg("tol") = std::vector<std::string>{}, py::arg("seed") = 1, py::arg("n_max") = 12,
        "Runs a command-line subcommand in-process; returns (exit_code, stdout, stderr).");
}

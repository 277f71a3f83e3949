#include "wsob/cli.hpp"
#include "wsob/experiments.hpp"
#include "wsob/geometry.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace wsob;

namespace {

Vec to_vec(const std::vector<double>& v) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) throw ParameterError("bad point dimension");
  Vec x(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
  return x;
}

std::vector<double> from_vec(const Vec& x) { return {x.data(), x.data() + x.size()}; }

py::array_t<double> from_mat(const Mat& m) {
  py::array_t<double> a({m.rows(), m.cols()});
  auto r = a.mutable_unchecked<2>();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return a;
}

py::array_t<double> from_rank3(const Rank3& t) {
  const py::ssize_t n = t.dim();
  py::array_t<double> a({n, n, n});
  auto r = a.mutable_unchecked<3>();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r(i, j, k) = t(i, j, k);
  return a;
}

Box to_box(const std::vector<double>& lo, const std::vector<double>& hi) { return Box{to_vec(lo), to_vec(hi)}; }

py::dict box_dict(const Box& b) {
  py::dict d;
  d["lo"] = from_vec(b.lo);
  d["hi"] = from_vec(b.hi);
  return d;
}

py::object parse_json(const std::string& s) { return py::module_::import("json").attr("loads")(s); }

}  // namespace

PYBIND11_MODULE(_wsob, m) {
  m.doc() = "Admissible radii, coverings and weighted Sobolev norms on charted manifolds";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Manifold>(m, "Manifold")
      .def_property_readonly("dim", &Manifold::dim)
      .def_property_readonly("kind", [](const Manifold& M) { return M.spec().kind; })
      .def_property_readonly("window", [](const Manifold& M) { return box_dict(M.window()); })
      .def_property_readonly("cover_window", [](const Manifold& M) { return box_dict(M.cover_window()); })
      .def("set_cover_window",
           [](Manifold& M, const std::vector<double>& lo, const std::vector<double>& hi) {
             M.set_cover_window(to_box(lo, hi));
           })
      .def("metric", [](const Manifold& M, const std::vector<double>& x) { return from_mat(M.metric(to_vec(x))); })
      .def("partials",
           [](const Manifold& M, const std::vector<double>& x) { return from_rank3(M.partials(to_vec(x))); })
      .def("volume_element",
           [](const Manifold& M, const std::vector<double>& x) { return M.volume_element(to_vec(x)); })
      .def("oracle", &Manifold::oracle, py::arg("name"), py::arg("arg") = 0.0)
      .def("to_json", [](const Manifold& M) { return M.spec().to_json(); });

  m.def(
      "builtin",
      [](const std::string& kind, int n, const std::map<std::string, double>& params) {
        return make_builtin(kind, n, params);
      },
      py::arg("kind"), py::arg("n"), py::arg("params") = std::map<std::string, double>{});
  m.def(
      "builtin_window",
      [](const std::string& kind, int n, const std::vector<double>& lo, const std::vector<double>& hi,
         const std::map<std::string, double>& params) { return make_builtin(kind, n, params, to_box(lo, hi)); },
      py::arg("kind"), py::arg("n"), py::arg("lo"), py::arg("hi"),
      py::arg("params") = std::map<std::string, double>{});
  m.def("load_manifold", &load_manifold, py::arg("path"));
  m.def("manifold_from_json", [](const std::string& s) { return make_manifold(ManifoldSpec::from_json(s)); });

  m.def("christoffel", [](const Manifold& M, const std::vector<double>& x) {
    return from_rank3(christoffel(M, to_vec(x)));
  });
  m.def("sectional_curvature",
        [](const Manifold& M, const std::vector<double>& x, const std::vector<double>& v,
           const std::vector<double>& w) { return sectional_curvature(M, to_vec(x), to_vec(v), to_vec(w)); });
  m.def("ricci_eigenvalues",
        [](const Manifold& M, const std::vector<double>& x) { return from_vec(ricci_eigenvalues(M, to_vec(x))); });

  m.def(
      "is_admissible",
      [](const Manifold& M, const std::vector<double>& x, double R, int cls, double eps) {
        Admissibility a = is_admissible(M, to_vec(x), R, cls, eps, BallSampler(M.dim()));
        py::dict d;
        d["ok"] = a.ok;
        d["reason"] = a.reason;
        d["eig_min"] = a.eig_min;
        d["eig_max"] = a.eig_max;
        d["dg_term"] = a.dg_term;
        return d;
      },
      py::arg("manifold"), py::arg("x"), py::arg("R"), py::arg("cls") = 0, py::arg("epsilon") = 0.1);
  m.def(
      "admissible_radius",
      [](const Manifold& M, const std::vector<double>& x, int cls, double eps) {
        return admissible_radius(M, to_vec(x), cls, eps);
      },
      py::arg("manifold"), py::arg("x"), py::arg("cls") = 0, py::arg("epsilon") = 0.1);

  py::class_<RadiusField>(m, "RadiusField")
      .def(py::init([](const Manifold& M, int cls, double eps, int per_axis) {
             return RadiusField::over_window(M, cls, eps, per_axis);
           }),
           py::arg("manifold"), py::arg("cls") = 0, py::arg("epsilon") = 0.1, py::arg("per_axis") = 0)
      .def("__call__", [](const RadiusField& f, const std::vector<double>& x) { return f.at(to_vec(x)); })
      .def_property_readonly("dims", &RadiusField::dims)
      .def_property_readonly("min", &RadiusField::min_radius)
      .def_property_readonly("max", &RadiusField::max_radius)
      .def("csv", [](const RadiusField& f) {
        RadiusField f1(f.manifold(), f.box(), f.dims(), 1, f.epsilon(), f.sampler_level());
        return radius_csv(f.cls() == 0 ? f : f1, f.cls() == 0 ? f1 : f);
      });

  m.def(
      "cover",
      [](const Manifold& M, const RadiusField& field, double grid_pitch) {
        CoverOptions opt;
        opt.grid_pitch = grid_pitch;
        return parse_json(cover_report(M, field, opt).dump(-1));
      },
      py::arg("manifold"), py::arg("field"), py::arg("grid_pitch") = 0.0);
  m.def("overlap_bound", &overlap_bound, py::arg("n"), py::arg("epsilon"));

  py::class_<FormField>(m, "FormField")
      .def_property_readonly("degree", &FormField::degree)
      .def_property_readonly("dim", &FormField::dim)
      .def("__call__", [](const FormField& f, const std::vector<double>& x) { return f.value(to_vec(x)); });
  m.def(
      "bump",
      [](const std::vector<double>& c, const std::vector<double>& radii, double amp) {
        return scalar_form(ScalarField::bump(Bump::ellipsoid(to_vec(c), to_vec(radii)), amp));
      },
      py::arg("center"), py::arg("radii"), py::arg("amp") = 1.0);
  m.def("constant", [](int n, double c) { return scalar_form(ScalarField::poly(Polynomial::constant(n, c))); });
  m.def("d", &exterior_derivative);

  m.def(
      "lp_norm",
      [](const Manifold& M, const FormField& f, double tau, const RadiusField* field, double gamma, int nodes) {
        return lp_norm(M, f, M.window(), tau, Weight{field, gamma}, nodes);
      },
      py::arg("manifold"), py::arg("field"), py::arg("tau"), py::arg("weight_field") = nullptr,
      py::arg("gamma") = 0.0, py::arg("nodes") = kWindowNodes);
  m.def(
      "sobolev_norm",
      [](const Manifold& M, const FormField& f, int k, double r, const RadiusField* field, double gamma, int nodes) {
        return sobolev_norm(M, f, M.window(), k, r, Weight{field, gamma}, nodes);
      },
      py::arg("manifold"), py::arg("field"), py::arg("k"), py::arg("r"), py::arg("weight_field") = nullptr,
      py::arg("gamma") = 0.0, py::arg("nodes") = kWindowNodes);
  m.def("sobolev_exponents", [](int n, int mm, int k, double r, double gamma) {
    SobolevParams p = SobolevParams::make(n, mm, k, r, gamma);
    return py::make_tuple(p.s, p.nu);
  });

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"wsob"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

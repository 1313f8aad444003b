#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heunpulse/dynamics.hpp"
#include "heunpulse/heun.hpp"
#include "heunpulse/mapping.hpp"
#include "heunpulse/pulseshape.hpp"

namespace py = pybind11;
using namespace heunpulse;

namespace {

ModelParams model(cplx a, cplx U0star, cplx d1, cplx d2, cplx d3, double Delta) {
  ModelParams p;
  p.a = a;
  p.U0star = U0star;
  p.d1 = d1;
  p.d2 = d2;
  p.d3 = d3;
  p.Delta = Delta;
  return p;
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict trace_dict(const PulseTrace& tr) {
  py::dict d;
  d["t"] = to_array(tr.t);
  d["z"] = to_array(tr.z);
  d["U"] = to_array(tr.U);
  d["delta_t"] = to_array(tr.delta_t);
  d["normalization"] = tr.normalization;
  d["max_imag_ratio"] = tr.max_imag_ratio;
  d["clamped_points"] = tr.clamped_points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-state models solvable by the general Heun function";

  py::register_exception<ResonanceError>(m, "ResonanceError", PyExc_ArithmeticError);
  py::register_exception<StepUnderflow>(m, "StepUnderflow", PyExc_RuntimeError);

  m.def("enumerate_classes", [] {
    std::vector<std::string> out;
    for (const auto& id : enumerate_classes()) out.push_back(to_string(id));
    return out;
  });
  m.def("class_info", [](const std::string& cls) {
    const ClassId id = parse_class(cls);
    py::dict d;
    d["class"] = to_string(id);
    d["k"] = std::array<double, 3>{id.k1(), id.k2(), id.k3()};
    d["finite_area"] = finite_area(id);
    d["phi_trivial"] = phi_exponents_trivial(id);
    d["complex_line"] = complex_line_admissible(id);
    d["amplitude"] = amplitude_formula(id);
    return d;
  }, py::arg("cls"));
  m.def("realizing_u0star", [](const std::string& cls, double U0) { return realizing_u0star(parse_class(cls), U0); },
        py::arg("cls"), py::arg("U0") = 1.0);

  m.def("heun_params_json",
        [](const std::string& cls, cplx a, cplx U0star, cplx d1, cplx d2, cplx d3,
           std::optional<std::array<int, 3>> branch) {
          const ClassId id = parse_class(cls);
          const ModelParams p = model(a, U0star, d1, d2, d3, 1.0);
          const auto choice = branch ? choose_exponents(id, p, *branch) : default_exponents(id, p);
          return to_json(heun_params(id, p, choice)).dump();
        },
        py::arg("cls"), py::arg("a"), py::arg("U0star"), py::arg("d1"), py::arg("d2"), py::arg("d3"),
        py::arg("branch") = py::none());

  m.def("heun_eval",
        [](cplx a, cplx q, cplx alpha, cplx beta, cplx gamma, cplx delta, cplx epsilon, cplx z, cplx mu) {
          HeunParams hp;
          hp.a = a;
          hp.q = q;
          hp.alpha = alpha;
          hp.beta = beta;
          hp.gamma = gamma;
          hp.delta = delta;
          hp.epsilon = epsilon;
          hp.validate(1e-10);
          const HeunValue v = heun_eval(hp, mu, z);
          return std::pair{v.value, v.derivative};
        },
        py::arg("a"), py::arg("q"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("delta"),
        py::arg("epsilon"), py::arg("z"), py::arg("mu") = cplx{0.0});

  py::class_<FieldConfiguration>(m, "Field")
      .def_static("constant_detuning",
                  [](const std::string& cls, double a, cplx U0star, double d1, double d2, double d3, double Delta) {
                    return FieldConfiguration::constant_detuning(parse_class(cls), model(a, U0star, d1, d2, d3, Delta));
                  },
                  py::arg("cls"), py::arg("a"), py::arg("U0star"), py::arg("d1"), py::arg("d2"), py::arg("d3"),
                  py::arg("Delta") = 1.0)
      .def_static("complex_line",
                  [](const std::string& cls, double a0, double lambda1, double lambda2, double lambda3, double U0,
                     double Delta) {
                    return FieldConfiguration::complex_line(parse_class(cls),
                                                            ComplexLineSpec{a0, lambda1, lambda2, lambda3, U0}, Delta);
                  },
                  py::arg("cls"), py::arg("a0") = -2.0, py::arg("lambda1") = 1.0, py::arg("lambda2") = 0.0,
                  py::arg("lambda3") = 2.0, py::arg("U0") = 1.0, py::arg("Delta") = 1.0)
      .def_static("periodic",
                  [](const std::string& cls, double a, double U0, double Delta) {
                    return FieldConfiguration::periodic(parse_class(cls), PeriodicSpec{a, U0, 0.0, 0.0}, Delta);
                  },
                  py::arg("cls"), py::arg("a") = 0.25, py::arg("U0") = 1.0, py::arg("Delta") = 1.0)
      .def_static("constant_amplitude",
                  [](double a, double U0, double Delta1, double Delta2, double Delta) {
                    return FieldConfiguration::constant_amplitude(ClassId{-2, 0, 0},
                                                                  PeriodicSpec{a, U0, Delta1, Delta2}, Delta);
                  },
                  py::arg("a") = 0.25, py::arg("U0") = 1.0, py::arg("Delta1") = 0.0, py::arg("Delta2") = 0.0,
                  py::arg("Delta") = 1.0)
      .def_property_readonly("cls", [](const FieldConfiguration& f) { return to_string(f.class_id()); })
      .def_property_readonly("kind", [](const FieldConfiguration& f) { return to_string(f.kind()); })
      .def("at",
           [](const FieldConfiguration& f, double t) {
             const FieldPoint p = f.at(t);
             py::dict d;
             d["z"] = p.z;
             d["dz_dt"] = p.dz_dt;
             d["U"] = p.U;
             d["delta_t"] = p.delta_t;
             d["clamped"] = p.clamped;
             return d;
           },
           py::arg("t"))
      .def("sample", [](const FieldConfiguration& f, const std::vector<double>& t) { return trace_dict(sample(f, t)); },
           py::arg("t"))
      .def("verify_json",
           [](const FieldConfiguration& f, double rel_tol, int n_points, std::optional<std::pair<double, double>> z_interval,
              std::optional<std::pair<double, double>> t_interval) {
             VerifyOptions o;
             o.rel_tol = rel_tol;
             o.n_points = n_points;
             if (z_interval) o.z_interval = *z_interval;
             o.t_interval = t_interval;
             py::gil_scoped_release release;
             return to_json(verify_class(f, o)).dump();
           },
           py::arg("rel_tol") = 1e-12, py::arg("n_points") = 81, py::arg("z_interval") = py::none(),
           py::arg("t_interval") = py::none())
      .def("integrate",
           [](const FieldConfiguration& f, double t0, const std::vector<double>& t_out, cplx a1, cplx a2,
              double rel_tol) {
             Trajectory tr;
             {
               py::gil_scoped_release release;
               tr = integrate_two_state(field_function(f), t0, t_out, {a1, a2}, rel_tol);
             }
             py::dict d;
             d["t"] = to_array(tr.t);
             d["a1"] = to_array(tr.a1);
             d["a2"] = to_array(tr.a2);
             d["delta"] = to_array(tr.delta);
             d["norm_drift"] = tr.norm_drift;
             return d;
           },
           py::arg("t0"), py::arg("t_out"), py::arg("a1") = cplx{1.0}, py::arg("a2") = cplx{0.0},
           py::arg("rel_tol") = 1e-12);

  m.def("narrow_pulse_roots",
        [](const std::string& free, double a, double d1, double d2, double d3) {
          if (free != "a" && free != "d3") throw std::invalid_argument("free must be 'a' or 'd3'");
          py::list out;
          for (const auto& r : narrow_pulse_roots(free == "a" ? FreeParameter::a : FreeParameter::d3, a, d1, d2, d3)) {
            py::dict d;
            d["value"] = r.value;
            d["z0"] = r.z0;
            d["discriminant"] = r.discriminant;
            d["admissible"] = r.admissible;
            d["reason"] = r.reason;
            out.append(d);
          }
          return out;
        },
        py::arg("free"), py::arg("a"), py::arg("d1"), py::arg("d2"), py::arg("d3") = 0.0);
  m.def("crossing_discriminant", &crossing_discriminant, py::arg("a"), py::arg("d1"), py::arg("d2"), py::arg("d3"));
  m.def("wall_positions",
        [](double a, double d1, double d2, double d3, double Delta) {
          const WallPositions w = wall_positions(a, d1, d2, d3, Delta);
          py::dict d;
          d["t0"] = w.t0;
          d["t1"] = w.t1;
          d["t2"] = w.t2;
          d["width"] = w.width;
          return d;
        },
        py::arg("a"), py::arg("d1"), py::arg("d2"), py::arg("d3"), py::arg("Delta") = 1.0);
  m.def("matched_pair", &matched_pair, py::arg("a"), py::arg("d3"), py::arg("a_target"));
  m.def("lambert_w", &lambert_w, py::arg("branch"), py::arg("x"));
  m.def("peak_metrics",
        [](const std::vector<double>& t, const std::vector<double>& U) {
          const PeakMetrics pm = peak_metrics(t, U);
          py::dict d;
          py::list peaks;
          for (const auto& p : pm.peaks) peaks.append(py::make_tuple(p.t, p.height));
          d["peaks"] = peaks;
          d["fwhm"] = pm.fwhm;
          d["area"] = pm.area;
          d["max_abs"] = pm.max_abs;
          return d;
        },
        py::arg("t"), py::arg("U"));
}

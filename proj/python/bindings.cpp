#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <sstream>

#include "cnprop/abc.hpp"
#include "cnprop/analysis.hpp"
#include "cnprop/error.hpp"
#include "cnprop/physics.hpp"
#include "cnprop/propagator.hpp"
#include "cnprop/scenario.hpp"
#include "cnprop/tridiag.hpp"

namespace py = pybind11;
using namespace cnprop;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ComplexVector to_vector(const ComplexArray& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::ShapeMismatch, "expected a 1-D array");
  return ComplexVector(a.data(), a.data() + a.size());
}

RealVector to_vector(const RealArray& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::ShapeMismatch, "expected a 1-D array");
  return RealVector(a.data(), a.data() + a.size());
}

py::array_t<Complex> to_array(std::span<const Complex> v) {
  return py::array_t<Complex>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<Complex> to_array(const DenseMatrix& m) {
  const auto n = static_cast<py::ssize_t>(m.size());
  py::array_t<Complex> out({n, n});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

TridiagonalMatrix make_matrix(const ComplexArray& diag, const ComplexArray& super,
                              const ComplexArray& sub) {
  return {to_vector(diag), to_vector(super), to_vector(sub)};
}

Side parse_side(const std::string& s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw Error(ErrorCode::InvalidArgument, "side must be 'left' or 'right'");
}

Strategy parse_strategy(const std::string& s) {
  if (s == "solve") return Strategy::TridiagonalSolve;
  if (s == "dense") return Strategy::DenseInverse;
  throw Error(ErrorCode::InvalidArgument, "strategy must be 'solve' or 'dense'");
}

// Evolution operator plus its stepping state.
class Propagator {
 public:
  Propagator(double x_min, double x_max, std::size_t n_sites, const RealArray& potential,
             double dt, const std::string& boundary, double alpha1, double alpha2,
             const std::string& strategy)
      : op_(make_operator(SpatialGrid(x_min, x_max, n_sites), to_vector(potential), dt, boundary,
                          alpha1, alpha2, parse_strategy(strategy))) {}

  void set_source(Complex s0, double omega, double x, std::optional<double> ramp) {
    SourceSpec s;
    s.s0 = s0;
    s.omega = omega;
    s.ramp = ramp;
    s.site = op_.grid().nearest_site(x);
    source_ = s;
  }

  py::array_t<Complex> evolve(const ComplexArray& psi, std::size_t n_steps, std::size_t first_step) {
    ComplexVector state = to_vector(psi);
    Stepper stepper(op_, source_);
    {
      py::gil_scoped_release release;
      for (std::size_t k = 0; k < n_steps; ++k) stepper.advance(state, first_step + k);
    }
    return to_array(state);
  }

  const EvolutionOperator& op() const { return op_; }

 private:
  static EvolutionOperator make_operator(const SpatialGrid& grid, const RealVector& v, double dt,
                                         const std::string& boundary, double alpha1,
                                         double alpha2, Strategy strategy) {
    if (boundary == "dirichlet") return with_strategy(build_dirichlet(grid, v, dt), strategy);
    if (boundary == "abc") {
      return with_strategy(build_abc(grid, v, dt, abc_coefficients(alpha1, alpha2, Side::Left),
                                     abc_coefficients(alpha1, alpha2, Side::Right)),
                           strategy);
    }
    throw Error(ErrorCode::InvalidArgument, "boundary must be 'dirichlet' or 'abc'");
  }

  EvolutionOperator op_;
  std::optional<SourceSpec> source_;
};

py::dict report_dict(const RunReport& r) {
  py::dict d;
  d["steps"] = r.steps_run;
  d["frames"] = r.frame_count;
  d["initial_norm"] = r.initial_norm;
  d["final_norm"] = r.final_norm;
  d["max_step_drift"] = r.max_step_drift;
  d["cumulative_drift"] = r.cumulative_drift;
  d["norms"] = py::array_t<double>(static_cast<py::ssize_t>(r.norms.size()), r.norms.data());
  d["interval_probability"] = r.interval_probability;
  d["omega"] = r.omega;
  d["steady_state_error"] = r.steady_state_error;
  if (r.transmission) {
    d["transmission"] = r.transmission->t_numeric;
    d["settle_steps"] = r.transmission->settle_steps;
  }
  d["transmission_analytic"] = r.transmission_analytic;
  py::list sweep;
  for (const auto& p : r.sweep) {
    py::dict point;
    point["value"] = p.value;
    point["t_numeric"] = p.t_numeric;
    point["t_analytic"] = p.t_analytic;
    point["settle_steps"] = p.settle_steps;
    sweep.append(point);
  }
  d["sweep"] = sweep;
  d["seconds_per_step"] = r.seconds_per_step;
  d["warnings"] = r.warnings;
  return d;
}

RunConfig resolve(const std::optional<std::string>& preset, const std::optional<std::string>& text,
                  const std::map<std::string, std::string>& overrides) {
  RunConfig c = preset ? find_preset(*preset).config : RunConfig{};
  if (text) c = parse_config(*text, c);
  for (const auto& [k, v] : overrides) set_config_value(c, k, v);
  return c;
}

}  // namespace

PYBIND11_MODULE(_cnprop, m) {
  m.doc() = "Crank-Nicolson propagation of the 1D time-dependent Schroedinger equation.";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "Error", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = std::string(to_string(e.code())) + ": " + e.what();
      PyErr_SetString(error_type.get_stored().ptr(), message.c_str());
    }
  });

  m.def(
      "grid_positions",
      [](double x_min, double x_max, std::size_t n) {
        const auto xs = SpatialGrid(x_min, x_max, n).positions();
        return py::array_t<double>(static_cast<py::ssize_t>(xs.size()), xs.data());
      },
      py::arg("x_min"), py::arg("x_max"), py::arg("n_sites"));

  m.def(
      "gaussian_packet",
      [](double x_min, double x_max, std::size_t n, double x0, double p0, double sigma0) {
        const auto packet = gaussian_packet(SpatialGrid(x_min, x_max, n), {x0, p0, sigma0});
        return to_array(packet.psi.amplitudes());
      },
      py::arg("x_min"), py::arg("x_max"), py::arg("n_sites"), py::arg("x0"), py::arg("p0"),
      py::arg("sigma0"));

  m.def(
      "square_potential",
      [](double x_min, double x_max, std::size_t n, const std::string& kind, double xb,
         std::optional<double> height, double p0) {
        PotentialSpec spec;
        if (kind == "barrier") {
          spec.kind = PotentialKind::SquareBarrier;
        } else if (kind == "well") {
          spec.kind = PotentialKind::SquareWell;
        } else if (kind != "free") {
          throw Error(ErrorCode::InvalidArgument, "kind must be 'free', 'barrier' or 'well'");
        }
        spec.xb = xb;
        spec.height = height;
        const auto v = sample_potential(SpatialGrid(x_min, x_max, n), spec, p0);
        return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
      },
      py::arg("x_min"), py::arg("x_max"), py::arg("n_sites"), py::arg("kind"), py::arg("xb"),
      py::arg("height") = py::none(), py::arg("p0") = 0.0);

  m.def(
      "abc_coefficients",
      [](double a1, double a2, const std::string& side) {
        const auto g = abc_coefficients(a1, a2, parse_side(side));
        return py::make_tuple(g.g1, g.g2);
      },
      py::arg("alpha1"), py::arg("alpha2"), py::arg("side") = "right");
  m.def(
      "source_omega",
      [](double p0, double a1, double a2) {
        return source_omega(p0, abc_coefficients(a1, a2, Side::Right));
      },
      py::arg("p0"), py::arg("alpha1"), py::arg("alpha2"));

  m.def("analytic_source_solution", &analytic_source_solution, py::arg("x"), py::arg("t"),
        py::arg("s0"), py::arg("omega"));
  m.def("analytic_barrier_transmission", &analytic_barrier_transmission, py::arg("energy"),
        py::arg("v0"), py::arg("width"));

  m.def(
      "tridiagonal_inverse",
      [](const ComplexArray& diag, const ComplexArray& super, const ComplexArray& sub) {
        return to_array(usmani_inverse(make_matrix(diag, super, sub)));
      },
      py::arg("diag"), py::arg("super"), py::arg("sub"));
  m.def(
      "tridiagonal_solve",
      [](const ComplexArray& diag, const ComplexArray& super, const ComplexArray& sub,
         const ComplexArray& rhs) {
        return to_array(thomas_solve(make_matrix(diag, super, sub), to_vector(rhs)));
      },
      py::arg("diag"), py::arg("super"), py::arg("sub"), py::arg("rhs"));
  m.def(
      "log_abs_determinant",
      [](const ComplexArray& diag, const ComplexArray& super, const ComplexArray& sub) {
        const auto det = usmani_factors(make_matrix(diag, super, sub)).determinant();
        return py::make_tuple(det.log_abs(), det.arg());
      },
      py::arg("diag"), py::arg("super"), py::arg("sub"));

  py::class_<Propagator>(m, "Propagator")
      .def(py::init<double, double, std::size_t, const RealArray&, double, const std::string&,
                    double, double, const std::string&>(),
           py::arg("x_min"), py::arg("x_max"), py::arg("n_sites"), py::arg("potential"),
           py::arg("dt"), py::arg("boundary") = "dirichlet", py::arg("alpha1") = 24.0,
           py::arg("alpha2") = 25.0, py::arg("strategy") = "solve")
      .def("set_source", &Propagator::set_source, py::arg("s0"), py::arg("omega"), py::arg("x"),
           py::arg("ramp") = py::none())
      .def("evolve", &Propagator::evolve, py::arg("psi"), py::arg("n_steps") = 1,
           py::arg("first_step") = 0)
      .def_property_readonly("dx", [](const Propagator& p) { return p.op().grid().dx(); })
      .def_property_readonly("dt", [](const Propagator& p) { return p.op().dt(); });

  m.def("presets", [] {
    py::dict out;
    for (const auto& p : list_presets()) out[py::str(p.name)] = p.description;
    return out;
  });
  m.def(
      "preset_config",
      [](const std::string& name) { return serialize_config(find_preset(name).config); },
      py::arg("name"));
  m.def("config_keys", &config_keys);
  m.def(
      "run",
      [](std::optional<std::string> preset, std::optional<std::string> config,
         std::map<std::string, std::string> overrides) {
        const RunConfig c = resolve(preset, config, overrides);
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        return report_dict(r);
      },
      py::arg("preset") = py::none(), py::arg("config") = py::none(),
      py::arg("overrides") = std::map<std::string, std::string>{});
  m.def(
      "run_jsonl",
      [](std::optional<std::string> preset, std::optional<std::string> config,
         std::map<std::string, std::string> overrides) {
        const RunConfig c = resolve(preset, config, overrides);
        std::ostringstream out;
        JsonLinesWriter writer(out);
        (void)run(c, &writer);
        return out.str();
      },
      py::arg("preset") = py::none(), py::arg("config") = py::none(),
      py::arg("overrides") = std::map<std::string, std::string>{});
}

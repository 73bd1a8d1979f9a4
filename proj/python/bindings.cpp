// Python module nltracer._core. Configs and reports cross the boundary as JSON
// text; the package __init__ wraps them as dicts.

#include <pybind11/functional.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nltracer/app.hpp"
#include "nltracer/config.hpp"
#include "nltracer/diagnostics.hpp"
#include "nltracer/error.hpp"
#include "nltracer/kernel.hpp"
#include "nltracer/solver_direct.hpp"
#include "nltracer/solver_memory.hpp"

namespace py = pybind11;
using namespace nltracer;

namespace {

EnergyTrace trace_from(const std::vector<double>& t, const std::vector<double>& c,
                       const std::optional<std::vector<double>>& eta) {
  if (eta) return make_trace(t, c, *eta);
  return make_trace(t, c);
}

py::dict trace_dict(const EnergyTrace& trace) {
  std::vector<double> t, c, eta;
  for (const auto& r : trace.rows) {
    t.push_back(r.t);
    c.push_back(r.c_norm_sq);
    if (r.eta_norm_sq_mu) eta.push_back(*r.eta_norm_sq_mu);
  }
  py::dict d;
  d["t"] = t;
  d["c_norm_sq"] = c;
  d["eta_norm_sq_mu"] = trace.has_eta() ? py::cast(eta) : py::none();
  return d;
}

py::tuple command(CommandResult (*fn)(const RunConfig&, const CommandOptions&), const std::string& config_json,
                  const std::string& base_dir, std::optional<std::string> out, bool write,
                  std::optional<std::size_t> jobs, bool force) {
  const RunConfig cfg = parse_config(config_json, base_dir);
  CommandOptions opts;
  if (out) opts.out = *out;
  opts.write = write;
  opts.jobs = jobs;
  opts.force = force;
  CommandResult r;
  {
    py::gil_scoped_release release;
    r = fn(cfg, opts);
  }
  return py::make_tuple(r.exit_code, r.report.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of nltracer";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::reinterpret_steal<py::object>(PyErr_NewException("nltracer._core.Error", nullptr, nullptr)); });
  m.attr("Error") = error_type.get_stored();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = error_type.get_stored()(std::string(to_string(e.code())), e.message());
      PyErr_SetObject(error_type.get_stored().ptr(), err.ptr());
    }
  });

  py::class_<Kernel>(m, "Kernel")
      .def_static("saturating_exponential", &Kernel::saturating_exponential, py::arg("a"), py::arg("b"),
                  py::arg("gamma_k"))
      .def_static("exponential_decay", &Kernel::exponential_decay, py::arg("beta"), py::arg("gamma_k"))
      .def_static("tabulated", &Kernel::tabulated, py::arg("t"), py::arg("k"), py::arg("h_fd") = 1e-3)
      .def("eval", &Kernel::eval, py::arg("t"), py::arg("order") = 0)
      .def("__call__", [](const Kernel& k, double t) { return k.eval(t); })
      .def_property_readonly("family", [](const Kernel& k) { return std::string(k.family_name()); })
      .def("horizon", &Kernel::horizon, py::arg("tail_tol") = 1e-10);

  m.def(
      "l1_norms",
      [](const Kernel& k, double tail_tol) {
        const auto n = l1_norms(k, tail_tol);
        py::dict d;
        d["k_l1"] = n.k_l1 ? py::cast(*n.k_l1) : py::none();
        d["kp_l1"] = n.kp_l1;
        d["kpp_l1"] = n.kpp_l1;
        d["horizon"] = n.horizon;
        return d;
      },
      py::arg("kernel"), py::arg("tail_tol") = 1e-10);

  py::class_<LemmaConstants>(m, "LemmaConstants")
      .def_readonly("beta0", &LemmaConstants::beta0)
      .def_readonly("gamma", &LemmaConstants::gamma)
      .def_readonly("big_k", &LemmaConstants::big_k)
      .def_readonly("bound_factor", &LemmaConstants::bound_factor)
      .def_readonly("min_margin", &LemmaConstants::min_margin);

  m.def(
      "lemma_constants",
      [](const Kernel& k, std::optional<double> beta0, std::optional<double> gamma, double tail_tol) {
        const auto grid = lemma_search_grid(k, tail_tol);
        if (beta0) return lemma_constants_for(k, *beta0, gamma.value_or(1.0), grid, tail_tol);
        return lemma_constants(k, grid, tail_tol);
      },
      py::arg("kernel"), py::arg("beta0") = py::none(), py::arg("gamma") = py::none(),
      py::arg("tail_tol") = 1e-10);

  m.def(
      "condition_report",
      [](const Kernel& k, double delta, double t_end, std::size_t n) {
        return to_json(condition_report(k, delta, uniform_grid(t_end, n))).dump();
      },
      py::arg("kernel"), py::arg("delta"), py::arg("t_end") = 12.0, py::arg("n") = 4000);

  m.def(
      "max_delta_c5_prime", [](const Kernel& k) { return max_delta_c5_prime(k, kernel_check_grid(k)); },
      py::arg("kernel"));

  m.def(
      "staffans_check",
      [](const Kernel& k, const LemmaConstants& c, const std::function<double(double)>& y, double t0, double t1,
         std::size_t quad_n) {
        const auto r = staffans_check(k, c, y, t0, t1, quad_n);
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["lhs_error"] = r.lhs_error;
        d["rhs_error"] = r.rhs_error;
        d["holds"] = r.holds;
        return d;
      },
      py::arg("kernel"), py::arg("constants"), py::arg("y"), py::arg("t0"), py::arg("t1"),
      py::arg("quad_n") = 2000);

  // --- configs and simulations ---------------------------------------------------

  m.def(
      "normalize_config",
      [](const std::string& text, const std::string& base_dir) {
        return serialize_config(parse_config(text, base_dir));
      },
      py::arg("text"), py::arg("base_dir") = "");

  m.def(
      "alpha0",
      [](const std::string& text) {
        const auto cfg = parse_config(text);
        const auto& p = cfg.problem;
        return to_json(alpha0(p.velocity, p.kernel, velocity_check_grid(p.half_width))).dump();
      },
      py::arg("config"));

  m.def(
      "simulate",
      [](const std::string& text, const std::string& backend, const std::string& base_dir) {
        const auto cfg = parse_config(text, base_dir);
        const Grid1D grid(cfg.problem.half_width, cfg.numerics.n_x);
        RunOptions opts;
        opts.stride = cfg.numerics.trace_stride;
        py::dict d;
        if (backend == "direct") {
          DirectRun run;
          {
            py::gil_scoped_release release;
            run = run_direct(cfg.problem, grid, cfg.numerics.dt, opts);
          }
          d["trace"] = trace_dict(run.trace);
          d["final"] = run.final_state.values;
        } else if (backend == "memory") {
          MemoryRun run;
          {
            py::gil_scoped_release release;
            run = run_memory(cfg.problem, grid, resolve_sgrid(cfg), cfg.numerics.dt, opts);
          }
          d["trace"] = trace_dict(run.trace);
          d["final"] = run.final_state.c.values;
        } else {
          throw Error(ErrorCode::InvalidArgument, "backend must be 'direct' or 'memory'");
        }
        d["x"] = grid.nodes();
        return d;
      },
      py::arg("config"), py::arg("backend") = "direct", py::arg("base_dir") = "");

  // --- trace diagnostics -----------------------------------------------------

  m.def(
      "check_monotone",
      [](const std::vector<double>& t, const std::vector<double>& e, double tol) {
        const auto r = check_monotone(make_trace(t, e), tol);
        py::dict d;
        d["holds"] = r.holds;
        d["first_violation"] = r.first_violation ? py::cast(*r.first_violation) : py::none();
        d["worst_increase"] = r.worst_increase;
        return d;
      },
      py::arg("t"), py::arg("energy"), py::arg("tol") = 1e-6);

  m.def(
      "check_energy_inequality",
      [](const std::vector<double>& t, const std::vector<double>& c, std::optional<std::vector<double>> eta,
         double alpha0, std::optional<double> delta, double tol) {
        const auto r = check_energy_inequality(trace_from(t, c, eta), alpha0, delta, tol);
        py::dict d;
        d["holds"] = r.holds;
        d["gronwall_form"] = r.gronwall_form;
        d["worst_margin"] = r.worst_margin;
        d["violations"] = r.violations;
        return d;
      },
      py::arg("t"), py::arg("c_norm_sq"), py::arg("eta_norm_sq_mu") = py::none(), py::arg("alpha0"),
      py::arg("delta") = py::none(), py::arg("tol") = 1e-6);

  m.def(
      "check_nakao_hypothesis",
      [](const std::vector<double>& t, const std::vector<double>& e, double alpha0, double tol) {
        const auto r = check_nakao_hypothesis(make_trace(t, e), alpha0, tol);
        py::dict d;
        d["holds"] = r.holds;
        d["violations"] = r.violations;
        d["windows"] = r.windows.size();
        d["worst_excess"] = r.worst_excess;
        return d;
      },
      py::arg("t"), py::arg("energy"), py::arg("alpha0"), py::arg("tol") = 1e-6);

  m.def(
      "fit_decay",
      [](const std::vector<double>& t, const std::vector<double>& e, std::optional<std::pair<double, double>> w) {
        const auto f = fit_decay(make_trace(t, e), w);
        py::dict d;
        d["a"] = f.a;
        d["b"] = f.b;
        d["r_squared"] = f.r_squared;
        d["t_lo"] = f.t_lo;
        d["t_hi"] = f.t_hi;
        d["samples"] = f.samples;
        return d;
      },
      py::arg("t"), py::arg("energy"), py::arg("window") = py::none());

  // --- CLI verbs -------------------------------------------------------------

  const auto bind_command = [&](const char* name, CommandResult (*fn)(const RunConfig&, const CommandOptions&)) {
    m.def(
        name,
        [fn](const std::string& text, const std::string& base_dir, std::optional<std::string> out, bool write,
             std::optional<std::size_t> jobs, bool force) { return command(fn, text, base_dir, out, write, jobs, force); },
        py::arg("config"), py::arg("base_dir") = "", py::arg("out") = py::none(), py::arg("write") = false,
        py::arg("jobs") = py::none(), py::arg("force") = false);
  };
  bind_command("cmd_check", &cmd_check);
  bind_command("cmd_run", &cmd_run);
  bind_command("cmd_lemma", &cmd_lemma);
  bind_command("cmd_sweep", &cmd_sweep);
}

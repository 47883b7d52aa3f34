#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bregman/config.hpp"
#include "bregman/hardness.hpp"
#include "bregman/stationarity.hpp"

namespace py = pybind11;
using namespace bregman;

namespace {

py::dict report_dict(const StationarityReport& rep) {
  py::dict d;
  d["r_ext"] = rep.r_ext;
  d["residual"] = rep.euclid_residual;
  d["interior_gap"] = rep.interior_gap;
  d["class"] = to_string(rep.classification);
  d["witness"] = rep.witness;
  return d;
}

py::dict trajectory_dict(const Trajectory& traj) {
  py::dict d;
  d["status"] = to_string(traj.status);
  d["iterations"] = traj.iterations;
  if (!traj.error.empty()) d["error"] = traj.error;
  py::list ks, xs, fs, r_exts, residuals;
  for (const auto& pt : traj.points) {
    ks.append(pt.k);
    xs.append(pt.x);
    fs.append(pt.f);
    r_exts.append(pt.r_ext);
    residuals.append(pt.residual);
  }
  d["k"] = ks;
  d["x"] = xs;
  d["f"] = fs;
  d["r_ext"] = r_exts;
  d["residual"] = residuals;
  return d;
}

RunConfig run_config_from_kwargs(double t, int max_iters,
                                 std::optional<double> stop_r_ext,
                                 std::optional<double> stop_residual,
                                 int record_every, const std::string& mode,
                                 bool force_generic) {
  RunConfig rc;
  rc.t = t;
  rc.max_iters = max_iters;
  rc.stop_r_ext = stop_r_ext;
  rc.stop_residual = stop_residual;
  rc.record_every = record_every;
  if (mode == "linear") rc.mode = RunConfig::Mode::Linear;
  else if (mode == "log_domain") rc.mode = RunConfig::Mode::LogDomain;
  else throw ConfigError("mode must be linear or log_domain");
  rc.force_generic = force_generic;
  return rc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Bregman proximal-type methods over separable Legendre kernels, with "
      "the extended stationarity measure, spurious-point detection and "
      "finite-step trap experiments";

  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<RangeError>(m, "RangeError");
  py::register_exception<DimensionError>(m, "DimensionError");
  py::register_exception<ConstructionError>(m, "ConstructionError");
  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<UnknownInstanceError>(m, "UnknownInstanceError");
  py::register_exception<UnsupportedCombinationError>(
      m, "UnsupportedCombinationError");
  py::register_exception<DegenerateReductionError>(m,
                                                   "DegenerateReductionError");
  py::register_exception<UnderflowError>(m, "UnderflowError");
  py::register_exception<TooLargeError>(m, "TooLargeError");
  py::register_exception<NonCompactError>(m, "NonCompactError");
  py::register_exception<PreconditionError>(m, "PreconditionError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("parse", &KernelSpec::parse, py::arg("tag"))
      .def_static("shannon", &KernelSpec::shannon)
      .def_static("fermi_dirac", &KernelSpec::fermi_dirac)
      .def_static("burg", &KernelSpec::burg)
      .def_static("fractional_power", &KernelSpec::fractional_power)
      .def_static("hellinger", &KernelSpec::hellinger)
      .def_static("polynomial", &KernelSpec::polynomial)
      .def_static("euclidean", &KernelSpec::euclidean)
      .def("tag", &KernelSpec::tag)
      .def("left", &KernelSpec::left)
      .def("right", &KernelSpec::right)
      .def("legendre", &KernelSpec::legendre)
      .def("phi", &KernelSpec::phi)
      .def("phi_prime", &KernelSpec::phi_prime)
      .def("phi_prime_inv", &KernelSpec::phi_prime_inv)
      .def("bregman", &KernelSpec::bregman, py::arg("y"), py::arg("x"))
      .def("__repr__",
           [](const KernelSpec& k) { return "KernelSpec(" + k.tag() + ")"; });

  m.def("bregman_vec", &bregman_vec, py::arg("kernel"), py::arg("y"),
        py::arg("x"));

  py::class_<ConstraintSet>(m, "ConstraintSet")
      .def_static("simplex", &ConstraintSet::simplex, py::arg("n"))
      .def_static("polytope", &ConstraintSet::polytope, py::arg("A"),
                  py::arg("b"))
      .def_static("box", &ConstraintSet::box, py::arg("lower"),
                  py::arg("upper"))
      .def("dim", &ConstraintSet::dim)
      .def("contains", &ConstraintSet::contains, py::arg("x"),
           py::arg("tol") = 1e-9)
      .def("compact", &ConstraintSet::compact)
      .def("vertices",
           [](const ConstraintSet& s) { return s.vertices(); });

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_property_readonly(
          "kernel", [](const ProblemInstance& p) { return p.kernel; })
      .def_property_readonly(
          "t_bar", [](const ProblemInstance& p) { return p.t_bar; })
      .def_property_readonly(
          "x_interior",
          [](const ProblemInstance& p) { return p.x_interior; })
      .def_property_readonly(
          "label", [](const ProblemInstance& p) { return p.f.label; })
      .def("dim", &ProblemInstance::dim)
      .def("f", [](const ProblemInstance& p,
                   const Eigen::VectorXd& x) { return p.f.value(x); })
      .def("grad", [](const ProblemInstance& p,
                      const Eigen::VectorXd& x) { return p.f.grad(x); })
      .def("with_kernel", &ProblemInstance::with_kernel);

  m.def("builtin", &builtin, py::arg("name"),
        "Named instances: lp_simplex, nonconvex_simplex, illposed_inverse, "
        "entropy_trap, poly_trap[:alpha]");

  m.def(
      "make_problem",
      [](const ConstraintSet& set, const std::string& kernel_tag,
         const std::string& surrogate, double t_bar,
         std::function<double(const Eigen::VectorXd&)> value,
         std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
         std::optional<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>>
             hessian_diag,
         bool convex, bool affine, const std::string& label) {
        SmoothObjective f;
        f.value = std::move(value);
        f.grad = std::move(grad);
        if (hessian_diag) f.hessian_diag = std::move(*hessian_diag);
        f.convex = convex;
        f.affine = affine;
        f.label = label;
        return ProblemInstance(std::move(f), set, KernelSpec::parse(kernel_tag),
                               parse_surrogate(surrogate), t_bar);
      },
      py::arg("constraint"), py::arg("kernel") = "shannon",
      py::arg("surrogate") = "linear", py::arg("t_bar") = 1.0,
      py::arg("value") = nullptr, py::arg("grad") = nullptr,
      py::arg("hessian_diag") = std::nullopt, py::arg("convex") = false,
      py::arg("affine") = false, py::arg("label") = "user objective");

  m.def("random_polytope_instance", &random_polytope_instance, py::arg("n"),
        py::arg("m"), py::arg("seed"), py::arg("kernel"),
        py::arg("t_bar") = 1.0);

  m.def("check_assumptions", [](const ProblemInstance& p) {
    auto rep = check_assumptions(p);
    py::dict d;
    d["domain_inclusion"] = rep.domain_inclusion;
    d["strict_interior"] = rep.strict_interior;
    d["well_posed"] = rep.well_posed;
    d["all_pass"] = rep.all_pass();
    d["notes"] = py::make_tuple(rep.domain_note, rep.interior_note,
                                rep.well_posed_note);
    return d;
  });

  m.def("subdifferential_residual",
        [](const ProblemInstance& p, const Eigen::VectorXd& x) {
          auto rr = subdifferential_residual(p, x);
          return py::make_tuple(rr.residual, rr.witness);
        });

  auto update_to_dict = [](const UpdateResult& res) {
    py::dict d;
    d["y"] = res.y;
    d["dual_mu"] = res.dual_mu;
    d["status"] = res.status == UpdateStatus::Ok
                      ? "ok"
                      : (res.status == UpdateStatus::Unbounded ? "unbounded"
                                                               : "max_iter");
    d["inner_iters"] = res.inner_iters;
    return d;
  };

  m.def(
      "bregman_update",
      [update_to_dict](const ProblemInstance& p, const Eigen::VectorXd& x,
                       double t, bool force_generic) {
        UpdateOptions opts;
        opts.force_generic = force_generic;
        return update_to_dict(bregman_update(p, x, t, opts));
      },
      py::arg("problem"), py::arg("x"), py::arg("t"),
      py::arg("force_generic") = false);

  m.def(
      "extended_update",
      [update_to_dict](const ProblemInstance& p, const Eigen::VectorXd& x,
                       double t, bool force_generic) {
        UpdateOptions opts;
        opts.force_generic = force_generic;
        return update_to_dict(extended_update(p, x, t, opts));
      },
      py::arg("problem"), py::arg("x"), py::arg("t"),
      py::arg("force_generic") = false);

  m.def("classify",
        [](const Eigen::VectorXd& x, const KernelSpec& k, double tol) {
          auto part = classify(x, k, tol);
          return py::make_tuple(part.interior, part.boundary);
        },
        py::arg("x"), py::arg("kernel"), py::arg("tol") = kBoundaryTol);

  m.def("measure_R", &measure_R, py::arg("problem"), py::arg("x"),
        py::arg("t"));
  m.def("measure_R_ext", &measure_R_ext, py::arg("problem"), py::arg("x"),
        py::arg("t"));

  m.def(
      "detect",
      [](const ProblemInstance& p, const Eigen::VectorXd& x, double t,
         double tol) { return report_dict(detect(p, x, t, tol)); },
      py::arg("problem"), py::arg("x"), py::arg("t"),
      py::arg("tol") = kStationarityTol);

  m.def(
      "find_spurious_candidates",
      [](const ProblemInstance& p, double t, double tol) {
        py::list out;
        for (const auto& [v, rep] : find_spurious_candidates(p, t, tol))
          out.append(py::make_tuple(v, report_dict(rep)));
        return out;
      },
      py::arg("problem"), py::arg("t") = 1.0,
      py::arg("tol") = kStationarityTol);

  m.def(
      "run",
      [](const ProblemInstance& p, const Eigen::VectorXd& x0, double t,
         int max_iters, std::optional<double> stop_r_ext,
         std::optional<double> stop_residual, int record_every,
         const std::string& mode, bool force_generic) {
        RunConfig rc =
            run_config_from_kwargs(t, max_iters, stop_r_ext, stop_residual,
                                   record_every, mode, force_generic);
        return trajectory_dict(run(p, x0, rc));
      },
      py::arg("problem"), py::arg("x0"), py::arg("t") = 1.0,
      py::arg("max_iters") = 1000,
      py::arg("stop_r_ext") = std::optional<double>(1e-10),
      py::arg("stop_residual") = std::nullopt, py::arg("record_every") = 1,
      py::arg("mode") = "linear", py::arg("force_generic") = false);

  py::class_<TrapConfig>(m, "TrapConfig")
      .def(py::init([](const std::string& instance, double eps, double t,
                       int K, double alpha, bool log_domain) {
             TrapConfig cfg;
             if (instance == "entropy")
               cfg.instance = TrapConfig::Instance::Entropy;
             else if (instance == "poly")
               cfg.instance = TrapConfig::Instance::Poly;
             else
               throw ConfigError("instance must be entropy or poly");
             cfg.eps = eps;
             cfg.t = t;
             cfg.K = K;
             cfg.alpha = alpha;
             cfg.log_domain = log_domain;
             return cfg;
           }),
           py::arg("instance") = "entropy", py::arg("eps") = 0.1,
           py::arg("t") = 1.0, py::arg("K") = 120, py::arg("alpha") = 1.0,
           py::arg("log_domain") = false)
      .def_readwrite("eps", &TrapConfig::eps)
      .def_readwrite("t", &TrapConfig::t)
      .def_readwrite("K", &TrapConfig::K)
      .def_readwrite("alpha", &TrapConfig::alpha);

  m.def("init_entropy_trap", &init_entropy_trap, py::arg("config"));
  m.def("init_poly_trap", &init_poly_trap, py::arg("config"));
  m.def("closed_form_eg_step", &closed_form_eg_step, py::arg("x"),
        py::arg("t"));

  m.def("run_trap", [](const TrapConfig& cfg) {
    auto res = run_trap(cfg);
    py::dict d = trajectory_dict(res.trajectory);
    d["trapped"] = res.trapped;
    d["ball_trapped"] = res.ball_trapped;
    d["end_trapped"] = res.end_trapped;
    return d;
  });

  m.def("search_trap_start", &search_trap_start, py::arg("problem"),
        py::arg("spurious"), py::arg("interior_ref"), py::arg("eps"),
        py::arg("t"), py::arg("K"));
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnls/harness.hpp"
#include "dnls/integrators.hpp"
#include "dnls/modified_energy.hpp"
#include "dnls/observables.hpp"
#include "dnls/soliton.hpp"

namespace py = pybind11;
using namespace dnls;

namespace {

py::dict report_dict(const EnergyReport& r) {
  py::dict d;
  d["H_h"] = r.H_h;
  d["N_h"] = r.N_h;
  d["H_A"] = r.H_A;
  d["H_P"] = r.H_P;
  d["H_bracket"] = r.H_bracket;
  d["H_mod_phys"] = r.H_mod_phys;
  d["H_mod_spec"] = r.H_mod_spec;
  d["dist"] = r.dist;
  return d;
}

py::dict record_dict(const TrajectoryRecord& rec) {
  std::vector<std::int64_t> step;
  std::vector<double> t, N, H, Hphys, Hspec, dist, max_abs;
  for (const auto& s : rec.samples) {
    step.push_back(s.step);
    t.push_back(s.t);
    N.push_back(s.report.N_h);
    H.push_back(s.report.H_h);
    Hphys.push_back(s.report.H_mod_phys);
    Hspec.push_back(s.report.H_mod_spec);
    dist.push_back(s.report.dist);
    max_abs.push_back(s.max_abs);
  }
  py::dict snaps;
  for (const auto& s : rec.snapshots) snaps[py::float_(s.t)] = s.field;
  py::dict d;
  d["status"] = to_string(rec.status);
  d["steps_taken"] = rec.steps_taken;
  d["message"] = rec.message;
  d["step"] = step;
  d["t"] = t;
  d["N_h"] = N;
  d["H_h"] = H;
  d["H_mod_phys"] = Hphys;
  d["H_mod_spec"] = Hspec;
  d["dist"] = dist;
  d["max_abs"] = max_abs;
  d["snapshots"] = snaps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lattice NLS solitons, splitting integrators and modified energies";
  m.attr("__version__") = version();

  py::register_exception<GridMismatch>(m, "GridMismatch", PyExc_ValueError);
  py::register_exception<ChartDomainError>(m, "ChartDomainError", PyExc_ValueError);
  py::register_exception<PoleError>(m, "PoleError", PyExc_ValueError);
  py::register_exception<CflError>(m, "CflError", PyExc_ValueError);
  py::register_exception<DfpFailure>(m, "DfpFailure", PyExc_RuntimeError);

  py::enum_<SeminormWeight>(m, "SeminormWeight")
      .value("fe_exact", SeminormWeight::fe_exact)
      .value("doubled", SeminormWeight::doubled);
  py::enum_<StepperKind>(m, "StepperKind")
      .value("lie_AP", StepperKind::lie_AP)
      .value("lie_PA", StepperKind::lie_PA)
      .value("taylor2_then_P", StepperKind::taylor2_then_P)
      .value("dfp", StepperKind::dfp);
  py::enum_<Composition>(m, "Composition")
      .value("potential_first", Composition::potential_first)
      .value("kinetic_first", Composition::kinetic_first);
  py::enum_<ModifiedEnergyMode>(m, "ModifiedEnergyMode")
      .value("first_order_physical", ModifiedEnergyMode::first_order_physical)
      .value("resummed_spectral", ModifiedEnergyMode::resummed_spectral);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<double, int>(), py::arg("h"), py::arg("K"))
      .def_property_readonly("h", &GridSpec::h)
      .def_property_readonly("K", &GridSpec::K)
      .def_property_readonly("npoints", &GridSpec::npoints)
      .def_property_readonly("half_width", &GridSpec::half_width)
      .def("x", [](const GridSpec& g) {
        Eigen::VectorXd x(g.npoints());
        for (int j = -g.K(); j <= g.K(); ++j) x[g.index(j)] = g.x(j);
        return x;
      })
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(h=" + std::to_string(g.h()) + ", K=" + std::to_string(g.K()) + ")";
      });

  py::class_<LatticeField>(m, "LatticeField")
      .def(py::init<GridSpec, CVector, bool>(), py::arg("grid"), py::arg("values"), py::arg("symmetric") = false)
      .def_static("zeros", &LatticeField::zeros)
      .def_static("mirrored", &LatticeField::mirrored)
      .def_property_readonly("grid", &LatticeField::grid)
      .def_property_readonly("values", &LatticeField::values)
      .def_property_readonly("symmetric", &LatticeField::symmetric)
      .def("__add__", &LatticeField::operator+)
      .def("__sub__", &LatticeField::operator-)
      .def("__mul__", [](const LatticeField& f, cplx s) { return f * s; })
      .def("__rmul__", [](const LatticeField& f, cplx s) { return f * s; });

  py::class_<CflReport>(m, "CflReport")
      .def_readonly("ratio", &CflReport::ratio)
      .def_readonly("bound", &CflReport::bound)
      .def_readonly("passed", &CflReport::pass);

  py::class_<OrbitDistance>(m, "OrbitDistance")
      .def_readonly("dist", &OrbitDistance::dist)
      .def_readonly("alpha", &OrbitDistance::alpha);

  py::class_<SolitonPack>(m, "SolitonPack")
      .def_readonly("sampled", &SolitonPack::sampled)
      .def_readonly("discrete", &SolitonPack::discrete)
      .def_readonly("lambda_mu", &SolitonPack::lambda_mu)
      .def_readonly("mass_target", &SolitonPack::mass_target)
      .def_readonly("kkt_residual", &SolitonPack::kkt_residual)
      .def_readonly("iterations", &SolitonPack::iterations)
      .def_readonly("converged", &SolitonPack::converged);

  m.def("omegas", &omegas);
  m.def("laplacian", &laplacian);
  m.def("norm_mu", &norm_mu, py::arg("f"), py::arg("weight") = SeminormWeight::fe_exact);
  m.def("fe_h1_norm", &fe_h1_norm);
  m.def("mass_h", &mass_h);
  m.def("hamiltonian_h", &hamiltonian_h);
  m.def("split_energies", [](const LatticeField& f) {
    const auto s = split_energies(f);
    return py::make_tuple(s.kinetic, s.potential);
  });
  m.def("bracket_energy", &bracket_energy, py::arg("f"), py::arg("tau"));
  m.def("orbit_distance", &orbit_distance, py::arg("f"), py::arg("reference"),
        py::arg("weight") = SeminormWeight::fe_exact);
  m.def("epsilon_mu", &epsilon_mu, py::arg("h"), py::arg("K"), py::arg("tau"), py::arg("nu") = 0.5);

  m.def("eta", py::vectorize(&eta));
  m.def("sampled_soliton", [](const GridSpec& g) { return project(soliton_sampler(), g); });
  m.def(
      "discrete_soliton",
      [](const GridSpec& g, std::optional<double> mass, double tol, int maxit) {
        SolitonOptions o;
        o.mass_target = mass;
        o.tol = tol;
        o.maxit = maxit;
        return discrete_soliton(g, o);
      },
      py::arg("grid"), py::arg("mass_target") = py::none(), py::arg("tol") = 1e-10, py::arg("maxit") = 100000);

  m.def("phi_filter", &phi_filter);
  m.def("bernoulli", &bernoulli_double);
  m.def("cfl_check", &cfl_check, py::arg("h"), py::arg("tau"), py::arg("M") = 0);
  m.def("hz1_spectral", &hz1_spectral, py::arg("f"), py::arg("tau"),
        py::arg("order") = Composition::potential_first);
  m.def(
      "h_modified",
      [](const LatticeField& f, double tau, ModifiedEnergyMode mode, int M, Composition order) {
        return h_modified(f, {mode, M, tau, order});
      },
      py::arg("f"), py::arg("tau"), py::arg("mode") = ModifiedEnergyMode::resummed_spectral, py::arg("M") = 0,
      py::arg("order") = Composition::potential_first);

  m.def("potential_flow", &potential_flow);
  m.def("kinetic_flow", &kinetic_flow);
  m.def("taylor2_kinetic", &taylor2_kinetic);
  m.def(
      "step",
      [](const LatticeField& f, StepperKind kind, double tau) {
        StepperConfig c;
        c.kind = kind;
        c.tau = tau;
        return step(f, c);
      },
      py::arg("f"), py::arg("kind"), py::arg("tau"));
  m.def(
      "integrate",
      [](const LatticeField& f0, StepperKind kind, double tau, double t_end, std::int64_t cadence,
         std::optional<LatticeField> reference, std::vector<double> snapshot_times, bool modified_energy) {
        StepperConfig c;
        c.kind = kind;
        c.tau = tau;
        IntegrateOptions o;
        o.t_end = t_end;
        o.cadence = cadence;
        o.reference = std::move(reference);
        o.snapshot_times = std::move(snapshot_times);
        o.modified_energy = modified_energy;
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          rec = integrate(f0, c, o);
        }
        return record_dict(rec);
      },
      py::arg("f0"), py::arg("kind"), py::arg("tau"), py::arg("t_end"), py::arg("cadence") = 1,
      py::arg("reference") = py::none(), py::arg("snapshot_times") = std::vector<double>{},
      py::arg("modified_energy") = true);
  m.def("energy_report", [](const LatticeField& f, double tau, std::optional<LatticeField> reference) {
    const FilterTable table(f.grid(), tau, Composition::potential_first, f.symmetric());
    return report_dict(energy_report(f, tau, Composition::potential_first, &table, reference,
                                     SeminormWeight::fe_exact));
  });

  m.def("preset_json", [](const std::string& name) { return to_json(preset(name)).dump(); });
  m.def("run_json", [](const std::string& config) {
    const RunConfig c = run_config_from_json(json::parse(config));
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run(c);
    }
    json out = manifest(r);
    py::dict d;
    d["manifest"] = out.dump();
    d["record"] = record_dict(r.record);
    return d;
  });
  m.def("validate_json", [] { return to_json(validate()).dump(); });
}

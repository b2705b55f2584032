#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "floqhhg/amplitudes.hpp"
#include "floqhhg/bessel.hpp"
#include "floqhhg/config.hpp"
#include "floqhhg/errors.hpp"
#include "floqhhg/oracle.hpp"
#include "floqhhg/runner.hpp"

namespace py = pybind11;
using namespace floqhhg;

namespace {

template <class T>
py::array_t<T> array(const std::vector<T>& v)
{
    py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::dict frame_dict(const SpectrumFrame& f)
{
    py::dict d;
    d["t"] = f.t;
    d["stationary"] = f.stationary;
    d["omega_k"] = array(f.omega_k);
    d["S"] = array(f.S);
    d["S_R"] = array(f.S_R);
    d["S_C"] = array(f.S_C);
    d["S_cross"] = array(f.S_cross);
    if (!f.S_oracle.empty())
        d["S_oracle"] = array(f.S_oracle);
    d["truncation"] = f.truncation;
    return d;
}

ContinuumSpec band(double cutoff, LambShift ls)
{
    ContinuumSpec s;
    s.cutoff = cutoff;
    s.lamb_shift = ls;
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Floquet complex-spectral HHG of a driven two-level atom";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<CertificationError>(m, "CertificationError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::enum_<LambShift>(m, "LambShift")
        .value("full", LambShift::full)
        .value("imaginary_only", LambShift::imaginary_only);
    py::enum_<Sheet>(m, "Sheet")
        .value("first", Sheet::first)
        .value("second", Sheet::second)
        .value("continued", Sheet::continued);
    py::enum_<PoleMethod>(m, "PoleMethod")
        .value("perturbative", PoleMethod::perturbative)
        .value("self_consistent", PoleMethod::self_consistent);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double delta0, double omega, double a, double lambda_, double theta) {
                 return SystemParams{delta0, omega, a, lambda_, theta};
             }),
             py::arg("delta0") = 20.0, py::arg("omega") = 1.0, py::arg("a") = 10.0, py::arg("lam") = 0.06,
             py::arg("theta") = 0.0)
        .def_readwrite("delta0", &SystemParams::delta0)
        .def_readwrite("omega", &SystemParams::omega)
        .def_readwrite("a", &SystemParams::a)
        .def_readwrite("lam", &SystemParams::lambda)
        .def_readwrite("theta", &SystemParams::theta)
        .def("excited_energy", &SystemParams::excited_energy)
        .def("__repr__", [](const SystemParams& p) {
            return "SystemParams(delta0=" + std::to_string(p.delta0) + ", omega=" + std::to_string(p.omega)
                   + ", a=" + std::to_string(p.a) + ", lam=" + std::to_string(p.lambda)
                   + ", theta=" + std::to_string(p.theta) + ")";
        });

    m.def("bessel_j", &bessel_j, py::arg("n"), py::arg("x"));
    m.def(
        "bessel_row", [](double a, int half_width) { return array(bessel_row(a, half_width).values); },
        py::arg("a"), py::arg("half_width"), "J_m(a) for m = -M..M");

    m.def(
        "sigma_plus",
        [](std::complex<double> z, double cutoff, Sheet sheet) { return sigma_plus(z, band(cutoff, LambShift::full), sheet); },
        py::arg("z"), py::arg("cutoff") = 200.0, py::arg("sheet") = Sheet::first);

    py::class_<SpectralSetup>(m, "SpectralSetup")
        .def(py::init([](const SystemParams& p, double cutoff, LambShift ls, int half_width, PoleMethod method) {
                 return make_setup(p, band(cutoff, ls), half_width, method);
             }),
             py::arg("params"), py::arg("cutoff") = 200.0, py::arg("lamb_shift") = LambShift::full,
             py::arg("half_width") = 0, py::arg("pole_method") = PoleMethod::perturbative)
        .def_property_readonly("params", [](const SpectralSetup& s) { return s.params; })
        .def_property_readonly("truncation", &SpectralSetup::truncation)
        .def_property_readonly("z0", [](const SpectralSetup& s) { return s.ladder.base.z; })
        .def_property_readonly("gamma", [](const SpectralSetup& s) { return s.ladder.base.gamma; })
        .def_property_readonly("residue", [](const SpectralSetup& s) { return s.ladder.residue; })
        .def("pole", [](const SpectralSetup& s, int n) { return s.ladder.at(n).z; }, py::arg("n"));

    m.def(
        "amplitude",
        [](double omega_k, double t, const SpectralSetup& s, bool branch_term, bool residue_normalization) {
            AmplitudeOptions o;
            o.branch_term = branch_term;
            o.residue_normalization = residue_normalization;
            const auto d = amplitude(omega_k, t, s, o);
            py::dict r;
            r["s_R"] = d.s_R;
            r["s_C"] = d.s_C;
            r["s_BR"] = d.s_BR;
            r["s_BR_error"] = d.s_BR_error;
            r["s_BR_converged"] = d.s_BR_converged;
            r["total"] = d.total;
            return r;
        },
        py::arg("omega_k"), py::arg("t"), py::arg("setup"), py::arg("branch_term") = false,
        py::arg("residue_normalization") = false);

    m.def(
        "stationary_spectrum",
        [](const std::vector<double>& grid, const SpectralSetup& s) { return frame_dict(stationary_spectrum(grid, s)); },
        py::arg("grid"), py::arg("setup"));
    m.def(
        "temporal_spectrum",
        [](const std::vector<double>& grid, double t, const SpectralSetup& s, bool branch_term, bool residue_normalization) {
            AmplitudeOptions o;
            o.branch_term = branch_term;
            o.residue_normalization = residue_normalization;
            SpectrumFrame f;
            {
                py::gil_scoped_release nogil;
                f = temporal_spectrum(grid, t, s, o);
            }
            return frame_dict(f);
        },
        py::arg("grid"), py::arg("t"), py::arg("setup"), py::arg("branch_term") = false,
        py::arg("residue_normalization") = false);
    m.def("survival_amplitude", &survival_amplitude, py::arg("t"), py::arg("setup"),
          py::arg("residue_normalization") = false);
    m.def("jittered_grid", &jittered_grid, py::arg("lo"), py::arg("hi"), py::arg("count"));

    m.def(
        "integrate_oracle",
        [](const SystemParams& p, double cutoff, std::size_t modes, double t_end, double dt, std::size_t save_every,
           bool certify) {
            const auto model = discretize(p, cutoff, modes);
            IntegrateOptions o;
            o.t_end = t_end;
            o.dt = dt;
            o.save_every = save_every;
            o.certify = certify;
            OracleTrajectory tr;
            {
                py::gil_scoped_release nogil;
                tr = integrate(model, o);
            }
            py::dict d;
            d["times"] = array(tr.times);
            d["c_d"] = array(tr.c_d);
            d["norm"] = array(tr.norm);
            d["d_omega"] = tr.d_omega;
            d["max_norm_error"] = tr.max_norm_error;
            d["step_doubling_delta"] = tr.step_doubling_delta;
            d["gamma_fit"] = py::none();
            try {
                const DecayFit fit = fit_decay(tr);
                if (!fit.rejected)
                    d["gamma_fit"] = fit.gamma;
            } catch (const FitError&) {
            }
            return d;
        },
        py::arg("params"), py::arg("cutoff") = 200.0, py::arg("modes") = 8000, py::arg("t_end") = 5.0,
        py::arg("dt") = 2e-4, py::arg("save_every") = 50, py::arg("certify") = true);

    m.def("scenario_names", &scenario_names);
    m.def(
        "run_scenario",
        [](const std::string& name, const std::vector<std::string>& overrides) {
            const RunSpec spec = scenario_spec(name, overrides);
            RunResult r;
            {
                py::gil_scoped_release nogil;
                r = run_scenario(spec);
            }
            return py::make_tuple(r.files, r.summary_json);
        },
        py::arg("name"), py::arg("overrides") = std::vector<std::string>{},
        "Runs a preset; returns (written files, summary JSON text).");
}

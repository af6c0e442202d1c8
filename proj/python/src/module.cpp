#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "translocal/entropy.hpp"
#include "translocal/errors.hpp"
#include "translocal/measures.hpp"
#include "translocal/pressure.hpp"
#include "translocal/symbolic.hpp"

namespace py = pybind11;
using namespace translocal;

PYBIND11_MODULE(_translocal, m) {
  m.doc() = "Translocal entropy and pressure estimators";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<SingularOrbit>(m, "SingularOrbit", base.ptr());
  py::register_exception<NoPositiveRoot>(m, "NoPositiveRoot", base.ptr());
  py::register_exception<Unbracketed>(m, "Unbracketed", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::enum_<Space>(m, "Space")
      .value("circle", Space::circle)
      .value("torus", Space::torus)
      .value("interval", Space::interval)
      .value("disk", Space::disk)
      .value("symbolic", Space::symbolic);

  py::class_<PhasePoint>(m, "PhasePoint")
      .def_static("circle", &PhasePoint::circle)
      .def_static("torus", &PhasePoint::torus)
      .def_static("interval", &PhasePoint::interval)
      .def_static("disk", &PhasePoint::disk, py::arg("r"), py::arg("theta"))
      .def_static("word", &PhasePoint::word, py::arg("w"), py::arg("tail") = 0, py::arg("horizon") = 1 << 20)
      .def_property_readonly("space", &PhasePoint::space)
      .def_property_readonly("coords",
                             [](const PhasePoint& p) { return std::vector<double>(p.coords().begin(), p.coords().end()); })
      .def("symbol", &PhasePoint::symbol)
      .def("__repr__", [](const PhasePoint& p) { return measures::describe(p); });

  py::class_<BallSpec>(m, "BallSpec")
      .def(py::init<PhasePoint, double, bool>(), py::arg("center"), py::arg("radius"), py::arg("closed") = true)
      .def_readonly("center", &BallSpec::center)
      .def_readonly("radius", &BallSpec::radius)
      .def_readonly("closed", &BallSpec::closed);

  // pybind11 holders cannot be pointers to const
  py::class_<maps::System, std::shared_ptr<maps::System>>(m, "System")
      .def_property_readonly("id", &maps::System::id)
      .def_property_readonly("space", &maps::System::space)
      .def_property_readonly("description", &maps::System::description)
      .def_property_readonly("htop", &maps::System::htop)
      .def("evaluate", &maps::System::evaluate);
  m.def(
      "make_system", [](const std::string& id) { return std::const_pointer_cast<maps::System>(maps::make_system(id)); },
      py::arg("id"));
  m.def("catalogue", [] {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& e : maps::catalogue()) out.emplace_back(e.id, e.space, e.description);
    return out;
  });

  py::class_<maps::Potential>(m, "Potential")
      .def_static("parse", &maps::Potential::parse)
      .def_static("zero", &maps::Potential::zero)
      .def_static("constant", &maps::Potential::constant)
      .def_static("geometric", &maps::Potential::geometric)
      .def_property_readonly("id", &maps::Potential::id);

  py::enum_<entropy::Mode>(m, "Mode").value("limsup", entropy::Mode::limsup).value("liminf", entropy::Mode::liminf);

  py::class_<entropy::Schedule>(m, "Schedule")
      .def_static("defaults", &entropy::Schedule::defaults)
      .def_static("make", &entropy::Schedule::make, py::arg("n_min"), py::arg("n_max"), py::arg("eps"),
                  py::arg("budget") = kDefaultGridCap)
      .def_readwrite("n", &entropy::Schedule::n)
      .def_readwrite("epsilon", &entropy::Schedule::epsilon)
      .def_readwrite("budget", &entropy::Schedule::budget)
      .def_readwrite("theta", &entropy::Schedule::theta)
      .def_readwrite("strict", &entropy::Schedule::strict);

  py::class_<entropy::RateEstimate>(m, "RateEstimate")
      .def_readonly("value", &entropy::RateEstimate::value)
      .def_readonly("raw", &entropy::RateEstimate::raw)
      .def_readonly("n_min", &entropy::RateEstimate::n_min)
      .def_readonly("n_max", &entropy::RateEstimate::n_max)
      .def_readonly("epsilon", &entropy::RateEstimate::epsilon)
      .def_readonly("residual", &entropy::RateEstimate::residual)
      .def_readonly("mode", &entropy::RateEstimate::mode)
      .def_readonly("trend", &entropy::RateEstimate::trend)
      .def_readonly("data", &entropy::RateEstimate::data)
      .def_readonly("incomplete", &entropy::RateEstimate::incomplete)
      .def_readonly("notes", &entropy::RateEstimate::notes);
  py::class_<entropy::TranslocalEstimate>(m, "TranslocalEstimate")
      .def_readonly("upper", &entropy::TranslocalEstimate::upper)
      .def_readonly("lower", &entropy::TranslocalEstimate::lower);

  m.def("growth_rate", &entropy::growth_rate, py::arg("log_counts"), py::arg("mode") = entropy::Mode::limsup);
  m.def("translocal_entropy", &entropy::translocal_entropy, py::arg("system"), py::arg("z"), py::arg("omega"),
        py::arg("schedule") = entropy::Schedule::defaults());
  m.def("restricted_entropy", &entropy::restricted_entropy, py::arg("system"), py::arg("K"),
        py::arg("schedule") = entropy::Schedule::defaults());
  m.def("yz_entropy_function", &entropy::yz_entropy_function, py::arg("system"), py::arg("x"), py::arg("deltas"),
        py::arg("schedule") = entropy::Schedule::defaults());
  m.def(
      "lyapunov_exponent",
      [](const maps::System& s, const PhasePoint& x, std::int64_t n) {
        const auto l = entropy::lyapunov_exponent(s, x, n);
        return std::make_pair(l.lower, l.upper);
      },
      py::arg("system"), py::arg("x"), py::arg("n"));
  m.def(
      "toral_translocal",
      [](const std::vector<std::vector<double>>& A, double omega) {
        return entropy::toral_translocal(maps::toral_eigen_data(A), omega);
      },
      py::arg("matrix"), py::arg("omega"));

  py::class_<measures::Measure>(m, "Measure")
      .def_static("parse", &measures::Measure::parse)
      .def_static("lebesgue_circle", &measures::Measure::lebesgue_circle)
      .def_static("bernoulli", &measures::Measure::bernoulli, py::arg("p"), py::arg("beta") = std::numbers::e)
      .def_static("dirac", &measures::Measure::dirac)
      .def_property_readonly("id", &measures::Measure::id);
  m.def("ball_measure", &measures::ball_measure);
  py::class_<measures::LocalPressureEstimate>(m, "LocalPressureEstimate")
      .def_readonly("value", &measures::LocalPressureEstimate::value)
      .def_readonly("omega", &measures::LocalPressureEstimate::omega)
      .def_readonly("window", &measures::LocalPressureEstimate::window);
  py::class_<measures::LocalPressurePair>(m, "LocalPressurePair")
      .def_readonly("upper", &measures::LocalPressurePair::upper)
      .def_readonly("lower", &measures::LocalPressurePair::lower);
  m.def("brin_katok", &measures::brin_katok, py::arg("system"), py::arg("mu"), py::arg("x"),
        py::arg("schedule") = entropy::Schedule::defaults());
  m.def("local_pressure", &measures::local_pressure, py::arg("system"), py::arg("mu"), py::arg("phi"), py::arg("x"),
        py::arg("schedule") = entropy::Schedule::defaults());
  m.def("translocal_local_pressure", &measures::translocal_local_pressure, py::arg("system"), py::arg("mu"),
        py::arg("phi"), py::arg("x"), py::arg("omega"), py::arg("schedule") = entropy::Schedule::defaults());

  py::class_<pressure::Region>(m, "Region")
      .def_static("ball", &pressure::Region::ball)
      .def_static("point", &pressure::Region::point)
      .def_static("whole", &pressure::Region::whole)
      .def("__repr__", &pressure::Region::describe);
  py::enum_<pressure::Variant>(m, "Variant")
      .value("bowen_ball", pressure::Variant::bowen_ball)
      .value("translocal_upper", pressure::Variant::translocal_upper)
      .value("translocal_lower", pressure::Variant::translocal_lower);
  py::class_<pressure::CriticalExponent>(m, "CriticalExponent")
      .def_readonly("value", &pressure::CriticalExponent::value)
      .def_readonly("s_lo", &pressure::CriticalExponent::s_lo)
      .def_readonly("s_hi", &pressure::CriticalExponent::s_hi)
      .def_readonly("lo", &pressure::CriticalExponent::lo)
      .def_readonly("hi", &pressure::CriticalExponent::hi)
      .def_readonly("trends", &pressure::CriticalExponent::trends);
  py::class_<pressure::CoverOptions>(m, "CoverOptions").def(py::init<>());
  py::class_<pressure::CoverSet>(m, "CoverSet")
      .def_static("bowen", &pressure::CoverSet::bowen, py::arg("system"), py::arg("Z"), py::arg("phi"), py::arg("r"),
                  py::arg("N_min"), py::arg("N_max"), py::arg("opts") = pressure::CoverOptions{})
      .def_static("translocal", &pressure::CoverSet::translocal, py::arg("system"), py::arg("Z"), py::arg("phi"),
                  py::arg("omega"), py::arg("N_min"), py::arg("N_max"), py::arg("opts") = pressure::CoverOptions{})
      .def("log_weight", &pressure::CoverSet::log_weight);
  m.def(
      "critical_exponent",
      [](const pressure::CoverSet& c, pressure::Variant v, double tol) { return pressure::critical_exponent(c, v, tol); },
      py::arg("covers"), py::arg("variant") = pressure::Variant::bowen_ball, py::arg("tol") = 0.02);

  py::class_<symbolic::CodeWordFamily>(m, "CodeWordFamily")
      .def_static("parse", &symbolic::CodeWordFamily::parse)
      .def_property_readonly("id", &symbolic::CodeWordFamily::id)
      .def("code_word", &symbolic::CodeWordFamily::code_word, py::arg("k"), py::arg("cap") = 1u << 22);
  py::class_<symbolic::KraftSolution>(m, "KraftSolution")
      .def_readonly("h", &symbolic::KraftSolution::h)
      .def_readonly("residual", &symbolic::KraftSolution::residual)
      .def_readonly("truncation", &symbolic::KraftSolution::truncation);
  m.def(
      "kraft_entropy", [](const std::vector<double>& L, double tol) { return symbolic::kraft_entropy(L, tol); },
      py::arg("lengths"), py::arg("tol") = 1e-12);
  m.def(
      "kraft_entropy",
      [](const symbolic::CodeWordFamily& f, double tol) { return symbolic::kraft_entropy(f, tol); },
      py::arg("family"), py::arg("tol") = 1e-12);
}

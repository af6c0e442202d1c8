#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "translocal/errors.hpp"
#include "translocal/maps.hpp"
#include "translocal/measures.hpp"
#include "translocal/pressure.hpp"
#include "translocal/symbolic.hpp"

namespace translocal::cli {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKinds{"restricted-entropy", "yz-function", "translocal",          "lyapunov",
                                   "brin-katok",         "local-pressure", "translocal-pressure", "pressure",
                                   "kraft",              "audit"};

const std::set<std::string> kKeys{"kind",      "system",   "points",   "random_points", "seed",     "omega",
                                  "potential", "measure",  "region",   "n_min",         "n_max",    "epsilon",
                                  "budget",    "theta",    "strict",   "delta",         "lyapunov_n", "r",
                                  "N_min",     "N_max",    "samples",  "tolerance",     "lengths",  "family",
                                  "expected",  "provenance"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double to_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw ConfigError(where + ": '" + text + "' is not a number");
  return v;
}

std::int64_t to_integer(const std::string& text, const std::string& where) {
  const double v = to_number(text, where);
  if (v != std::floor(v) || std::fabs(v) > 9e15) throw ConfigError(where + ": '" + text + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

std::vector<double> to_numbers(const std::string& text, const std::string& where) {
  std::vector<double> out;
  for (const auto& t : split(text, ',')) out.push_back(to_number(t, where));
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// ---------------------------------------------------------------- points

PhasePoint parse_point(const maps::System& sys, const std::string& spec, const std::string& where) {
  if (sys.space() == Space::symbolic) {
    if (spec == "u" || spec == "v" || spec == "w") {
      const auto uvw = symbolic::make_uvw(1 << 16);
      return spec == "u" ? uvw.u : spec == "v" ? uvw.v : uvw.w;
    }
    std::string body = spec.rfind("word:", 0) == 0 ? spec.substr(5) : spec;
    std::vector<int> w;
    for (char c : body) {
      if (c < '0' || c > '9') throw ConfigError(where + ": symbolic point '" + spec + "' must be a digit word");
      w.push_back(c - '0');
    }
    if (w.empty()) throw ConfigError(where + ": empty symbolic point");
    return PhasePoint::word(std::move(w));
  }
  const auto c = to_numbers(spec, where);
  const std::size_t need = sys.space() == Space::disk ? 2 : sys.dim();
  if (c.size() != need)
    throw ConfigError(where + ": point '" + spec + "' needs " + std::to_string(need) + " coordinate(s) for " +
                      sys.id());
  switch (sys.space()) {
    case Space::circle: return PhasePoint::circle(wrap_unit(c[0]));
    case Space::interval:
      if (c[0] < 0 || c[0] > 1) throw ConfigError(where + ": interval point outside [0,1]");
      return PhasePoint::interval(c[0]);
    case Space::disk:
      if (c[0] < 0 || c[0] > 1) throw ConfigError(where + ": disk radius outside [0,1]");
      return PhasePoint::disk(c[0], c[1]);
    case Space::torus: {
      std::vector<double> x;
      for (double v : c) x.push_back(wrap_unit(v));
      return PhasePoint::torus(std::move(x));
    }
    case Space::symbolic: break;
  }
  throw ConfigError(where + ": unsupported point");
}

std::vector<PhasePoint> random_points(const maps::System& sys, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PhasePoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    switch (sys.space()) {
      case Space::circle: out.push_back(PhasePoint::circle(u(rng))); break;
      case Space::interval: out.push_back(PhasePoint::interval(u(rng))); break;
      case Space::disk: out.push_back(PhasePoint::disk(std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng))); break;
      case Space::torus: {
        std::vector<double> x(sys.dim());
        for (auto& v : x) v = u(rng);
        out.push_back(PhasePoint::torus(std::move(x)));
        break;
      }
      case Space::symbolic: {
        const auto& shift = dynamic_cast<const maps::ShiftMap&>(sys);
        if (shift.coded()) throw ConfigError("random points need a full shift, not " + sys.id());
        std::uniform_int_distribution<int> sym(0, shift.alphabet() - 1);
        std::vector<int> w(4096);
        for (auto& s : w) s = sym(rng);
        out.push_back(PhasePoint::word(std::move(w), 0, 4096));
        break;
      }
    }
  }
  return out;
}

pressure::Region parse_region(const maps::System& sys, const std::string& spec, const std::string& where) {
  pressure::Region z;
  for (const auto& part : split(spec, '|')) {
    if (part == "whole") {
      const PhasePoint c = sys.space() == Space::symbolic ? PhasePoint::word({0})
                           : sys.space() == Space::disk   ? PhasePoint::disk(0.0, 0.0)
                           : sys.space() == Space::torus  ? PhasePoint::torus(std::vector<double>(sys.dim(), 0.0))
                           : sys.space() == Space::interval ? PhasePoint::interval(0.5)
                                                            : PhasePoint::circle(0.0);
      // radius 1 of the shift metric is the whole space only for beta >= 1
      z.add(BallSpec(c, sys.space() == Space::interval ? 0.5 : sys.space() == Space::disk ? 2.0 : 1.0, true));
    } else if (part.rfind("ball:", 0) == 0 || part.rfind("cball:", 0) == 0) {
      const bool closed = part[0] == 'c';
      const std::string body = part.substr(closed ? 6 : 5);
      const auto at = body.rfind('@');
      if (at == std::string::npos) throw ConfigError(where + ": ball '" + part + "' must read ball:<point>@<radius>");
      const double rad = to_number(trim(body.substr(at + 1)), where);
      if (!(rad > 0)) throw ConfigError(where + ": ball radius must be positive");
      z.add(BallSpec(parse_point(sys, trim(body.substr(0, at)), where), rad, closed));
    } else if (part.rfind("point:", 0) == 0) {
      z.add(parse_point(sys, trim(part.substr(6)), where));
    } else {
      throw ConfigError(where + ": unknown region element '" + part + "'");
    }
  }
  if (z.empty()) throw ConfigError(where + ": empty region");
  return z;
}

// ---------------------------------------------------------------- closed forms

const double kLog3 = std::log(3.0);

bool is(const maps::System& sys, const char* id) { return sys.id() == id; }

std::optional<double> potential_shift(const maps::Potential& phi, double log_derivative) {
  switch (phi.kind()) {
    case maps::Potential::Kind::zero: return 0.0;
    case maps::Potential::Kind::constant: return phi.parameter();
    case maps::Potential::Kind::geometric: return -phi.parameter() * log_derivative;
    case maps::Potential::Kind::table: return std::nullopt;
  }
  return std::nullopt;
}

double positive_log_sum(const maps::ToralMap& t) {
  double s = 0.0;
  for (const auto& e : t.eigen_data())
    if (e.modulus > 1.0) s += e.multiplicity * std::log(e.modulus);
  return s;
}

std::optional<Expected> closed_form(const ExperimentConfig& e, const maps::System& sys, const PhasePoint* x,
                                    std::optional<double> omega, const maps::Potential& phi) {
  if (e.expected) return Expected{*e.expected, e.provenance.empty() ? "user-registered value" : e.provenance};
  const auto* toral = dynamic_cast<const maps::ToralMap*>(&sys);
  const auto* shift = dynamic_cast<const maps::ShiftMap*>(&sys);
  const std::string& k = e.kind;
  if (k == "translocal" && omega) {
    const double w = *omega;
    if (is(sys, "tripling"))
      return Expected{std::max(0.0, 1.0 - w / kLog3) * kLog3, "(1 - omega/log 3) log 3, clamped at 0"};
    if (is(sys, "g3branch") && x && std::fabs(x->coord(0) - 2.0 / 3) < 1e-12)
      return Expected{std::max(0.0, 1.0 - w / std::log(4.0)) * kLog3,
                      "(1 - omega/lambda(z)) log 3 with lambda(2/3) = log 4"};
    if (is(sys, "pomeau-manneville") && x && x->coord(0) == 0.0 && w > 0)
      return Expected{0.0, "neutral fixed point: h_omega(0) = 0 for omega > 0"};
    if (is(sys, "sqrtmap") && x && x->coord(0) == 0.0 && w > 0)
      return Expected{std::log(2.0), "h_omega(0) = h_top = log 2"};
    if (toral) return Expected{entropy::toral_translocal(toral->eigen_data(), w), "sum of (log|lambda| - omega)_+"};
    if (is(sys, "identity")) return Expected{0.0, "isometry"};
    return std::nullopt;
  }
  if (k == "restricted-entropy" || k == "yz-function") {
    if (k == "yz-function" && x && sys.id().rfind("staircase", 0) == 0) {
      const int lv = dynamic_cast<const maps::StaircaseMap&>(sys).level(x->coord(0));
      if (lv >= 1) return Expected{std::log(2.0 * lv + 1.0), "log(2n+1) on the level (2^-n, 2^(1-n)]"};
      return std::nullopt;
    }
    if (is(sys, "tripling") || is(sys, "g3branch")) return Expected{kLog3, "h_top = log 3 on every open set"};
    if (toral) return Expected{positive_log_sum(*toral), "sum of log|lambda| over expanding eigenvalues"};
    if (shift && !shift->coded()) return Expected{std::log(shift->alphabet()), "log of the alphabet size"};
    return std::nullopt;
  }
  if (k == "lyapunov") {
    if (is(sys, "tripling")) return Expected{kLog3, "log|f'| = log 3"};
    if (is(sys, "g3branch") && x && std::fabs(x->coord(0) - 2.0 / 3) < 1e-12)
      return Expected{std::log(4.0), "fixed point 2/3 on the slope-4 branch"};
    if (toral) {
      double top = 0.0;
      for (const auto& ev : toral->eigen_data()) top = std::max(top, std::log(ev.modulus));
      return Expected{top, "top log|lambda|"};
    }
    return std::nullopt;
  }
  const bool lebesgue = e.measure == "lebesgue-circle";
  if (k == "brin-katok") {
    if (is(sys, "tripling") && lebesgue) return Expected{kLog3, "mu(B_n) = 2 eps 3^-(n-1)"};
    if (toral && e.measure.rfind("lebesgue-torus", 0) == 0)
      return Expected{positive_log_sum(*toral), "Lebesgue entropy of a toral automorphism"};
    if (shift && !shift->coded() && e.measure.rfind("bernoulli:", 0) == 0) {
      const auto mu = measures::Measure::parse(e.measure);
      const auto& p = mu.weights();
      if (std::all_of(p.begin(), p.end(), [&](double q) { return std::fabs(q - p[0]) < 1e-12; }))
        return Expected{std::log(static_cast<double>(p.size())), "uniform Bernoulli entropy log k"};
    }
    return std::nullopt;
  }
  if (is(sys, "tripling") && lebesgue && (k == "local-pressure" || k == "translocal-pressure")) {
    const auto sh = potential_shift(phi, kLog3);
    if (!sh) return std::nullopt;
    if (k == "local-pressure") return Expected{kLog3 + *sh, "log 3 plus the Birkhoff average of phi"};
    if (omega) return Expected{*omega + *sh, "mu(B(x, e^-omega n)) = 2 e^-omega n, plus the average of phi"};
    return std::nullopt;
  }
  if (k == "pressure" && is(sys, "tripling")) {
    const auto sh = potential_shift(phi, kLog3);
    if (!sh) return std::nullopt;
    if (omega) return Expected{*omega + *sh, "uniform metric-ball cover count e^(omega n)"};
    return Expected{kLog3 + *sh, "cylinder sum: log 3 plus phi on the constant slope"};
  }
  if (k == "kraft") {
    auto L = e.lengths;
    std::sort(L.begin(), L.end());
    if (L == std::vector<double>{1.0, 2.0})
      return Expected{std::log((1.0 + std::sqrt(5.0)) / 2.0), "root of e^-h + e^-2h = 1: log golden ratio"};
    if (!L.empty() && L.front() == L.back())
      return Expected{std::log(static_cast<double>(L.size())) / L.front(), "k equal lengths L: log(k)/L"};
    return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- config

ExperimentConfig parse_experiment(const std::string& section, const pt::ptree& t,
                                  std::optional<std::size_t> budget_cap) {
  ExperimentConfig e;
  const auto colon = section.find(':');
  e.name = colon == std::string::npos ? "experiment" : trim(section.substr(colon + 1));
  auto where = [&](const std::string& key) { return "[" + section + "] " + key; };
  for (const auto& [key, _] : t)
    if (!kKeys.count(key)) throw ConfigError(where(key) + ": unknown key");
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = t.get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  };
  auto kind = get("kind");
  if (!kind) throw ConfigError(where("kind") + ": missing");
  if (!kKinds.count(*kind)) throw ConfigError(where("kind") + ": unknown experiment kind '" + *kind + "'");
  e.kind = *kind;
  if (colon == std::string::npos) e.name = e.kind;

  if (e.kind != "kraft") {
    auto sys = get("system");
    if (!sys) throw ConfigError(where("system") + ": missing");
    e.system = *sys;
  }
  if (auto v = get("points")) e.points = split(*v, ';');
  if (auto v = get("random_points")) {
    const auto n = to_integer(*v, where("random_points"));
    if (n < 0) throw ConfigError(where("random_points") + ": must be >= 0");
    e.random_points = static_cast<std::size_t>(n);
  }
  if (auto v = get("seed")) e.seed = static_cast<std::uint64_t>(to_integer(*v, where("seed")));
  if (auto v = get("omega")) {
    e.omegas = to_numbers(*v, where("omega"));
    for (double w : e.omegas)
      if (!(w >= 0) || !std::isfinite(w)) throw ConfigError(where("omega") + ": omega values must be >= 0");
  }
  if (auto v = get("potential")) e.potential = *v;
  if (auto v = get("measure")) e.measure = *v;
  if (auto v = get("region")) e.region = *v;

  std::int64_t n_min = e.schedule.n.front(), n_max = e.schedule.n.back();
  if (auto v = get("n_min")) n_min = to_integer(*v, where("n_min"));
  if (auto v = get("n_max")) n_max = to_integer(*v, where("n_max"));
  std::vector<double> eps = e.schedule.epsilon;
  if (auto v = get("epsilon")) eps = to_numbers(*v, where("epsilon"));
  std::size_t budget = e.schedule.budget;
  if (auto v = get("budget")) {
    const auto b = to_integer(*v, where("budget"));
    if (b <= 0) throw ConfigError(where("budget") + ": must be positive");
    budget = static_cast<std::size_t>(b);
  }
  if (budget_cap) budget = std::min(budget, *budget_cap);
  try {
    e.schedule = entropy::Schedule::make(n_min, n_max, eps, budget);
    if (auto v = get("theta")) e.schedule.theta = to_number(*v, where("theta"));
    if (auto v = get("strict")) e.schedule.strict = *v == "true" || *v == "1";
    e.schedule.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError("[" + section + "] schedule: " + err.what());
  }
  if (auto v = get("delta")) e.deltas = to_numbers(*v, where("delta"));
  if (auto v = get("lyapunov_n")) e.lyapunov_n = to_integer(*v, where("lyapunov_n"));
  if (auto v = get("r")) e.r = to_number(*v, where("r"));
  if (auto v = get("N_min")) e.N_min = to_integer(*v, where("N_min"));
  if (auto v = get("N_max")) e.N_max = to_integer(*v, where("N_max"));
  if (e.N_min < 1 || e.N_max < e.N_min + 2) throw ConfigError(where("N_max") + ": need 1 <= N_min and N_max >= N_min + 2");
  if (auto v = get("samples")) e.samples = static_cast<std::size_t>(std::max<std::int64_t>(1, to_integer(*v, where("samples"))));
  if (auto v = get("tolerance")) e.tolerance = to_number(*v, where("tolerance"));
  else if (e.kind == "kraft") e.tolerance = 1e-9;
  if (auto v = get("lengths")) e.lengths = to_numbers(*v, where("lengths"));
  if (auto v = get("family")) e.family = *v;
  if (auto v = get("expected")) e.expected = to_number(*v, where("expected"));
  if (auto v = get("provenance")) e.provenance = *v;

  // Resolve every id now so that a bad one is a config error.
  if (e.kind == "kraft") {
    if (e.lengths.empty() == e.family.empty()) throw ConfigError(where("lengths") + ": give exactly one of lengths, family");
    if (!e.family.empty()) symbolic::CodeWordFamily::parse(e.family);
    for (double L : e.lengths)
      if (!(L >= 1) || L != std::floor(L)) throw ConfigError(where("lengths") + ": lengths must be positive integers");
    return e;
  }
  auto sys = maps::make_system(e.system);
  auto phi = maps::Potential::parse(e.potential);
  try {
    if (sys->space() != Space::symbolic) phi.check(*sys);
  } catch (const ContractViolation& err) {
    throw ConfigError(where("potential") + ": " + err.what());
  }
  for (const auto& p : e.points) parse_point(*sys, p, where("points"));
  const bool pointwise = e.kind == "yz-function" || e.kind == "translocal" || e.kind == "lyapunov" ||
                         e.kind == "brin-katok" || e.kind == "local-pressure" || e.kind == "translocal-pressure";
  if (pointwise && e.points.empty() && e.random_points == 0)
    throw ConfigError(where("points") + ": " + e.kind + " needs points or random_points");
  if ((e.kind == "translocal" || e.kind == "translocal-pressure") && e.omegas.empty())
    throw ConfigError(where("omega") + ": " + e.kind + " needs an omega grid");
  const bool needs_mu = e.kind == "brin-katok" || e.kind == "local-pressure" || e.kind == "translocal-pressure" ||
                        e.kind == "audit";
  if (needs_mu) {
    if (e.measure.empty()) throw ConfigError(where("measure") + ": " + e.kind + " needs a measure");
    const auto mu = measures::Measure::parse(e.measure);
    if (!measures::certified_invariant(*sys, mu))
      throw ConfigError(where("measure") + ": (" + sys->id() + ", " + mu.id() + ") is not a certified invariant pair");
  }
  if (e.kind == "restricted-entropy" || e.kind == "pressure" || e.kind == "audit") {
    const auto z = parse_region(*sys, e.region, where("region"));
    if (e.kind == "restricted-entropy" && !z.points.empty())
      throw ConfigError(where("region") + ": restricted entropy takes balls only");
  }
  if (e.kind == "translocal-pressure" || (e.kind == "pressure" && !e.omegas.empty()) || e.kind == "audit")
    for (double w : e.omegas)
      if (!(w > 0)) throw ConfigError(where("omega") + ": metric-ball covers need omega > 0");
  return e;
}

// ---------------------------------------------------------------- cells

struct Cell {
  std::size_t experiment;
  std::optional<PhasePoint> point;
  std::optional<BallSpec> ball;
  std::optional<double> omega;
};

void finish(ReportRow& row, const std::optional<Expected>& ex) {
  if (!ex) return;
  row.expected = ex->value;
  row.provenance = ex->provenance;
  // budget-truncated windows still carry an estimate; only a missing one fails
  if (!std::isfinite(row.value) && std::isfinite(ex->value)) {
    row.passed = false;
    return;
  }
  const double err = std::fabs(row.value - ex->value);
  // relative error; absolute when the closed form vanishes
  row.rel_error = std::fabs(ex->value) > 1e-12 ? err / std::fabs(ex->value) : err;
  row.passed = *row.rel_error <= row.tolerance;
}

void fill_window(ReportRow& row, const entropy::RateEstimate& w) {
  row.residual = w.residual;
  row.n_min = w.n_min;
  row.n_max = w.n_max;
  if (std::isfinite(w.epsilon)) row.epsilon = w.epsilon;
  row.incomplete = row.incomplete || w.incomplete;
  row.notes.insert(row.notes.end(), w.notes.begin(), w.notes.end());
}

ReportRow run_cell(const ExperimentConfig& e, const Cell& c, std::vector<std::string>& transcript) {
  ReportRow row;
  row.experiment = e.name;
  row.kind = e.kind;
  row.system = e.kind == "kraft" ? (e.family.empty() ? "lengths" : "codedshift:" + e.family) : e.system;
  row.potential = e.potential;
  row.tolerance = e.tolerance;
  row.omega = c.omega;
  row.n_min = e.schedule.n.front();
  row.n_max = e.schedule.n.back();
  if (c.point) row.point = measures::describe(*c.point);

  if (e.kind == "kraft") {
    const auto sol = e.family.empty() ? symbolic::kraft_entropy(e.lengths)
                                      : symbolic::kraft_entropy(symbolic::CodeWordFamily::parse(e.family));
    row.value = sol.h;
    row.residual = sol.residual;
    row.n_min = row.n_max = 0;
    row.point = e.family.empty() ? "lengths " + [&] {
      std::string s;
      for (double L : e.lengths) s += (s.empty() ? "" : " ") + fmt(L);
      return s;
    }() : e.family;
    finish(row, closed_form(e, *maps::make_system("tripling"), nullptr, std::nullopt, maps::Potential::zero()));
    if (!e.family.empty() && !(sol.h < std::log(2.0))) {
      row.passed = false;
      row.notes.push_back("coded-shift entropy not below log 2");
    }
    return row;
  }

  const auto sys = maps::make_system(e.system);
  const auto phi = maps::Potential::parse(e.potential);
  const PhasePoint* x = c.point ? &*c.point : nullptr;
  auto expected = [&] { return closed_form(e, *sys, x, c.omega, phi); };

  try {
    if (e.kind == "restricted-entropy") {
      row.point = (c.ball->closed ? "B[" : "B(") + measures::describe(c.ball->center) + "; " + fmt(c.ball->radius) +
                  (c.ball->closed ? "]" : ")");
      const auto est = entropy::restricted_entropy(*sys, *c.ball, e.schedule);
      row.value = est.value;
      fill_window(row, est);
    } else if (e.kind == "yz-function") {
      const auto est = entropy::yz_entropy_function(*sys, *x, e.deltas, e.schedule);
      row.value = est.value;
      fill_window(row, est);
    } else if (e.kind == "translocal") {
      const auto est = entropy::translocal_entropy(*sys, *x, *c.omega, e.schedule);
      row.value = est.upper.value;
      row.lower = est.lower.value;
      fill_window(row, est.upper);
    } else if (e.kind == "lyapunov") {
      const auto est = entropy::lyapunov_exponent(*sys, *x, e.lyapunov_n);
      row.value = est.upper;
      row.lower = est.lower;
      row.residual = est.upper - est.lower;
      row.n_min = (e.lyapunov_n + 1) / 2;
      row.n_max = e.lyapunov_n;
    } else if (e.kind == "brin-katok" || e.kind == "local-pressure" || e.kind == "translocal-pressure") {
      const auto mu = measures::Measure::parse(e.measure);
      const auto lp = e.kind == "brin-katok"   ? measures::brin_katok(*sys, mu, *x, e.schedule)
                      : e.kind == "local-pressure" ? measures::local_pressure(*sys, mu, phi, *x, e.schedule)
                                                   : measures::translocal_local_pressure(*sys, mu, phi, *x, *c.omega,
                                                                                         e.schedule);
      row.value = lp.upper.value;
      row.lower = lp.lower.value;
      fill_window(row, lp.upper.window);
    } else if (e.kind == "pressure") {
      const auto z = parse_region(*sys, e.region, e.region);
      row.point = z.describe();
      row.n_min = e.N_min;
      row.n_max = e.N_max;
      pressure::CoverOptions co;
      co.budget = e.schedule.budget;
      if (c.omega) {
        const auto cs = pressure::CoverSet::translocal(*sys, z, phi, *c.omega, e.N_min, e.N_max, co);
        const auto up = pressure::critical_exponent(cs, pressure::Variant::translocal_upper);
        const auto lo = pressure::critical_exponent(cs, pressure::Variant::translocal_lower);
        row.value = up.value;
        row.lower = lo.value;
        row.residual = up.s_hi - up.s_lo;
        row.notes = cs.notes();
      } else {
        const auto cs = pressure::CoverSet::bowen(*sys, z, phi, e.r, e.N_min, e.N_max, co);
        const auto ce = pressure::critical_exponent(cs, pressure::Variant::bowen_ball);
        row.value = ce.value;
        row.residual = ce.s_hi - ce.s_lo;
        row.epsilon = e.r;
        row.notes = cs.notes();
        row.notes.push_back("bracket [" + fmt(ce.s_lo) + ", " + fmt(ce.s_hi) + "], uncertainty [" + fmt(ce.lo) + ", " +
                            fmt(ce.hi) + "]");
      }
    } else if (e.kind == "audit") {
      const auto mu = measures::Measure::parse(e.measure);
      const auto z = parse_region(*sys, e.region, e.region);
      pressure::AuditOptions ao;
      ao.schedule = e.schedule;
      ao.r = e.r;
      ao.N_min = e.N_min;
      ao.N_max = e.N_max;
      ao.tolerance = e.tolerance;
      ao.cover.budget = e.schedule.budget;
      const auto rep = pressure::ma_wen_audit(*sys, mu, phi, z, c.omega, e.samples, ao);
      row.point = z.describe();
      row.value = rep.upper_exponent.value;
      row.lower = rep.lower_exponent.value;
      if (!c.omega) row.epsilon = e.r;
      row.passed = rep.passed;
      row.provenance = "audit: " + std::string(rep.passed ? "pass" : "fail");
      transcript = rep.lines;
      return row;
    }
  } catch (const BudgetExceeded& err) {
    row.incomplete = true;
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.notes.push_back(err.what());
  } catch (const Unbracketed& err) {
    row.incomplete = true;
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.notes.push_back(std::string("critical exponent not bracketed: ") + err.what());
  }
  finish(row, expected());
  if (std::isnan(row.value)) row.passed = false;
  return row;
}

nlohmann::ordered_json row_json(const ReportRow& r) {
  nlohmann::ordered_json j;
  auto num = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    if (!v || !std::isfinite(*v)) return v ? nlohmann::ordered_json(fmt(*v)) : nlohmann::ordered_json(nullptr);
    return *v;
  };
  j["point"] = r.point;
  j["n_min"] = r.n_min;
  j["n_max"] = r.n_max;
  j["epsilon"] = num(r.epsilon);
  j["omega"] = num(r.omega);
  j["value"] = num(r.value);
  j["lower"] = num(r.lower);
  j["residual"] = num(r.residual);
  j["expected"] = num(r.expected);
  j["rel_error"] = num(r.rel_error);
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  j["incomplete"] = r.incomplete;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

RunConfig load_config(const std::string& path, std::optional<std::size_t> budget_cap) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError(path + ":" + std::to_string(err.line()) + ": " + err.message());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section == "output") {
      for (const auto& [key, v] : body) {
        const std::string val = trim(v.get_value<std::string>());
        if (key == "csv") cfg.csv_path = val;
        else if (key == "json") cfg.json_path = val;
        else if (key == "threads") cfg.threads = static_cast<unsigned>(std::max<std::int64_t>(1, to_integer(val, "[output] threads")));
        else throw ConfigError("[output] " + key + ": unknown key");
      }
    } else if (section == "experiment" || section.rfind("experiment:", 0) == 0) {
      cfg.experiments.push_back(parse_experiment(section, body, budget_cap));
    } else if (body.empty() && !body.data().empty()) {
      throw ConfigError(path + ": key '" + section + "' outside any section");
    } else {
      throw ConfigError("[" + section + "]: unknown section");
    }
  }
  if (cfg.experiments.empty()) throw ConfigError(path + ": no [experiment] section");
  return cfg;
}

Report run(const RunConfig& cfg) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
    const auto& e = cfg.experiments[i];
    if (e.kind == "kraft") {
      cells.push_back({i, std::nullopt, std::nullopt, std::nullopt});
      continue;
    }
    const auto sys = maps::make_system(e.system);
    std::vector<PhasePoint> pts;
    for (const auto& p : e.points) pts.push_back(parse_point(*sys, p, e.name));
    for (auto& p : random_points(*sys, e.random_points, e.seed)) pts.push_back(std::move(p));
    std::vector<std::optional<double>> ws;
    for (double w : e.omegas) ws.emplace_back(w);
    if (ws.empty()) ws.emplace_back(std::nullopt);
    if (e.kind == "restricted-entropy") {
      for (const auto& b : parse_region(*sys, e.region, e.name).balls) cells.push_back({i, std::nullopt, b, std::nullopt});
    } else if (e.kind == "pressure" || e.kind == "audit") {
      for (const auto& w : ws) cells.push_back({i, std::nullopt, std::nullopt, w});
    } else if (e.kind == "translocal" || e.kind == "translocal-pressure") {
      for (const auto& w : ws)
        for (const auto& p : pts) cells.push_back({i, p, std::nullopt, w});
    } else {
      for (const auto& p : pts) cells.push_back({i, p, std::nullopt, std::nullopt});
    }
  }

  std::vector<ReportRow> rows(cells.size());
  std::vector<std::vector<std::string>> transcripts(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < cells.size();) {
      try {
        rows[k] = run_cell(cfg.experiments[cells[k].experiment], cells[k], transcripts[k]);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  Report rep;
  rep.rows = rows;
  nlohmann::ordered_json exps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
    const auto& e = cfg.experiments[i];
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["kind"] = e.kind;
    j["system"] = e.kind == "kraft" ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(e.system);
    j["potential"] = e.potential;
    bool passed = true, incomplete = false;
    double worst = 0.0;
    std::size_t n = 0, checked = 0;
    nlohmann::ordered_json rj = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (cells[k].experiment != i) continue;
      const auto& r = rows[k];
      ++n;
      passed = passed && r.passed;
      incomplete = incomplete || r.incomplete;
      if (r.rel_error) {
        ++checked;
        worst = std::max(worst, *r.rel_error);
      }
      rj.push_back(row_json(r));
      for (const auto& line : transcripts[k]) rep.text.push_back(line);
    }
    j["cells"] = n;
    j["checked"] = checked;
    j["max_rel_error"] = checked ? nlohmann::ordered_json(worst) : nlohmann::ordered_json(nullptr);
    j["passed"] = passed;
    j["incomplete"] = incomplete;
    j["rows"] = rj;
    exps.push_back(j);
    rep.passed = rep.passed && passed;
    rep.incomplete = rep.incomplete || incomplete;
  }
  rep.summary["passed"] = rep.passed;
  rep.summary["incomplete"] = rep.incomplete;
  rep.summary["experiments"] = exps;
  return rep;
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << csv_field(r.system) << ',' << csv_field(r.point) << ',' << r.n_min
       << ',' << r.n_max << ',' << fmt(r.epsilon) << ',' << fmt(r.omega) << ',' << fmt(r.s) << ','
       << csv_field(r.potential) << ',' << fmt(r.value) << ',' << fmt(r.residual) << ',' << fmt(r.expected) << ','
       << fmt(r.rel_error) << ',' << csv_field(r.provenance) << '\n';
  }
  return os.str();
}

std::string list_catalogue() {
  std::ostringstream os;
  os << "systems:\n";
  for (const auto& c : maps::catalogue()) os << "  " << c.id << "  [" << c.space << "]  " << c.description << '\n';
  os << "measures:\n"
     << "  lebesgue-circle  Lebesgue measure on the circle\n"
     << "  lebesgue-torus[:d]  Lebesgue measure on the d-torus (default d = 2)\n"
     << "  bernoulli:p0,p1,...  Bernoulli product measure on a full shift\n"
     << "  dirac:x[,y,...]  point mass\n";
  os << "potentials:\n"
     << "  zero  phi = 0, pressure reduces to entropy\n"
     << "  constant:c  phi = c, pressure shifts by c\n"
     << "  geometric:t  phi = -t log|f'|, pressure of tripling is (1 - t) log 3\n"
     << "  table:v0,v1,...  piecewise constant on a uniform grid of [0,1)\n";
  os << "experiment kinds:\n ";
  for (const auto& k : kKinds) os << ' ' << k;
  os << '\n';
  return os.str();
}

}  // namespace translocal::cli

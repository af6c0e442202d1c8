#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "translocal/errors.hpp"
#include "translocal/maps.hpp"

namespace translocal::maps {

namespace {

using Kind = Branch::Kind;

SystemPtr tripling() {
  return std::make_shared<PiecewiseMap>(
      "tripling", Space::circle,
      std::vector<Branch>{{0.0, 1.0 / 3, Kind::affine, 3.0, 0.0},
                          {1.0 / 3, 2.0 / 3, Kind::affine, 3.0, -1.0},
                          {2.0 / 3, 1.0, Kind::affine, 3.0, -2.0}},
      std::vector<double>{}, std::log(3.0), "x -> 3x mod 1 on the circle, h_top = log 3");
}

SystemPtr g3branch() {
  return std::make_shared<PiecewiseMap>(
      "g3branch", Space::circle,
      std::vector<Branch>{{0.0, 0.5, Kind::affine, 2.0, 0.0},
                          {0.5, 0.75, Kind::affine, 4.0, -2.0},
                          {0.75, 1.0, Kind::affine, 4.0, -3.0}},
      std::vector<double>{0.0, 0.5}, std::log(3.0),
      "slopes 2, 4, 4 on [0,1/2), [1/2,3/4), [3/4,1); h_top = log 3, lambda varies");
}

SystemPtr pomeau_manneville() {
  return std::make_shared<PiecewiseMap>(
      "pomeau-manneville", Space::interval,
      std::vector<Branch>{{0.0, 0.5, Kind::mobius}, {0.5, 1.0, Kind::affine, 2.0, -1.0}},
      std::vector<double>{0.5}, std::log(2.0),
      "x/(1-x) on [0,1/2), 2x-1 on [1/2,1); neutral fixed point 0, h_omega(0) = 0");
}

SystemPtr sqrtmap() {
  return std::make_shared<PiecewiseMap>(
      "sqrtmap", Space::interval,
      std::vector<Branch>{{0.0, 0.5, Kind::sqrt2}, {0.5, 1.0, Kind::affine, 2.0, -1.0}},
      std::vector<double>{0.0, 0.5}, std::log(2.0),
      "sqrt(2x) on [0,1/2), 2x-1 on [1/2,1); h_omega(0) = log 2 for every omega");
}

int parse_positive(const std::string& s, const std::string& id) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size() && v >= 1) return v;
  } catch (...) {
  }
  throw ConfigError("bad integer '" + s + "' in system id '" + id + "'");
}

SystemPtr toral_from_literal(const std::string& literal, const std::string& id) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(literal);
  } catch (const std::exception&) {
    throw ConfigError("toral matrix literal in '" + id + "' is not valid JSON");
  }
  if (!j.is_array() || j.empty()) throw ConfigError("toral matrix in '" + id + "' must be a nonempty array");
  const auto d = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXi A(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw ConfigError("toral matrix in '" + id + "' must be square");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number_integer()) throw ConfigError("toral matrix in '" + id + "' must have integer entries");
      A(r, c) = v.get<int>();
    }
  }
  return std::make_shared<ToralMap>(A, id);
}

}  // namespace

SystemPtr make_system(const std::string& id) {
  if (id == "tripling") return tripling();
  if (id == "g3branch") return g3branch();
  if (id == "pomeau-manneville") return pomeau_manneville();
  if (id == "sqrtmap") return sqrtmap();
  if (id == "disk") return std::make_shared<DiskMap>();
  if (id == "identity") return std::make_shared<IdentityMap>();
  if (id == "staircase") return std::make_shared<StaircaseMap>();
  if (id == "cat") return toral_from_literal("[[2,1],[1,1]]", "cat");
  if (id.rfind("staircase:", 0) == 0) {
    return std::make_shared<StaircaseMap>(parse_positive(id.substr(10), id));
  }
  if (id.rfind("toral:", 0) == 0) return toral_from_literal(id.substr(6), id);
  if (id.rfind("fullshift:", 0) == 0) return std::make_shared<ShiftMap>(parse_positive(id.substr(10), id));
  if (id.rfind("codedshift:", 0) == 0) {
    return std::make_shared<ShiftMap>(symbolic::CodeWordFamily::parse(id.substr(11)));
  }
  if (id.rfind("iterate:", 0) == 0) {
    const auto colon = id.find(':', 8);
    if (colon == std::string::npos) throw ConfigError("iterate id must read 'iterate:R:<system>', got '" + id + "'");
    const int R = parse_positive(id.substr(8, colon - 8), id);
    auto base = make_system(id.substr(colon + 1));
    if (base->space() == Space::symbolic) throw ConfigError("iterates of symbolic systems are not supported");
    return std::make_shared<IterateMap>(std::move(base), R);
  }
  throw ConfigError("unknown system id '" + id + "'");
}

std::vector<CatalogueEntry> catalogue() {
  std::vector<CatalogueEntry> out;
  for (const char* id : {"tripling", "g3branch", "pomeau-manneville", "sqrtmap", "staircase", "disk",
                         "cat", "identity", "fullshift:2", "codedshift:linear:1,0"}) {
    auto s = make_system(id);
    out.push_back({s->id(), to_string(s->space()), s->description()});
  }
  out.push_back({"toral:<matrix>", "torus", "x -> A x mod 1 for a JSON integer matrix, e.g. toral:[[2,1],[1,1]]"});
  out.push_back({"fullshift:<k>", "symbolic", "full shift on k symbols"});
  out.push_back({"codedshift:<family>", "symbolic",
                 "coded shift; families linear:a,b | geometric:c | factorial | words:w1,w2,..."});
  out.push_back({"staircase:<cap>", "interval", "staircase map with a custom level cap"});
  out.push_back({"iterate:<R>:<system>", "any", "R-th iterate of a coordinate system"});
  return out;
}

Potential Potential::constant(double c) {
  Potential p(Kind::constant);
  p.param_ = c;
  return p;
}

Potential Potential::geometric(double t) {
  Potential p(Kind::geometric);
  p.param_ = t;
  return p;
}

Potential Potential::table(std::vector<double> values) {
  if (values.empty()) throw ContractViolation("potential table must be nonempty");
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractViolation("potential table values must be finite");
  }
  Potential p(Kind::table);
  p.table_ = std::move(values);
  return p;
}

Potential Potential::parse(const std::string& id) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos == s.size() && std::isfinite(v)) return v;
    } catch (...) {
    }
    throw ConfigError("bad number '" + s + "' in potential id '" + id + "'");
  };
  if (id == "zero" || id == "0") return zero();
  if (id.rfind("constant:", 0) == 0) return constant(number(id.substr(9)));
  if (id.rfind("geometric:", 0) == 0) return geometric(number(id.substr(10)));
  if (id.rfind("table:", 0) == 0) {
    std::vector<double> v;
    std::stringstream ss(id.substr(6));
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(number(item));
    return table(std::move(v));
  }
  throw ConfigError("unknown potential id '" + id + "'");
}

namespace {
// Shortest text that reads back to the same double.
std::string shortest(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
}  // namespace

std::string Potential::id() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::constant: os << "constant:" << shortest(param_); break;
    case Kind::geometric: os << "geometric:" << shortest(param_); break;
    case Kind::table:
      os << "table:";
      for (std::size_t i = 0; i < table_.size(); ++i) os << (i ? "," : "") << shortest(table_[i]);
      break;
  }
  return os.str();
}

void Potential::check(const System& sys) const {
  if (kind_ == Kind::geometric && !sys.has_derivative()) {
    throw ContractViolation("geometric potential needs a derivative rule, " + sys.id() + " has none");
  }
  if (kind_ == Kind::table && sys.dim() != 1) {
    throw ContractViolation("table potentials are defined on one-dimensional spaces");
  }
}

double Potential::operator()(const System& sys, std::span<const double> x) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::constant: return param_;
    case Kind::geometric: return -param_ * sys.log_abs_derivative(x);
    case Kind::table: {
      const auto m = table_.size();
      auto i = static_cast<std::size_t>(std::max(0.0, std::floor(x[0] * static_cast<double>(m))));
      return table_[std::min(i, m - 1)];
    }
  }
  return 0.0;
}

double Potential::operator()(const System& sys, const PhasePoint& x) const {
  if (sys.space() == Space::symbolic) {
    if (kind_ == Kind::zero) return 0.0;
    if (kind_ == Kind::constant) return param_;
    throw ContractViolation("only zero and constant potentials are defined on shift spaces");
  }
  return (*this)(sys, x.coords());
}

double Potential::birkhoff_sum(const System& sys, const PhasePoint& x, std::int64_t n) const {
  check(sys);
  if (kind_ == Kind::zero) return 0.0;
  if (kind_ == Kind::constant) return param_ * static_cast<double>(n);
  if (sys.space() == Space::symbolic) (void)(*this)(sys, x);
  std::vector<double> c(x.coords().begin(), x.coords().end());
  double s = 0.0;
  for (std::int64_t m = 0; m < n; ++m) {
    s += (*this)(sys, std::span<const double>(c));
    sys.step(c);
  }
  return s;
}

}  // namespace translocal::maps

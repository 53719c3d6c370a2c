#include "lizkit/serialize.hpp"

#include <fstream>

#include "lizkit/errors.hpp"
#include "lizkit/polynomial.hpp"

namespace lizkit {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(errc::kSchemaMismatch, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw Error(errc::kSchemaMismatch, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw Error(errc::kSchemaMismatch, std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

const Json& atom_list(const Json& j) {
  const Json& atoms = field(j, "atoms");
  if (!atoms.is_array()) throw Error(errc::kSchemaMismatch, "\"atoms\" must be an array");
  return atoms;
}

std::vector<double> atom_row(const Json& row, std::size_t arity) {
  if (!row.is_array() || row.size() != arity)
    throw Error(errc::kSchemaMismatch, "atom rows must have " + std::to_string(arity) + " numbers");
  std::vector<double> out;
  for (const Json& v : row) {
    if (!v.is_number()) throw Error(errc::kSchemaMismatch, "atom rows must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Json to_json(const FourierSeries& s) {
  Json coeffs = Json::array();
  for (Eigen::Index i = 0; i < s.coeffs().size(); ++i) coeffs.push_back({s.coeffs()[i].real(), s.coeffs()[i].imag()});
  return {{"period", s.period()}, {"coeffs", coeffs}};
}

FourierSeries fourier_series_from_json(const Json& j) {
  const Json& c = field(j, "coeffs");
  if (!c.is_array() || c.size() % 2 == 0) throw Error(errc::kSchemaMismatch, "\"coeffs\" must hold 2N + 1 pairs");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::vector<double> p = atom_row(c[i], 2);
    v[static_cast<Eigen::Index>(i)] = {p[0], p[1]};
  }
  return FourierSeries(number(j, "period"), v);
}

Json to_json(const AtomicMeasure1D& mu) {
  Json atoms = Json::array();
  for (const Atom1D& a : mu.atoms()) atoms.push_back({a.weight, a.location});
  return {{"period", mu.period()}, {"atoms", atoms}};
}

AtomicMeasure1D atomic_measure_from_json(const Json& j) {
  std::vector<Atom1D> atoms;
  for (const Json& row : atom_list(j)) {
    const std::vector<double> v = atom_row(row, 2);
    atoms.push_back({v[0], v[1]});
  }
  return AtomicMeasure1D(std::move(atoms), j.contains("period") ? number(j, "period") : 1.0);
}

Json to_json(const KernelDescriptor& k) {
  return {{"family", k.family}, {"alpha", k.alpha}, {"m", k.m}, {"d", k.d}};
}

KernelDescriptor kernel_descriptor_from_json(const Json& j) {
  KernelDescriptor k;
  const Json& fam = field(j, "family");
  if (!fam.is_string() || (fam != "fraclap" && fam != "ridge"))
    throw Error(errc::kSchemaMismatch, "kernel family must be \"fraclap\" or \"ridge\"");
  k.family = fam.get<std::string>();
  k.alpha = number(j, "alpha");
  k.m = integer(j, "m");
  k.d = integer(j, "d");
  return k;
}

Json to_json(const Family& family) {
  if (const auto* f = std::get_if<PeriodicFamily>(&family))
    return {{"alpha", f->alpha}, {"period", f->period}, {"order", f->order}};
  if (const auto* f = std::get_if<FracLapFamily>(&family)) return {{"alpha", f->alpha}, {"d", f->dim}};
  const auto& f = std::get<RidgeFamily>(family);
  return {{"m", f.m}, {"d", f.dim}, {"polynomial", f.polynomial}};
}

Family family_from_json(const std::string& name, const Json& params) {
  if (name == "periodic") {
    PeriodicFamily f;
    f.alpha = number(params, "alpha");
    f.period = number(params, "period");
    f.order = params.contains("order") ? integer(params, "order") : kDefaultTruncation;
    return f;
  }
  if (name == "fraclap") {
    const FracLapFamily f{number(params, "alpha"), integer(params, "d")};
    if (f.dim < 1) throw Error(errc::kSchemaMismatch, "fraclap family needs d >= 1");
    return f;
  }
  if (name == "ridge") {
    RidgeFamily f;
    f.m = integer(params, "m");
    f.dim = integer(params, "d");
    if (params.contains("polynomial")) {
      if (!params.at("polynomial").is_boolean()) throw Error(errc::kSchemaMismatch, "\"polynomial\" must be a boolean");
      f.polynomial = params.at("polynomial").get<bool>();
    }
    if (f.m < 2 || f.dim < 1) throw Error(errc::kSchemaMismatch, "ridge family needs m >= 2 and d >= 1");
    return f;
  }
  throw Error(errc::kSchemaMismatch, "unknown model family \"" + name + "\"");
}

Json to_json(const Model& model) {
  const Family family = model_family(model);
  Json j{{"family", family_name(family)}, {"params", to_json(family)}};
  Json atoms = Json::array();
  if (const auto* m = std::get_if<SplineModel>(&model)) {
    j["offset"] = m->offset;
    for (const Atom1D& a : m->atoms) atoms.push_back({a.weight, a.location});
  } else if (const auto* m = std::get_if<LizSplineModel>(&model)) {
    for (const PointAtom& a : m->atoms) {
      Json row{a.weight};
      for (Eigen::Index i = 0; i < a.location.size(); ++i) row.push_back(a.location[i]);
      atoms.push_back(row);
    }
  } else {
    const auto& r = std::get<RidgeModel>(model);
    Json poly = Json::array();
    for (Eigen::Index i = 0; i < r.poly.size(); ++i) poly.push_back(r.poly[i]);
    j["poly"] = poly;
    for (const RidgeAtom& a : r.atoms) {
      Json row{a.weight, a.offset};
      for (Eigen::Index i = 0; i < a.direction.size(); ++i) row.push_back(a.direction[i]);
      atoms.push_back(row);
    }
  }
  j["atoms"] = atoms;
  return j;
}

Model model_from_json(const Json& j) {
  const Json& name = field(j, "family");
  if (!name.is_string()) throw Error(errc::kSchemaMismatch, "\"family\" must be a string");
  const Family family = family_from_json(name.get<std::string>(), field(j, "params"));
  const Json& atoms = atom_list(j);
  if (const auto* f = std::get_if<PeriodicFamily>(&family)) {
    SplineModel m;
    m.family = *f;
    m.offset = j.contains("offset") ? number(j, "offset") : 0.0;
    for (const Json& row : atoms) {
      const std::vector<double> v = atom_row(row, 2);
      m.atoms.push_back({v[0], v[1]});
    }
    return m;
  }
  if (const auto* f = std::get_if<FracLapFamily>(&family)) {
    LizSplineModel m;
    m.family = *f;
    for (const Json& row : atoms) {
      const std::vector<double> v = atom_row(row, static_cast<std::size_t>(f->dim) + 1);
      m.atoms.push_back({v[0], Eigen::Map<const Eigen::VectorXd>(v.data() + 1, f->dim)});
    }
    return m;
  }
  const auto& f = std::get<RidgeFamily>(family);
  RidgeModel m;
  m.family = f;
  for (const Json& row : atoms) {
    const std::vector<double> v = atom_row(row, static_cast<std::size_t>(f.dim) + 2);
    m.atoms.push_back({v[0], v[1], Eigen::Map<const Eigen::VectorXd>(v.data() + 2, f.dim)});
  }
  if (j.contains("poly")) {
    const Json& p = j.at("poly");
    if (!p.is_array()) throw Error(errc::kSchemaMismatch, "\"poly\" must be an array");
    m.poly.resize(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p[i].is_number()) throw Error(errc::kSchemaMismatch, "\"poly\" must be numeric");
      m.poly[static_cast<Eigen::Index>(i)] = p[i].get<double>();
    }
  }
  if (m.poly.size() > 0 && !f.polynomial)
    throw Error(errc::kSchemaMismatch, "polynomial coefficients given but the family disables them");
  if (f.polynomial) {
    const auto n = static_cast<Eigen::Index>(multi_indices_up_to(f.dim, f.m - 1).size());
    if (m.poly.size() == 0) m.poly = Eigen::VectorXd::Zero(n);
    if (m.poly.size() != n)
      throw Error(errc::kSchemaMismatch, "\"poly\" needs " + std::to_string(n) + " coefficients");
  }
  return m;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(errc::kInputNotFound, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::kInputNotFound, "cannot open " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(errc::kParseError, "invalid JSON in " + path);
  return j;
}

}  // namespace lizkit

#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cartanlab/error.hpp"
#include "cartanlab/presets.hpp"

namespace cartanlab::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(Err::ConfigError, what); }

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field \"") + key + "\"");
  return *it;
}

double num_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) bad(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

double num_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? num_field(j, key) : fallback;
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

int int_or(const Json& j, const char* key, int fallback) {
  return j.contains(key) ? int_field(j, key) : fallback;
}

std::string str_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

Vec parse_vector(const Json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    bad(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) bad(std::string(what) + " must hold numbers only");
    v[i] = j[i].get<double>();
  }
  return v;
}

Mat parse_matrix(const Json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    bad(std::string(what) + " must have " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    m.row(i) = parse_vector(j[i], cols, what).transpose();
  return m;
}

} // namespace

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

std::string user_preset_path(const std::string& name) {
  const char* dir = std::getenv("CARTANLAB_PRESET_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  std::filesystem::path candidate = std::filesystem::path(dir) / (name + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(candidate, ec)) return {};
  return candidate.string();
}

std::vector<std::string> user_preset_names() {
  std::vector<std::string> names;
  const char* dir = std::getenv("CARTANLAB_PRESET_DIR");
  if (dir == nullptr || *dir == '\0') return names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json")
      names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

namespace {

Polynomial::Exponents parse_monomial_key(const std::string& key, int nvars) {
  Polynomial::Exponents e(static_cast<std::size_t>(nvars), 0);
  std::istringstream tokens(key);
  std::string tok;
  while (tokens >> tok) {
    if (tok == "1") continue;
    if (tok.size() < 2 || tok[0] != 'x')
      bad("bad monomial factor \"" + tok + "\" (expect x<i> or x<i>^<k>)");
    std::size_t caret = tok.find('^');
    int var = 0, power = 1;
    try {
      var = std::stoi(tok.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
      if (caret != std::string::npos) power = std::stoi(tok.substr(caret + 1));
    } catch (const std::exception&) {
      bad("bad monomial factor \"" + tok + "\"");
    }
    if (var < 0 || var >= nvars)
      bad("monomial \"" + key + "\" uses variable x" + std::to_string(var) +
          " outside a " + std::to_string(nvars) + " variable chart");
    if (power < 0) bad("negative exponent in \"" + key + "\"");
    e[static_cast<std::size_t>(var)] += power;
  }
  return e;
}

} // namespace

Polynomial parse_polynomial(const Json& spec, int nvars) {
  if (spec.is_number()) {
    Polynomial p(nvars);
    p.add_term(Polynomial::Exponents(static_cast<std::size_t>(nvars), 0), spec.get<double>());
    return p;
  }
  if (!spec.is_object()) bad("a polynomial is an object of monomial: coefficient pairs");
  Polynomial p(nvars);
  for (const auto& [key, value] : spec.items()) {
    if (!value.is_number()) bad("coefficient of \"" + key + "\" must be a number");
    p.add_term(parse_monomial_key(key, nvars), value.get<double>());
  }
  return p;
}

Json polynomial_to_json(const Polynomial& p) {
  Json out = Json::object();
  for (const auto& [exponents, coeff] : p.terms()) {
    std::string key;
    for (std::size_t v = 0; v < exponents.size(); ++v) {
      if (exponents[v] == 0) continue;
      if (!key.empty()) key += ' ';
      key += "x" + std::to_string(v);
      if (exponents[v] > 1) key += "^" + std::to_string(exponents[v]);
    }
    if (key.empty()) key = "1";
    out[key] = coeff;
  }
  return out;
}

LieAlgebra parse_algebra(const Json& spec) {
  if (spec.is_string()) return algebra_preset(spec.get<std::string>());
  if (!spec.is_object()) bad("an algebra is a preset name or a structure table");

  const Json& basis = field(spec, "basis");
  if (!basis.is_array() || basis.empty()) bad("\"basis\" must be a nonempty array of names");
  std::vector<std::string> names;
  for (const auto& entry : basis) {
    if (!entry.is_string()) bad("basis entries must be strings");
    names.push_back(entry.get<std::string>());
  }
  const int dim = static_cast<int>(names.size());
  auto index_of = [&](const std::string& n) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) bad("bracket coefficient names unknown generator \"" + n + "\"");
    return static_cast<int>(it - names.begin());
  };

  std::vector<std::vector<Vec>> table(
      static_cast<std::size_t>(dim),
      std::vector<Vec>(static_cast<std::size_t>(dim), Vec::Zero(dim)));
  if (spec.contains("brackets")) {
    const Json& brackets = field(spec, "brackets");
    if (!brackets.is_array()) bad("\"brackets\" must be an array");
    for (const auto& entry : brackets) {
      const int i = int_field(entry, "i");
      const int j = int_field(entry, "j");
      if (i < 0 || j < 0 || i >= dim || j >= dim) bad("bracket indices out of range");
      if (i >= j) bad("list each bracket once with i < j");
      Vec v = Vec::Zero(dim);
      for (const auto& [name, coeff] : field(entry, "coeffs").items()) {
        if (!coeff.is_number()) bad("bracket coefficients must be numbers");
        v[index_of(name)] += coeff.get<double>();
      }
      table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      table[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = -v;
    }
  }
  std::string name = spec.contains("name") ? str_field(spec, "name") : "custom";
  return LieAlgebra(name, table);
}

Json algebra_to_json(const LieAlgebra& L) {
  Json out;
  out["name"] = L.name();
  Json basis = Json::array();
  for (int i = 0; i < L.dim(); ++i) basis.push_back("e" + std::to_string(i));
  out["basis"] = std::move(basis);
  Json brackets = Json::array();
  for (int i = 0; i < L.dim(); ++i) {
    for (int j = i + 1; j < L.dim(); ++j) {
      const Vec v = L.bracket(Vec::Unit(L.dim(), i), Vec::Unit(L.dim(), j));
      if (v.cwiseAbs().maxCoeff() == 0.0) continue;
      Json entry;
      entry["i"] = i;
      entry["j"] = j;
      Json coeffs = Json::object();
      for (int k = 0; k < L.dim(); ++k)
        if (v[k] != 0.0) coeffs["e" + std::to_string(k)] = v[k];
      entry["coeffs"] = std::move(coeffs);
      brackets.push_back(std::move(entry));
    }
  }
  out["brackets"] = std::move(brackets);
  return out;
}

LinearLieAlgebra parse_linear_group(const Json& spec) {
  if (spec.is_string()) return LinearLieAlgebra::from_rep(rep_preset(spec.get<std::string>()));
  if (!spec.is_object()) bad("a linear group is a preset name or {v_dim, matrices}");
  const int n = int_field(spec, "v_dim");
  if (n <= 0) bad("\"v_dim\" must be positive");
  std::vector<Mat> mats;
  if (spec.contains("matrices")) {
    const Json& list = field(spec, "matrices");
    if (!list.is_array()) bad("\"matrices\" must be an array of square matrices");
    for (const auto& entry : list) mats.push_back(parse_matrix(entry, n, n, "group matrix"));
  }
  std::string name = spec.contains("name") ? str_field(spec, "name") : "custom";
  return LinearLieAlgebra(n, std::move(mats), std::move(name));
}

ParsedModel parse_model(const Json& spec) {
  if (!spec.is_object()) bad("a model is an object with \"kind\" and a pair");
  const std::string kind = str_field(spec, "kind");
  if (kind != "bare" && kind != "principal")
    bad("model kind must be \"bare\" or \"principal\"");

  if (spec.contains("pair")) {
    const std::string pair_name = str_field(spec, "pair");
    if (kind == "bare")
      return {bare_model(pair_name, num_or(spec, "radius", 1.0)), pair_name};
    return {principal_model(pair_name, num_or(spec, "base_radius", 1.0),
                            num_or(spec, "fiber_radius", 0.4)),
            pair_name};
  }

  if (kind == "principal")
    bad("principal models need a named \"pair\" carrying a matrix representation");

  LieAlgebra h = parse_algebra(field(spec, "algebra"));
  std::vector<Vec> basis_in_h;
  if (spec.contains("subalgebra")) {
    const Json& sub = field(spec, "subalgebra");
    if (!sub.is_array()) bad("\"subalgebra\" must be an array of indices or vectors");
    for (const auto& entry : sub) {
      if (entry.is_number_integer()) {
        const int i = entry.get<int>();
        if (i < 0 || i >= h.dim()) bad("subalgebra index out of range");
        basis_in_h.push_back(Vec::Unit(h.dim(), i));
      } else {
        basis_in_h.push_back(parse_vector(entry, h.dim(), "subalgebra vector"));
      }
    }
  } else {
    for (int i = 0; i < h.dim(); ++i) basis_in_h.push_back(Vec::Unit(h.dim(), i));
  }
  SubalgebraEmbedding pair = make_subalgebra(h, h.name() + "_iso", basis_in_h);
  const double radius = num_or(spec, "radius", 1.0);
  return {LocalModel::bare(std::move(pair), Box::cube(h.dim(), radius)), ""};
}

FormField parse_form(const Json& spec, const Box& domain, int target_dim) {
  if (!spec.is_object()) bad("a form literal is an object with \"degree\" and \"terms\"");
  const int degree = int_field(spec, "degree");
  if (degree < 0) bad("form degree must be nonnegative");
  const int n = domain.dim();

  FormField::Coefficients coef;
  const Json& terms = field(spec, "terms");
  if (!terms.is_array()) bad("\"terms\" must be an array");
  for (const auto& term : terms) {
    const Json& index = field(term, "index");
    if (!index.is_array() || static_cast<int>(index.size()) != degree)
      bad("term index must list exactly " + std::to_string(degree) + " chart directions");
    std::vector<int> idx;
    for (const auto& entry : index) {
      if (!entry.is_number_integer()) bad("term indices must be integers");
      idx.push_back(entry.get<int>());
      if (idx.back() < 0 || idx.back() >= n) bad("term index out of chart range");
      if (idx.size() > 1 && idx[idx.size() - 2] >= idx.back())
        bad("term indices must be strictly increasing");
    }
    const int target = int_field(term, "target");
    if (target < 0 || target >= target_dim) bad("term target out of range");
    auto [it, fresh] = coef.try_emplace(
        idx, std::vector<Polynomial>(static_cast<std::size_t>(target_dim), Polynomial(n)));
    it->second[static_cast<std::size_t>(target)] += parse_polynomial(field(term, "poly"), n);
  }
  return FormField::poly(domain, degree, target_dim, std::move(coef));
}

GeneralizedCartanConnection parse_connection(const Json& spec) {
  if (!spec.is_object()) bad("a connection is an object with \"model\" and \"kappa\"");
  ParsedModel pm = parse_model(field(spec, "model"));
  const Json& kappa = field(spec, "kappa");

  if (kappa.is_string()) {
    const std::string which = kappa.get<std::string>();
    if (which != "maurer-cartan") bad("unknown kappa shorthand \"" + which + "\"");
    if (pm.model.kind() != ModelKind::BareManifold || pm.pair_name.empty())
      bad("the maurer-cartan shorthand needs a bare model over a named pair");
    CartanConnection mc = maurer_cartan(pm.pair_name, pm.model.chart().hi[0]);
    return GeneralizedCartanConnection(mc.model(), mc.kappa());
  }

  if (kappa.is_object() && kappa.contains("A")) {
    if (pm.model.kind() != ModelKind::Principal)
      bad("a generator block \"A\" needs a principal model");
    const int rows = pm.model.h().dim();
    const int cols = pm.model.base_dim();
    const Json& block = field(kappa, "A");
    if (!block.is_array() || static_cast<int>(block.size()) != rows)
      bad("\"A\" must have one row per generator of the full algebra");
    std::vector<std::vector<Polynomial>> entries;
    for (const auto& row : block) {
      if (!row.is_array() || static_cast<int>(row.size()) != cols)
        bad("\"A\" rows must have one polynomial per base direction");
      std::vector<Polynomial> parsed;
      for (const auto& cell : row) parsed.push_back(parse_polynomial(cell, cols));
      entries.push_back(std::move(parsed));
    }
    auto A = [rows, cols, entries](const Vec& x) {
      Mat m(rows, cols);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          m(i, j) = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(x);
      return m;
    };
    return make_principal_cartan(pm.model, A);
  }

  FormField form = parse_form(kappa, pm.model.chart(), pm.model.h().dim());
  if (form.degree() != 1) bad("kappa must be a degree one form");
  return GeneralizedCartanConnection(pm.model, std::move(form));
}

Path parse_path(const Json& spec, int dim) {
  if (!spec.is_object()) bad("a path is an object with \"kind\" and points");
  const std::string kind = str_field(spec, "kind");
  auto points_of = [&](const char* key) {
    const Json& list = field(spec, key);
    if (!list.is_array() || list.empty()) bad(std::string("\"") + key + "\" must be a nonempty array");
    std::vector<Vec> points;
    for (const auto& entry : list) points.push_back(parse_vector(entry, dim, key));
    return points;
  };
  if (kind == "smooth_polyline") return Path::smooth_polyline(points_of("points"));
  if (kind == "polynomial") return Path::polynomial(points_of("coefficients"));
  if (kind == "segment") {
    auto points = points_of("points");
    if (points.size() != 2) bad("a segment needs exactly two points");
    return Path::segment(points[0], points[1]);
  }
  bad("path kind must be smooth_polyline, polynomial or segment");
}

MultilinearFunction parse_invariant(const Json& spec, const LieAlgebra& h,
                                    const MatrixRep& ambient) {
  if (spec.is_string()) {
    const std::string which = spec.get<std::string>();
    if (which == "killing") return killing_form(h);
    bad("unknown invariant shorthand \"" + which + "\" (use killing or a table)");
  }
  if (!spec.is_object()) bad("an invariant is \"killing\", a trace power, or a table");
  if (spec.contains("kind")) {
    const std::string kind = str_field(spec, "kind");
    if (kind != "trace_power") bad("unknown invariant kind \"" + kind + "\"");
    return trace_power_form(ambient, int_or(spec, "power", 2));
  }
  const int arity = int_field(spec, "arity");
  Symmetry sym = Symmetry::Symmetric;
  if (spec.contains("symmetry")) {
    const std::string s = str_field(spec, "symmetry");
    if (s == "none") sym = Symmetry::None;
    else if (s == "symmetric") sym = Symmetry::Symmetric;
    else if (s == "alternating") sym = Symmetry::Alternating;
    else bad("symmetry must be none, symmetric or alternating");
  }
  MultilinearFunction f(h.dim(), arity, sym);
  for (const auto& entry : field(spec, "coefficients")) {
    const Json& index = field(entry, "index");
    if (!index.is_array() || static_cast<int>(index.size()) != arity)
      bad("invariant coefficient index must have length " + std::to_string(arity));
    std::vector<int> idx;
    for (const auto& i : index) idx.push_back(i.get<int>());
    f.set_coefficient(idx, num_field(entry, "value"));
  }
  return f;
}

LocalGStructure parse_gstructure(const Json& spec) {
  if (!spec.is_object()) bad("a structure is an object with \"group\" and \"frame\"");
  LinearLieAlgebra g = parse_linear_group(field(spec, "group"));
  const int n = g.v_dim();
  const Box base = Box::cube(n, num_or(spec, "base_radius", 1.0));

  std::vector<std::vector<Polynomial>> frame(
      static_cast<std::size_t>(n),
      std::vector<Polynomial>(static_cast<std::size_t>(n), Polynomial(n)));
  for (int i = 0; i < n; ++i)
    frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Polynomial::constant(n, 1.0);

  if (spec.contains("frame") && !(spec["frame"].is_string() && spec["frame"] == "identity")) {
    const Json& rows = spec["frame"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
      bad("\"frame\" must be an n x n table of polynomials");
    for (int i = 0; i < n; ++i) {
      if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
        bad("\"frame\" must be an n x n table of polynomials");
      for (int j = 0; j < n; ++j)
        frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            parse_polynomial(rows[i][j], n);
    }
  }
  return LocalGStructure(std::move(g), base, std::move(frame));
}

ProlongRequest parse_prolong_request(const Json& spec) {
  if (!spec.is_object()) bad("a prolongation request is an object with \"group\"");
  ProlongRequest req{parse_linear_group(field(spec, "group")),
                     int_or(spec, "k_max", 2), false};
  if (spec.contains("strict_invariance")) {
    const Json& flag = spec["strict_invariance"];
    if (!flag.is_boolean()) bad("\"strict_invariance\" must be a boolean");
    req.strict_invariance = flag.get<bool>();
  }
  return req;
}

} // namespace cartanlab::cli

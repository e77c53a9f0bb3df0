#pragma once

#include <string>

#include <json.hpp>

#include "cartanlab/cartan.hpp"
#include "cartanlab/developing.hpp"
#include "cartanlab/form_field.hpp"
#include "cartanlab/lie_algebra.hpp"
#include "cartanlab/local_model.hpp"
#include "cartanlab/multilinear.hpp"
#include "cartanlab/polynomial.hpp"
#include "cartanlab/prolongation.hpp"

namespace cartanlab::cli {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file; any IO or syntax problem becomes a
/// ConfigError naming the file.
Json load_config_file(const std::string& path);

/// Resolves a --preset argument that is not a built-in: looks for
/// <name>.json under CARTANLAB_PRESET_DIR.  Returns an empty string when the
/// variable is unset or the file is absent.
std::string user_preset_path(const std::string& name);
std::vector<std::string> user_preset_names();

/// Monomials are keyed by strings like "x0^2 x1"; "1" or "" is the constant
/// term.  A polynomial literal maps monomial keys to coefficients.
Polynomial parse_polynomial(const Json& spec, int nvars);
Json polynomial_to_json(const Polynomial& p);

/// Either a preset name or an inline table
///   {"name": .., "basis": ["X", ..], "brackets": [{"i":0,"j":1,"coeffs":{"X":1.0}}]}
/// with antisymmetric completion; only i < j entries are listed.
LieAlgebra parse_algebra(const Json& spec);
Json algebra_to_json(const LieAlgebra& L);

/// Either a representation preset name or {"v_dim": n, "matrices": [[[..]..]..]}.
LinearLieAlgebra parse_linear_group(const Json& spec);

struct ParsedModel {
  LocalModel model;
  std::string pair_name; // empty when the model was assembled inline
};

/// {"kind": "bare"|"principal", "pair": "h/g", "base_radius": .., "fiber_radius": ..}
/// or, for bare models, an inline algebra with an optional "subalgebra" index
/// list picking the isotropy generators.
ParsedModel parse_model(const Json& spec);

/// Degree-p coefficient form on a chart:
///   {"degree": p, "terms": [{"index": [i..], "target": t, "poly": {..}}]}
/// with strictly increasing index tuples.
FormField parse_form(const Json& spec, const Box& domain, int target_dim);

/// {"model": .., "kappa": ..} where kappa is "maurer-cartan", a generator
/// block {"A": [[poly..]..]}, or a raw degree-one form literal.
GeneralizedCartanConnection parse_connection(const Json& spec);

/// {"kind": "smooth_polyline"|"polynomial"|"segment", "points"|"coefficients": [[..]..]}
Path parse_path(const Json& spec, int dim);

/// "killing", {"kind": "trace_power", "power": p}, or an explicit
/// coefficient table {"arity": a, "coefficients": [{"index": [..], "value": v}]}.
MultilinearFunction parse_invariant(const Json& spec, const LieAlgebra& h,
                                    const MatrixRep& ambient);

/// {"group": .., "base_radius": r, "frame": "identity" | [[poly..]..]}
LocalGStructure parse_gstructure(const Json& spec);

struct ProlongRequest {
  LinearLieAlgebra group;
  int k_max = 2;
  bool strict_invariance = false;
};

ProlongRequest parse_prolong_request(const Json& spec);

} // namespace cartanlab::cli

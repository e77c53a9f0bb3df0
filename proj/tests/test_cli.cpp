#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <cartanlab/cartan.hpp>
#include <cartanlab/presets.hpp>
#include <cartanlab/sampling.hpp>

#include "config.hpp"

using namespace cartanlab;
using cli::Json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "cartanlab-test-cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ostringstream ss;
  ss << std::ifstream(p).rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(CARTANLAB_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  const int code = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  return {code, slurp(out), slurp(err)};
}

// The curvature of this parallelism on the abelian plane is 0.3 dx0^dx1, so a
// config that also claims expect_flat produces a clean FAIL verdict.
const char* kCurvedTorus = R"({
  "model": {"kind": "bare",
            "algebra": {"name": "t2", "basis": ["X", "Y"], "brackets": []},
            "radius": 1.0},
  "kappa": {"degree": 1,
            "terms": [{"index": [0], "target": 0, "poly": {"1": 1.0}},
                      {"index": [1], "target": 1, "poly": {"1": 1.0, "x0": 0.5}},
                      {"index": [0], "target": 1, "poly": {"x1": 0.2}}]},
  "expect_flat": true
})";

} // namespace

TEST_CASE("polynomial literals follow the monomial key grammar") {
  const Json spec = Json::parse(R"({"1": 2.0, "x0^2 x1": -1.5, "x2": 3.0})");
  const Polynomial p = cli::parse_polynomial(spec, 3);
  Vec x(3);
  x << 0.5, -2.0, 0.25;
  CHECK(p.eval(x) == doctest::Approx(2.0 - 1.5 * 0.25 * (-2.0) + 3.0 * 0.25).epsilon(1e-14));

  // Repeated factors multiply, so "x0 x0" and "x0^2" agree.
  const Polynomial a = cli::parse_polynomial(Json::parse(R"({"x0 x0": 1.0})"), 2);
  const Polynomial b = cli::parse_polynomial(Json::parse(R"({"x0^2": 1.0})"), 2);
  RandomStream rng(kDefaultSeed);
  for (int i = 0; i < 8; ++i) {
    const Vec y = rng.vector(2, 1.0);
    CHECK(a.eval(y) == doctest::Approx(b.eval(y)).epsilon(1e-14));
  }

  // A bare number is the constant polynomial.
  CHECK(cli::parse_polynomial(Json(0.75), 2).eval(Vec::Zero(2)) == doctest::Approx(0.75));

  CHECK_THROWS_AS(cli::parse_polynomial(Json::parse(R"({"y0": 1.0})"), 2), Error);
  CHECK_THROWS_AS(cli::parse_polynomial(Json::parse(R"({"x0^": 1.0})"), 2), Error);
  CHECK_THROWS_AS(cli::parse_polynomial(Json::parse(R"({"x5": 1.0})"), 2), Error);
}

TEST_CASE("polynomials survive a JSON round-trip") {
  RandomStream rng(kDefaultSeed);
  Polynomial p = Polynomial::constant(3, rng.uniform(-1.0, 1.0));
  p += Polynomial::variable(3, 0) * Polynomial::variable(3, 2) * rng.uniform(-1.0, 1.0);
  p += Polynomial::variable(3, 1) * rng.uniform(-1.0, 1.0);
  const Polynomial q = cli::parse_polynomial(cli::polynomial_to_json(p), 3);
  for (int i = 0; i < 8; ++i) {
    const Vec x = rng.vector(3, 1.0);
    CHECK(p.eval(x) == doctest::Approx(q.eval(x)).epsilon(1e-15));
  }
}

TEST_CASE("every algebra preset round-trips through its JSON table") {
  for (const std::string& name : algebra_preset_names()) {
    CAPTURE(name);
    const LieAlgebra L = algebra_preset(name);
    const LieAlgebra back = cli::parse_algebra(cli::algebra_to_json(L));
    REQUIRE(back.dim() == L.dim());
    const int n = L.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vec want = L.bracket(Vec::Unit(n, i), Vec::Unit(n, j));
        const Vec got = back.bracket(Vec::Unit(n, i), Vec::Unit(n, j));
        CHECK((want - got).norm() <= 1e-15);
      }
  }
}

TEST_CASE("a preset name is also an algebra literal") {
  const LieAlgebra L = cli::parse_algebra(Json("so3"));
  CHECK(L.dim() == 3);
  CHECK((L.bracket(Vec::Unit(3, 0), Vec::Unit(3, 1)) - Vec::Unit(3, 2)).norm() <= 1e-14);
}

TEST_CASE("form literals demand strictly increasing index tuples") {
  const Box domain = Box::cube(2, 1.0);
  const Json spec = Json::parse(
      R"({"degree": 2, "terms": [{"index": [0, 1], "target": 0, "poly": {"1": 1.0}},
                                 {"index": [0, 1], "target": 0, "poly": {"1": 0.5}}]})");
  const FormField f = cli::parse_form(spec, domain, 1);
  const Vec x = Vec::Zero(2);
  const std::vector<Vec> fwd = {Vec::Unit(2, 0), Vec::Unit(2, 1)};
  const std::vector<Vec> rev = {Vec::Unit(2, 1), Vec::Unit(2, 0)};
  // Terms on the same tuple accumulate, and the form is alternating.
  CHECK(f.eval(x, fwd)[0] == doctest::Approx(1.5));
  CHECK(f.eval(x, rev)[0] == doctest::Approx(-1.5));

  CHECK_THROWS_AS(
      cli::parse_form(Json::parse(R"({"degree": 2, "terms": [{"index": [1, 0],
          "target": 0, "poly": {"1": 1.0}}]})"),
                      domain, 1),
      Error);
  CHECK_THROWS_AS(
      cli::parse_form(Json::parse(R"({"degree": 2, "terms": [{"index": [0, 0],
          "target": 0, "poly": {"1": 1.0}}]})"),
                      domain, 1),
      Error);
  CHECK_THROWS_AS(
      cli::parse_form(Json::parse(R"({"degree": 1, "terms": [{"index": [0],
          "target": 3, "poly": {"1": 1.0}}]})"),
                      domain, 2),
      Error);
}

TEST_CASE("paths parse into the declared kind") {
  const Json loop = Json::parse(
      R"({"kind": "polynomial", "coefficients": [[0.1, 0.0], [0.2, 0.1], [-0.2, -0.1]]})");
  const Path closed = cli::parse_path(loop, 2);
  CHECK(closed.closed());

  const Json seg = Json::parse(R"({"kind": "segment", "points": [[0.0, 0.0], [0.3, 0.1]]})");
  const Path segment = cli::parse_path(seg, 2);
  CHECK_FALSE(segment.closed());
  CHECK((segment.point(1.0) - segment.point(0.0) - (Vec(2) << 0.3, 0.1).finished()).norm() <=
        1e-12);

  CHECK_THROWS_AS(cli::parse_path(Json::parse(R"({"kind": "spiral", "points": []})"), 2),
                  Error);
}

TEST_CASE("the killing invariant matches the library's bilinear form") {
  const LieAlgebra so3 = algebra_preset("so3");
  const MatrixRep rep = rep_preset("so3");
  const MultilinearFunction f = cli::parse_invariant(Json("killing"), so3, rep);
  const MultilinearFunction k = killing_form(so3);
  RandomStream rng(kDefaultSeed);
  for (int i = 0; i < 10; ++i) {
    const std::vector<Vec> args = {rng.vector(3, 1.0), rng.vector(3, 1.0)};
    CHECK(f.eval(args) == doctest::Approx(k.eval(args)).epsilon(1e-12));
  }

  const MultilinearFunction tr =
      cli::parse_invariant(Json::parse(R"({"kind": "trace_power", "power": 2})"), so3, rep);
  const MultilinearFunction want = trace_power_form(rep, 2);
  for (int i = 0; i < 10; ++i) {
    const std::vector<Vec> args = {rng.vector(3, 1.0), rng.vector(3, 1.0)};
    CHECK(tr.eval(args) == doctest::Approx(want.eval(args)).epsilon(1e-12));
  }
}

TEST_CASE("connections parse from each kappa route") {
  RandomStream rng(kDefaultSeed);

  SUBCASE("maurer-cartan shorthand reproduces the preset connection") {
    const Json spec = Json::parse(
        R"({"model": {"kind": "bare", "pair": "so3/so2", "radius": 0.8},
            "kappa": "maurer-cartan"})");
    const GeneralizedCartanConnection conn = cli::parse_connection(spec);
    const CartanConnection want = maurer_cartan("so3/so2", 0.8);
    const auto pts = sample_box(conn.model().chart(), 12, kDefaultSeed);
    for (const Vec& x : pts)
      CHECK((conn.kappa().coefficient_matrix(x) - want.kappa().coefficient_matrix(x))
                .norm() <= 1e-13);
  }

  SUBCASE("a generator block matches the principal ansatz") {
    const Json spec = Json::parse(
        R"({"model": {"kind": "principal", "pair": "sl2/so2",
                      "base_radius": 1.0, "fiber_radius": 0.3},
            "kappa": {"A": [[1.0, 0.0], [0.0, 1.0], [{"x0": 0.5}, 0.0]]}})");
    const GeneralizedCartanConnection conn = cli::parse_connection(spec);
    const LocalModel model = principal_model("sl2/so2", 1.0, 0.3);
    const GeneralizedCartanConnection want = make_principal_cartan(model, [](const Vec& x) {
      Mat A = Mat::Identity(3, 2);
      A(2, 0) = 0.5 * x[0];
      return A;
    });
    const auto pts = sample_box(conn.model().chart(), 12, kDefaultSeed);
    for (const Vec& x : pts)
      CHECK((conn.kappa().coefficient_matrix(x) - want.kappa().coefficient_matrix(x))
                .norm() <= 1e-12);
  }

  SUBCASE("a raw form literal lands on an inline model") {
    const Json spec = Json::parse(kCurvedTorus);
    const GeneralizedCartanConnection conn = cli::parse_connection(spec);
    CHECK(conn.model().kind() == ModelKind::BareManifold);
    CHECK(conn.model().h().dim() == 2);
    CHECK(conn.model().g().dim() == 2);
    Vec x(2);
    x << 0.4, -0.5;
    Mat want(2, 2);
    want << 1.0, 0.0, 0.2 * x[1], 1.0 + 0.5 * x[0];
    CHECK((conn.kappa().coefficient_matrix(x) - want).norm() <= 1e-13);
  }
}

TEST_CASE("prolongation requests parse groups by preset or literal") {
  const cli::ProlongRequest by_name =
      cli::parse_prolong_request(Json::parse(R"({"group": "so2"})"));
  CHECK(by_name.group.v_dim() == 2);
  CHECK(by_name.group.dim() == 1);
  CHECK(by_name.k_max == 2);
  CHECK_FALSE(by_name.strict_invariance);

  const cli::ProlongRequest literal = cli::parse_prolong_request(Json::parse(
      R"({"group": {"v_dim": 2, "matrices": [[[0.0, -1.0], [1.0, 0.0]]]},
          "k_max": 3, "strict_invariance": true})"));
  CHECK(literal.group.dim() == 1);
  CHECK(literal.k_max == 3);
  CHECK(literal.strict_invariance);
}

TEST_CASE("the binary emits byte-identical JSON across runs") {
  const std::string invocations[] = {
      "check --preset so3-mc --format json",
      "develop --preset e2-mc --steps 64 --format json",
      "prolong --group co3 --k-max 3 --format json",
      "gstructure --preset so2-stretched --format json",
      "jets --group so2 --order 1 --format json",
      "list-presets --format json",
  };
  for (const std::string& args : invocations) {
    CAPTURE(args);
    const RunResult first = run_cli(args);
    const RunResult second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(!first.out.empty());
  }
}

TEST_CASE("exit codes follow the contract") {
  SUBCASE("clean run exits 0") {
    const RunResult r = run_cli("check --preset so3-mc");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verdict: PASS") != std::string::npos);
  }

  SUBCASE("a failing check exits 1 and still prints the report") {
    const fs::path cfg = write_file("curved-but-flagged-flat.json", kCurvedTorus);
    const RunResult r = run_cli("check --config " + cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("FAIL") != std::string::npos);
    CHECK(r.out.find("flatness") != std::string::npos);
  }

  SUBCASE("malformed JSON exits 2 with no partial report") {
    const fs::path cfg = write_file("broken.json", "{ this is not json");
    const RunResult r = run_cli("check --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("cartanlab:") != std::string::npos);
  }

  SUBCASE("an unknown preset exits 2 and points at list-presets") {
    const RunResult r = run_cli("check --preset no-such-thing");
    CHECK(r.exit_code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("list-presets") != std::string::npos);
  }

  SUBCASE("a truncation that does not close exits 2") {
    const RunResult r = run_cli("jets --group co3 --order 1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("cartanlab:") != std::string::npos);
  }

  SUBCASE("help exits 0") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("check --help").exit_code == 0);
  }
}

TEST_CASE("user preset directories resolve by name") {
  const fs::path dir = scratch_dir() / "presets";
  fs::create_directories(dir);
  std::ofstream(dir / "curved-torus.json") << kCurvedTorus;
  setenv("CARTANLAB_PRESET_DIR", dir.c_str(), 1);

  const RunResult run = run_cli("check --preset curved-torus");
  CHECK(run.exit_code == 1);
  CHECK(run.out.find("flatness") != std::string::npos);

  const RunResult listing = run_cli("list-presets");
  CHECK(listing.exit_code == 0);
  CHECK(listing.out.find("curved-torus") != std::string::npos);

  unsetenv("CARTANLAB_PRESET_DIR");
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cartanlab/cartan.hpp"
#include "cartanlab/lie_algebra.hpp"
#include "cartanlab/polynomial.hpp"
#include "cartanlab/sampling.hpp"
#include "cartanlab/types.hpp"

namespace cartanlab {

/// Lie algebra of matrices acting on V = R^n, the infinitesimal structure
/// group of a G-structure.  Unlike MatrixRep there is no abstract algebra
/// behind the matrices, and the zero algebra (empty basis) is a valid
/// instance.  Construction checks linear independence and closure under
/// commutators (residual <= 1e-10 relative to the largest entry).
class LinearLieAlgebra {
public:
  LinearLieAlgebra(int v_dim, std::vector<Mat> basis, std::string name = "");

  static LinearLieAlgebra from_rep(const MatrixRep& rep);

  int v_dim() const { return m_v_dim; }
  int dim() const { return static_cast<int>(m_basis.size()); }
  const std::vector<Mat>& basis() const { return m_basis; }
  const Mat& basis(int i) const { return m_basis[i]; }
  const std::string& name() const { return m_name; }
  double closure_residual() const { return m_closure; }

  /// The matrix sum_mu coords[mu] basis[mu].
  Mat element(const Vec& coords) const;
  /// Least squares coordinates of m in the basis span; residual is the
  /// Frobenius distance to the span.
  Vec coordinates(const Mat& m, double* residual = nullptr) const;

  /// Abstract algebra plus defining representation; dim >= 1 only.
  MatrixRep to_rep() const;

private:
  int m_v_dim;
  std::vector<Mat> m_basis;
  std::string m_name;
  Mat m_span; // v_dim^2 x dim, column mu = vec(basis mu)
  double m_closure = 0.0;
};

/// V-valued multilinear function of several V arguments, stored by its
/// values on all basis tuples.  Symmetry or antisymmetry of slots is the
/// caller's convention, not enforced here.
class VectorTensor {
public:
  VectorTensor(int v_dim, int slots);

  int v_dim() const { return m_v_dim; }
  int slots() const { return m_slots; }

  const Vec& value(const std::vector<int>& idx) const;
  void set_value(const std::vector<int>& idx, const Vec& v);
  /// Multilinear extension to arbitrary arguments.
  Vec eval(const std::vector<Vec>& args) const;
  double norm() const;

private:
  int flat_index(const std::vector<int>& idx) const;

  int m_v_dim, m_slots;
  std::vector<Vec> m_values;
};

/// Alternation of a map V -> (V-valued q-forms): the first slot of T is the
/// map argument, the rest are form slots.  (dT)(v_0..v_q) =
/// sum_i (-1)^i T(v_i; v_0 .. skip i .. v_q), fully alternating output with
/// the same slot count.  Kills tensors symmetric in the first two slots.
VectorTensor spencer_delta(const VectorTensor& T);

/// Coordinates of a two-slot antisymmetric tensor on pairs a < b
/// (lexicographic), component-minor: flat[pair * n + i].
Vec two_form_flat(const VectorTensor& T);
VectorTensor two_form_from_flat(int v_dim, const Vec& flat);

/// Nondecreasing index tuples from {0..n-1} of the given size, lexicographic.
/// Symmetric tensors in S^size V* (x) V are flattened on this enumeration,
/// component-minor: flat[tuple * n + i].
std::vector<std::vector<int>> multiset_tuples(int n, int size);

/// Component i of a flattened symmetric tensor at an argument tuple (order
/// irrelevant); idx size must match the tensor's slot count.
Vec symmetric_value(int v_dim, int slots, const Vec& flat, std::vector<int> idx);

enum class ProlongationType { Type1, Type2, HigherOrInfinite };
const char* to_string(ProlongationType t);

struct ProlongationLevel {
  int k = 0;
  std::vector<Vec> basis; // flattened S^{k+1} V* (x) V coordinates
  /// Smallest kept over largest discarded singular value of the constraint
  /// matrix; infinity when either side is empty.
  double gap_ratio = 0.0;

  int dim() const { return static_cast<int>(basis.size()); }
};

struct ProlongationTable {
  int v_dim = 0;
  std::vector<ProlongationLevel> levels; // levels[i] holds k = i + 1
  ProlongationType type = ProlongationType::HigherOrInfinite;

  int dim(int k) const;
};

/// One-step prolongation of a subspace of S^slots V* (x) V given by flattened
/// basis vectors: all T in S^{slots+1} V* (x) V whose single-vector
/// contractions stay inside the span.  Returns an orthonormal kernel basis.
std::vector<Vec> prolong_subspace(int v_dim, int slots, const std::vector<Vec>& basis,
                                  double* gap_ratio = nullptr);

/// Prolongations g^(1) .. g^(k_max) of g = g^(0), with the type verdict:
/// Type1 when g^(1) = 0, Type2 when g^(1) != 0 and g^(2) = 0, otherwise
/// HigherOrInfinite (which a k_max of 1 cannot tell apart from Type2).
ProlongationTable prolong(const LinearLieAlgebra& g, int k_max = 2);

/// Alternation image and its orthogonal complement in V (x) Lambda^2 V*,
/// both in two_form_flat coordinates.
struct TorsionSplit {
  std::vector<Vec> image;      // basis of the alternation image of g (x) V*
  std::vector<Vec> complement; // orthogonal complement
  /// Worst sampled leakage of the transformed complement back onto the
  /// image, relative; zero for an exactly invariant complement.
  double invariance_leakage = 0.0;
};

/// Splits V (x) Lambda^2 V* along the alternation image of g (x) V*.  The
/// complement is orthogonal in coordinates; G-invariance is sampled, and
/// strict mode turns leakage beyond 1e-6 into NotGInvariant.
TorsionSplit torsion_complement(const LinearLieAlgebra& g, bool strict = false,
                                int samples = 8, std::uint64_t seed = kDefaultSeed);

/// First order reduction of the frame bundle over a chart: a frame field
/// S: U -> GL(V) with polynomial entries together with the structure algebra.
class LocalGStructure {
public:
  LocalGStructure(LinearLieAlgebra g, Box base, std::vector<std::vector<Polynomial>> frame);

  /// Identity frame on a centered cube.
  static LocalGStructure flat(LinearLieAlgebra g, double radius = 1.0);

  const LinearLieAlgebra& group() const { return m_g; }
  const Box& base() const { return m_base; }
  int dim() const { return m_g.v_dim(); }
  const std::vector<std::vector<Polynomial>>& frame() const { return m_frame; }

  Mat frame_at(const Vec& x) const;
  /// Directional derivative DS[dir] at x, exact from the entries.
  Mat frame_derivative(const Vec& x, const Vec& dir) const;
  /// The structure with frame S(x) a for a constant group element a.
  LocalGStructure translated(const Mat& a) const;
  double min_frame_singular(int samples = 32, std::uint64_t seed = kDefaultSeed) const;
  bool is_flat() const;

private:
  LinearLieAlgebra m_g;
  Box m_base;
  std::vector<std::vector<Polynomial>> m_frame;
  std::vector<std::vector<std::vector<Polynomial>>> m_dframe; // [var][i][j]
};

/// Torsion of the horizontal subspace spanned by (S(x)v, H v) at the
/// identity frame point over x, where H holds algebra coordinates
/// (dim g rows, one column per base direction):
///   t(H)(v, w) = S^-1 DS[Sw] v - S^-1 DS[Sv] w + H(w) v - H(v) w.
/// Shifting H by ell in g (x) V* shifts the value by the alternation of ell.
VectorTensor torsion_function(const LocalGStructure& s, const Vec& x, const Mat& H);

/// Horizontal families with torsion in the chosen complement, sampled over
/// the base: the particular solution at each point, the solution cosets
/// (kernel of the alternation on g (x) V*, coordinates mu * n + j), and the
/// sampled equivariance defect of the induced frame-bundle form.
struct FirstProlongation {
  TorsionSplit split;
  std::vector<Vec> base_points;
  std::vector<Mat> horizontal;      // particular H per sample
  std::vector<double> torsion_norm; // |t(H)| per sample, flat coordinates
  std::vector<Vec> coset_directions;
  int coset_dim = 0;
  double theta1_equivariance = 0.0;
};

FirstProlongation first_prolongation_bundle(const LocalGStructure& s, int samples = 8,
                                            std::uint64_t seed = kDefaultSeed);

/// Canonical connection of a structure whose algebra has vanishing first
/// prolongation, on the principal model U x G with values in g acting on V.
/// The coframe block is the inverse frame, the algebra block the unique
/// horizontal correction with torsion in the complement.
CartanConnection type1_connection(const LocalGStructure& s, double fiber_radius = 0.4);

/// Rank data of the alternation maps one level up: curvature-type tensors
/// R(g) inside g (x) Lambda^2 V* and the quotients cut out by the image of
/// g^(1) (x) V*.  All complements orthogonal in coordinates.
struct CurvatureSplitting {
  int dim_g_lambda2 = 0; // dim g (x) Lambda^2 V*
  int dim_R = 0;         // kernel of the V-valued 3-form alternation
  int dim_d1 = 0;        // complement of R(g)
  int dim_delta_g1 = 0;  // alternation image of g^(1) (x) V*
  int dim_d2 = 0;        // complement of that image inside R(g)
  int dim_ker_delta2 = 0; // kernel of the same map, equals dim g^(2)
  int dim_g_v = 0;       // dim g (x) V*
  int dim_g1 = 0;
  int dim_d3 = 0;        // dim g (x) V* - dim g^(1)
  /// Size of the composite of the two alternation maps; zero means the
  /// level-one image lands exactly inside R(g).
  double g1_leakage = 0.0;
};

CurvatureSplitting curvature_splitting(const LinearLieAlgebra& g);

/// Canonical connection for an algebra with vanishing second prolongation,
/// on the flat structure only: the model fiber carries g + g^(1) inside the
/// truncated symbol algebra V + g + g^(1), and the connection is the
/// Maurer-Cartan form of that algebra's group in the product chart.
CartanConnection type2_connection(const LocalGStructure& s, double fiber_radius = 0.25);

} // namespace cartanlab

#pragma once

#include <string>
#include <vector>

#include "cartanlab/lie_algebra.hpp"

namespace cartanlab {

/// Defining relation satisfied by a preset matrix group, used to measure
/// membership drift and to project integrator output back onto the group.
enum class GroupTag {
  Generic,
  Diagonal,
  Orthogonal,        // g^T g = I, det g = 1 on the identity component
  SpecialLinear,     // det g = 1
  Symplectic,        // g^T J g = J
  UnitUpperTriangular,
  Euclidean,         // affine block form with orthogonal linear part
  Affine,            // affine block form, last row (0 .. 0 1)
};

struct GroupPreset {
  std::string name;
  MatrixRep rep;
  GroupTag tag;
};

/// Names accepted by algebra_preset / rep_preset / group_preset.
std::vector<std::string> algebra_preset_names();
/// Names accepted by pair_preset, in "h/g" form.
std::vector<std::string> pair_preset_names();

LieAlgebra algebra_preset(const std::string& name);
MatrixRep rep_preset(const std::string& name);
GroupPreset group_preset(const std::string& name);

/// Subalgebra pair "h/g" (for example "sl2/borel").  "h/h" is accepted for
/// every algebra preset and gives the identity embedding.
SubalgebraEmbedding pair_preset(const std::string& name);

/// Frobenius-norm defect of the defining relation at g.
double relation_residual(GroupTag tag, const Mat& g);
/// Polar-type correction towards the defining relation.  Tags without a
/// direct correction formula (Generic, Symplectic) are returned unchanged.
Mat project_to_group(GroupTag tag, const Mat& g);

} // namespace cartanlab

#pragma once

#include "steklov/mesh.hpp"
#include "steklov/sparse.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace steklov {

/// One P1 degree of freedom per mesh vertex; no constrained DOFs.
struct DofMap {
  int total_dofs = 0;
  std::vector<int> boundary_dofs;

  static DofMap from_mesh(const TriangleMesh& mesh);
};

/// K assembles a(u,v) = int grad u . grad v + u v over the domain,
/// M assembles b(u,v) = int u v over the boundary.
struct FormPair {
  SparseSymMatrix K;
  SparseSymMatrix M;

  /// sqrt(u^T K u).
  double energy_norm(const Vector& u) const;
  /// sqrt(u^T M u).
  double boundary_norm(const Vector& u) const;
};

/// Gradient part of the P1 element matrix: int_T grad phi_i . grad phi_j.
Eigen::Matrix3d element_gradient_matrix(const std::array<Point2, 3>& corners);
/// Mass part of the P1 element matrix: int_T phi_i phi_j = area/12 * [[2,1,1],[1,2,1],[1,1,2]].
Eigen::Matrix3d element_mass_matrix(const std::array<Point2, 3>& corners);
/// Full element matrix of a(.,.): gradient part plus mass part.
Eigen::Matrix3d element_stiffness(const std::array<Point2, 3>& corners);
/// (|l|/6) * [[2,1],[1,2]].
Eigen::Matrix2d edge_boundary_mass(Point2 a, Point2 b);

FormPair assemble(const TriangleMesh& mesh, const DofMap& dofs);
inline FormPair assemble(const TriangleMesh& mesh) { return assemble(mesh, DofMap::from_mesh(mesh)); }

} // namespace steklov

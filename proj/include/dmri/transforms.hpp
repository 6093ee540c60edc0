#pragma once

#include "dmri/sequence.hpp"

#include <span>
#include <vector>

namespace dmri {

/**
 * Forward differences of every frame: P (vertical, (m-1) x n) and Q
 * (horizontal, m x (n-1)). Also the container for the TV dual variable.
 */
class DualField
{
public:
  // `shape` is the shape of the image sequence the field belongs to.
  DualField(Shape shape, std::vector<Cx> p, std::vector<Cx> q);

  static DualField zeros(Shape shape);

  Shape image_shape() const { return shape_; }
  std::span<Cx const> p() const { return p_; }
  std::span<Cx const> q() const { return q_; }

  Cx p(std::size_t t, std::size_t i, std::size_t j) const { return p_[(t * (shape_.rows - 1) + i) * shape_.cols + j]; }
  Cx q(std::size_t t, std::size_t i, std::size_t j) const { return q_[(t * shape_.rows + i) * (shape_.cols - 1) + j]; }

  bool all_finite() const;
  double max_magnitude() const;

  DualField operator+(DualField const &other) const;
  DualField operator*(double scale) const;

  bool operator==(DualField const &other) const = default;

private:
  Shape shape_;
  std::vector<Cx> p_;
  std::vector<Cx> q_;
};

/// <a, b> summed over both the P and Q blocks.
Cx inner_product(DualField const &a, DualField const &b);

/// Per-frame 2D DFT, scaled by 1/sqrt(m n) so the transform is unitary. DC sits at (0, 0).
DynamicSequence dft2_forward(DynamicSequence const &x);
/// Inverse of dft2_forward (and its adjoint).
DynamicSequence dft2_adjoint(DynamicSequence const &k);

DualField grad_forward(DynamicSequence const &x);
DynamicSequence grad_adjoint(DualField const &y);

/// Anisotropic TV summed over frames: sum of |P| + |Q|.
double tv_seminorm(DynamicSequence const &x);

/// Sum of singular values of the Casorati matrix.
double nuclear_norm(DynamicSequence const &x);
std::vector<double> singular_values(DynamicSequence const &x);

/// Singular value soft-thresholding of the Casorati matrix; the prox of threshold * ||.||_*.
DynamicSequence svt(DynamicSequence const &xbar, double threshold);

/// Entrywise y / max(1, |y|).
DualField project_linf_ball(DualField const &ybar);
Cx project_unit_disk(Cx y);

} // namespace dmri

#pragma once

#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

/// Finite-dimensional Hilbert space with a distinguished unit vector and
/// the associated vector state phi(x) = <x xi, xi>.  Elements act as
/// dim x dim matrices.  The orthogonal complement of xi carries a fixed
/// orthonormal basis (Gram-Schmidt over the coordinate vectors, skipping
/// the pivot with the largest overlap with xi).
class PointedSpace {
 public:
  PointedSpace(int dim, int unit_index);
  static PointedSpace with_unit_vector(ComplexVector xi);

  int dim() const { return static_cast<int>(xi_.size()); }
  const ComplexVector& unit_vector() const { return xi_; }
  /// Columns are the orthonormal basis of the complement of xi.
  const ComplexMatrix& complement_basis() const { return h0_; }

  Complex state(const ComplexMatrix& x) const;

  /// Block data of x relative to H = H0 (+) C xi:
  /// x (h + c xi) = (b h + c eta) + (<h, zeta> + c t) xi.
  struct BlockForm {
    ComplexMatrix b;
    ComplexVector eta;
    ComplexVector zeta;
    Complex t;
  };
  BlockForm block_form(const ComplexMatrix& x) const;

 private:
  explicit PointedSpace(ComplexVector xi, ComplexMatrix h0);
  ComplexVector xi_;
  ComplexMatrix h0_;
};

/// Truncated free product of pointed spaces: the vacuum plus all
/// alternating tensors over the complements, up to the given tensor
/// length.  Basis labels are sequences of (factor, complement index) legs
/// with consecutive factors distinct, ordered by length then
/// lexicographically.
class FreeProductSpace {
 public:
  struct Leg {
    int factor;
    int component;
    bool operator==(const Leg&) const = default;
  };

  FreeProductSpace(std::vector<PointedSpace> factors, int depth, std::size_t max_dim = 500'000);

  std::size_t dimension() const { return labels_.size(); }
  int depth() const { return depth_; }
  std::size_t factor_count() const { return factors_.size(); }
  const PointedSpace& factor(int i) const { return factors_[i]; }

  const std::vector<Leg>& label(std::size_t index) const { return labels_[index]; }
  int tensor_length(std::size_t index) const { return static_cast<int>(labels_[index].size()); }
  std::size_t index_of(const std::vector<Leg>& label) const;

  /// Projection onto tensors of length <= depth - 1 (the subspace on
  /// which the truncated action agrees with the untruncated one).
  SparseOperator interior_projection() const;

 private:
  std::vector<PointedSpace> factors_;
  int depth_;
  std::vector<std::vector<Leg>> labels_;
  std::vector<std::size_t> first_of_length_;
};

/// The factor element x acting on the truncated free product: the explicit
/// action through the block data (b, eta, zeta, t); tensors that would
/// exceed the depth are dropped.
SparseOperator embed(const FreeProductSpace& space, int factor, const ComplexMatrix& x);

/// Diagonal projection onto tensors whose first leg lies in the given
/// factor's complement.
SparseOperator factor_projection(const FreeProductSpace& space, int factor);

struct FreenessPair {
  SparseOperator u;  // embed(x) e_i
  SparseOperator v;  // e_i embed(x) (1 - e_i)
};

/// For mean-zero contractive x, splits embed(x) into u + v; requires
/// |phi(x)| <= 1e-10 and ||x|| <= 1 (+ numerical slack).
FreenessPair freeness_decomposition(const FreeProductSpace& space, int factor,
                                    const ComplexMatrix& x);

}  // namespace opalg

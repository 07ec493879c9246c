#include "opalg/freeprod.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace opalg {

PointedSpace::PointedSpace(ComplexVector xi, ComplexMatrix h0)
    : xi_(std::move(xi)), h0_(std::move(h0)) {}

PointedSpace::PointedSpace(int dim, int unit_index) : xi_(), h0_() {
  if (dim < 1 || unit_index < 0 || unit_index >= dim)
    throw std::invalid_argument("PointedSpace: bad dimension or unit index");
  ComplexVector xi = ComplexVector::Zero(dim);
  xi(unit_index) = 1.0;
  *this = with_unit_vector(std::move(xi));
}

PointedSpace PointedSpace::with_unit_vector(ComplexVector xi) {
  const Eigen::Index dim = xi.size();
  if (dim < 1) throw std::invalid_argument("PointedSpace: empty space");
  if (std::abs(xi.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("PointedSpace: distinguished vector must be a unit vector");

  // Gram-Schmidt of the coordinate vectors against xi, deterministic
  // pivot order, dropping the coordinate most aligned with xi.
  Eigen::Index drop = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (std::abs(xi(i)) > best) {
      best = std::abs(xi(i));
      drop = i;
    }
  ComplexMatrix h0(dim, dim - 1);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i == drop) continue;
    ComplexVector v = ComplexVector::Zero(dim);
    v(i) = 1.0;
    v -= xi * (xi.dot(v));
    for (Eigen::Index j = 0; j < col; ++j) v -= h0.col(j) * (h0.col(j).dot(v));
    const double nrm = v.norm();
    if (nrm < 1e-8) throw std::invalid_argument("PointedSpace: degenerate complement basis");
    h0.col(col++) = v / nrm;
  }
  return PointedSpace(std::move(xi), std::move(h0));
}

Complex PointedSpace::state(const ComplexMatrix& x) const {
  if (x.rows() != dim() || x.cols() != dim())
    throw std::invalid_argument("PointedSpace: element dimension mismatch");
  return xi_.dot(x * xi_);  // <x xi, xi>
}

PointedSpace::BlockForm PointedSpace::block_form(const ComplexMatrix& x) const {
  if (x.rows() != dim() || x.cols() != dim())
    throw std::invalid_argument("PointedSpace: element dimension mismatch");
  BlockForm f;
  f.b = h0_.adjoint() * x * h0_;
  f.eta = h0_.adjoint() * (x * xi_);
  f.zeta = h0_.adjoint() * (x.adjoint() * xi_);
  f.t = state(x);
  return f;
}

FreeProductSpace::FreeProductSpace(std::vector<PointedSpace> factors, int depth,
                                   std::size_t max_dim)
    : factors_(std::move(factors)), depth_(depth) {
  if (factors_.empty()) throw std::invalid_argument("FreeProductSpace: need at least one factor");
  if (depth_ < 1) throw std::invalid_argument("FreeProductSpace: depth must be >= 1");

  labels_.emplace_back();  // vacuum
  first_of_length_.push_back(0);
  std::size_t level_begin = 0;
  for (int len = 1; len <= depth_; ++len) {
    const std::size_t level_end = labels_.size();
    first_of_length_.push_back(level_end);
    for (std::size_t w = level_begin; w < level_end; ++w) {
      const std::vector<Leg> base = labels_[w];
      const int last_factor = base.empty() ? -1 : base.back().factor;
      for (int f = 0; f < static_cast<int>(factors_.size()); ++f) {
        if (f == last_factor) continue;  // alternation constraint
        const int comp_dim = factors_[f].dim() - 1;
        for (int c = 0; c < comp_dim; ++c) {
          std::vector<Leg> next = base;
          next.push_back({f, c});
          labels_.push_back(std::move(next));
          if (labels_.size() > max_dim)
            throw SizeLimitError("FreeProductSpace: dimension exceeds limit", labels_.size(),
                                 max_dim);
        }
      }
    }
    level_begin = level_end;
  }
  first_of_length_.push_back(labels_.size());
}

std::size_t FreeProductSpace::index_of(const std::vector<Leg>& label) const {
  // labels are few at desk scale; a linear scan within the length block
  // keeps the class free of hash-map bookkeeping
  const int len = static_cast<int>(label.size());
  if (len > depth_) throw std::invalid_argument("FreeProductSpace: label too long");
  const std::size_t begin = first_of_length_[len];
  const std::size_t end = first_of_length_[len + 1];
  for (std::size_t i = begin; i < end; ++i)
    if (labels_[i] == label) return i;
  throw std::invalid_argument("FreeProductSpace: label not in basis");
}

SparseOperator FreeProductSpace::interior_projection() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < dimension(); ++i)
    if (tensor_length(i) <= depth_ - 1) d(static_cast<Eigen::Index>(i)) = 1.0;
  return SparseOperator::diagonal(d);
}

SparseOperator embed(const FreeProductSpace& space, int factor, const ComplexMatrix& x) {
  if (factor < 0 || factor >= static_cast<int>(space.factor_count()))
    throw std::invalid_argument("embed: factor index out of range");
  const PointedSpace& ps = space.factor(factor);
  const PointedSpace::BlockForm f = ps.block_form(x);
  const int comp_dim = ps.dim() - 1;
  using Leg = FreeProductSpace::Leg;

  std::vector<Triplet> ts;
  for (std::size_t col = 0; col < space.dimension(); ++col) {
    const std::vector<Leg>& w = space.label(col);
    const Eigen::Index c = static_cast<Eigen::Index>(col);

    if (w.empty()) {
      // vacuum: x xi = eta (x) vacuum + t vacuum
      if (f.t != Complex(0, 0)) ts.push_back({0, c, f.t});
      for (int p = 0; p < comp_dim; ++p)
        if (f.eta(p) != Complex(0, 0)) {
          const auto row = space.index_of({Leg{factor, p}});
          ts.push_back({static_cast<Eigen::Index>(row), c, f.eta(p)});
        }
      continue;
    }

    if (w.front().factor == factor) {
      // first leg in this factor: act by b on it and contract against zeta
      const int p = w.front().component;
      for (int q = 0; q < comp_dim; ++q)
        if (f.b(q, p) != Complex(0, 0)) {
          std::vector<Leg> target = w;
          target.front().component = q;
          ts.push_back({static_cast<Eigen::Index>(space.index_of(target)), c, f.b(q, p)});
        }
      const Complex coeff = std::conj(f.zeta(p));  // <h_1, zeta>
      if (coeff != Complex(0, 0)) {
        std::vector<Leg> rest(w.begin() + 1, w.end());
        ts.push_back({static_cast<Eigen::Index>(space.index_of(rest)), c, coeff});
      }
    } else {
      // first leg elsewhere: prepend eta (dropped past the depth) and add t
      if (f.t != Complex(0, 0)) ts.push_back({c, c, f.t});
      if (static_cast<int>(w.size()) + 1 <= space.depth()) {
        for (int p = 0; p < comp_dim; ++p)
          if (f.eta(p) != Complex(0, 0)) {
            std::vector<Leg> target;
            target.reserve(w.size() + 1);
            target.push_back({factor, p});
            target.insert(target.end(), w.begin(), w.end());
            ts.push_back({static_cast<Eigen::Index>(space.index_of(target)), c, f.eta(p)});
          }
      }
    }
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(space.dimension());
  return SparseOperator::accumulate(dim, dim, ts);
}

SparseOperator factor_projection(const FreeProductSpace& space, int factor) {
  if (factor < 0 || factor >= static_cast<int>(space.factor_count()))
    throw std::invalid_argument("factor_projection: factor index out of range");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dimension()));
  for (std::size_t i = 1; i < space.dimension(); ++i)
    if (space.label(i).front().factor == factor) d(static_cast<Eigen::Index>(i)) = 1.0;
  return SparseOperator::diagonal(d);
}

FreenessPair freeness_decomposition(const FreeProductSpace& space, int factor,
                                    const ComplexMatrix& x) {
  const PointedSpace& ps = space.factor(factor);
  if (std::abs(ps.state(x)) > 1e-10)
    throw std::invalid_argument("freeness_decomposition: element is not mean-zero");
  if (operator_norm(x) > 1.0 + 1e-9)
    throw std::invalid_argument("freeness_decomposition: element norm exceeds 1");
  const SparseOperator xi = embed(space, factor, x);
  const SparseOperator ei = factor_projection(space, factor);
  const SparseOperator one = SparseOperator::identity(xi.rows());
  return {xi * ei, ei * xi * (one - ei)};
}

}  // namespace opalg

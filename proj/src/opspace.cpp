#include "opalg/opspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

#include "opalg/rng.hpp"

namespace opalg {

namespace {

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Lexicographic rank of the digits of `flat` restricted to `positions`
// (1-based, increasing); the earliest position is most significant.
std::size_t restricted_rank(std::size_t flat, int n, int k, const std::vector<int>& positions) {
  std::vector<int> digits(k);
  for (int t = k - 1; t >= 0; --t) {
    digits[t] = static_cast<int>(flat % n);
    flat /= n;
  }
  std::size_t rank = 0;
  for (int p : positions) rank = rank * n + digits[p - 1];
  return rank;
}

struct NuclearValueAndSubgradient {
  double value;
  ComplexMatrix subgradient;  // U V^H over the significant singular directions
};

NuclearValueAndSubgradient nuclear_subgradient(const ComplexMatrix& x) {
  if (x.rows() == 0 || x.cols() == 0) return {0.0, ComplexMatrix::Zero(x.rows(), x.cols())};
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double value = sv.sum();
  const double cut = sv.size() > 0 ? 1e-12 * std::max(sv(0), 1e-300) : 0.0;
  ComplexMatrix g = ComplexMatrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) g += svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
  return {value, std::move(g)};
}

using Family = std::vector<ComplexMatrix>;

Family zero_family(const OperatorFamily& shape) {
  return Family(shape.family_size(), ComplexMatrix::Zero(shape.dim(), shape.dim()));
}

double family_frobenius(const Family& f) {
  double s = 0;
  for (const auto& m : f) s += m.squaredNorm();
  return std::sqrt(s);
}

OperatorFamily to_operator_family(const OperatorFamily& shape, const Family& f) {
  return OperatorFamily::from_entries(shape.index_range(), shape.degree(), shape.dim(), f);
}

}  // namespace

AlphaMask::AlphaMask(int degree, unsigned bits) : degree_(degree), bits_(bits) {
  if (degree < 0 || degree > 30) throw std::invalid_argument("AlphaMask: degree out of range");
  if (degree < 30 && bits >= (1u << degree))
    throw std::invalid_argument("AlphaMask: bits outside of {1,...,degree}");
}

AlphaMask AlphaMask::from_positions(int degree, const std::vector<int>& positions) {
  unsigned bits = 0;
  for (int p : positions) {
    if (p < 1 || p > degree) throw std::invalid_argument("AlphaMask: position out of range");
    bits |= 1u << (p - 1);
  }
  return AlphaMask(degree, bits);
}

int AlphaMask::member_count() const { return __builtin_popcount(bits_); }

std::vector<int> AlphaMask::positions() const {
  std::vector<int> out;
  for (int p = 1; p <= degree_; ++p)
    if (contains(p)) out.push_back(p);
  return out;
}

OperatorFamily::OperatorFamily(int index_range, int degree, int dim)
    : n_(index_range), k_(degree), d_(dim) {
  if (n_ < 1 || k_ < 1 || d_ < 1)
    throw std::invalid_argument("OperatorFamily: n, k, d must be positive");
  entries_.assign(int_pow(static_cast<std::size_t>(n_), k_), ComplexMatrix::Zero(d_, d_));
}

OperatorFamily OperatorFamily::from_entries(int index_range, int degree, int dim,
                                            std::vector<ComplexMatrix> entries) {
  OperatorFamily fam(index_range, degree, dim);
  if (entries.size() != fam.entries_.size())
    throw std::invalid_argument("OperatorFamily: wrong number of entries");
  for (const auto& e : entries)
    if (e.rows() != dim || e.cols() != dim)
      throw std::invalid_argument("OperatorFamily: entry dimension mismatch");
  fam.entries_ = std::move(entries);
  return fam;
}

const ComplexMatrix& OperatorFamily::entry(const std::vector<int>& multi_index) const {
  return entries_[flat_index(multi_index)];
}

std::size_t OperatorFamily::flat_index(const std::vector<int>& multi_index) const {
  if (static_cast<int>(multi_index.size()) != k_)
    throw std::invalid_argument("OperatorFamily: multi-index has wrong length");
  std::size_t flat = 0;
  for (int j : multi_index) {
    if (j < 1 || j > n_) throw std::invalid_argument("OperatorFamily: index out of range");
    flat = flat * n_ + static_cast<std::size_t>(j - 1);
  }
  return flat;
}

std::vector<int> OperatorFamily::multi_index(std::size_t flat) const {
  std::vector<int> J(k_);
  for (int t = k_ - 1; t >= 0; --t) {
    J[t] = static_cast<int>(flat % n_) + 1;
    flat /= n_;
  }
  return J;
}

OperatorFamily OperatorFamily::scaled(Complex factor) const {
  OperatorFamily out(n_, k_, d_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = factor * entries_[i];
  return out;
}

ComplexMatrix matricize(const OperatorFamily& fam, const AlphaMask& alpha) {
  if (alpha.degree() != fam.degree())
    throw std::invalid_argument("matricize: mask degree does not match family degree");
  const int n = fam.index_range();
  const int k = fam.degree();
  const int d = fam.dim();
  const std::vector<int> col_positions = alpha.positions();
  const std::vector<int> row_positions = alpha.complement().positions();
  const std::size_t rows = int_pow(n, static_cast<int>(row_positions.size()));
  const std::size_t cols = int_pow(n, static_cast<int>(col_positions.size()));

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(rows) * d,
                                          static_cast<Eigen::Index>(cols) * d);
  for (std::size_t flat = 0; flat < fam.family_size(); ++flat) {
    const std::size_t r = restricted_rank(flat, n, k, row_positions);
    const std::size_t c = restricted_rank(flat, n, k, col_positions);
    out.block(static_cast<Eigen::Index>(r) * d, static_cast<Eigen::Index>(c) * d, d, d) =
        fam.entry_flat(flat);
  }
  return out;
}

double alpha_norm(const OperatorFamily& fam, const AlphaMask& alpha) {
  return operator_norm(matricize(fam, alpha));
}

double bracket_norm(const OperatorFamily& fam) {
  const unsigned count = 1u << fam.degree();
  double best = 0.0;
  for (unsigned bits = 0; bits < count; ++bits)
    best = std::max(best, alpha_norm(fam, AlphaMask(fam.degree(), bits)));
  return best;
}

EnAssembly assemble_en_tensor(const OperatorFamily& fam, Eigen::Index max_rows) {
  const int n = fam.index_range();
  const int k = fam.degree();
  const int d = fam.dim();
  const std::size_t side = int_pow(static_cast<std::size_t>(2 * n), k) * d;
  if (side > static_cast<std::size_t>(max_rows))
    throw SizeLimitError("assemble_en_tensor: operator too large", side,
                         static_cast<std::size_t>(max_rows));

  const Eigen::Index dim = static_cast<Eigen::Index>(side);
  EnAssembly assembly;
  assembly.total = ComplexMatrix::Zero(dim, dim);
  assembly.components.assign(1u << k, ComplexMatrix::Zero(dim, dim));

  // delta_i on C^{2n} has the entry e_{i1} in the first block (action
  // e_1 -> e_i, index recorded on the output side) and e_{1i} in the
  // second block (action e_i -> e_1, index recorded on the input side).
  // A mask selects, leg by leg, which of the two entries survives; legs
  // in the mask therefore index matricization columns.
  for (unsigned bits = 0; bits < (1u << k); ++bits) {
    ComplexMatrix& comp = assembly.components[bits];
    for (std::size_t flat = 0; flat < fam.family_size(); ++flat) {
      const std::vector<int> J = fam.multi_index(flat);
      std::size_t row = 0, col = 0;
      for (int t = 1; t <= k; ++t) {
        const int j = J[t - 1];
        std::size_t leg_row, leg_col;
        if ((bits >> (t - 1)) & 1u) {
          leg_row = static_cast<std::size_t>(n);          // e_1 in the second block
          leg_col = static_cast<std::size_t>(n + j - 1);  // e_j in the second block
        } else {
          leg_row = static_cast<std::size_t>(j - 1);  // e_j in the first block
          leg_col = 0;                                // e_1 in the first block
        }
        row = row * (2 * n) + leg_row;
        col = col * (2 * n) + leg_col;
      }
      comp.block(static_cast<Eigen::Index>(row) * d, static_cast<Eigen::Index>(col) * d, d, d) +=
          fam.entry_flat(flat);
    }
    assembly.total += comp;
  }
  return assembly;
}

double dual_alpha_norm(const OperatorFamily& fam, const AlphaMask& alpha) {
  return trace_norm(matricize(fam, alpha));
}

namespace {

// Places the entries of a matricization-shaped subgradient back into
// family coordinates.
Family unmatricize(const ComplexMatrix& g, const OperatorFamily& shape, const AlphaMask& alpha) {
  const int n = shape.index_range();
  const int k = shape.degree();
  const int d = shape.dim();
  const std::vector<int> col_positions = alpha.positions();
  const std::vector<int> row_positions = alpha.complement().positions();
  Family out(shape.family_size());
  for (std::size_t flat = 0; flat < shape.family_size(); ++flat) {
    const std::size_t r = restricted_rank(flat, n, k, row_positions);
    const std::size_t c = restricted_rank(flat, n, k, col_positions);
    out[flat] =
        g.block(static_cast<Eigen::Index>(r) * d, static_cast<Eigen::Index>(c) * d, d, d);
  }
  return out;
}

double decomposition_cost(const std::vector<Family>& parts, const OperatorFamily& shape) {
  double total = 0.0;
  for (unsigned bits = 0; bits < parts.size(); ++bits)
    total += dual_alpha_norm(to_operator_family(shape, parts[bits]),
                             AlphaMask(shape.degree(), bits));
  return total;
}

}  // namespace

DualBracketCertificate dual_bracket_norm(const OperatorFamily& fam,
                                         const DualBracketOptions& options) {
  const std::size_t coordinates =
      fam.family_size() * static_cast<std::size_t>(fam.dim()) * fam.dim();
  if (coordinates > options.max_coordinates)
    throw SizeLimitError("dual_bracket_norm: family too large", coordinates,
                         options.max_coordinates);

  const int k = fam.degree();
  const unsigned mask_count = 1u << k;
  Family target(fam.family_size());
  for (std::size_t i = 0; i < fam.family_size(); ++i) target[i] = fam.entry_flat(i);
  const double scale = family_frobenius(target);

  DualBracketCertificate cert;
  if (scale == 0.0) return cert;

  // ---- upper certificate: projected subgradient descent on the sum of
  // per-mask trace norms, over decompositions summing to the target.
  double best_upper = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (int restart = 0; restart < options.restarts; ++restart) {
    Rng rng(derive_seed(options.seed, 0xA000 + static_cast<std::uint64_t>(restart)));
    std::vector<Family> parts(mask_count, zero_family(fam));
    if (restart < static_cast<int>(mask_count)) {
      parts[restart] = target;
    } else {
      // random convex split of the target across the masks
      std::vector<double> w(mask_count);
      double sum = 0;
      for (auto& x : w) {
        x = rng.uniform() + 1e-3;
        sum += x;
      }
      for (unsigned b = 0; b < mask_count; ++b)
        for (std::size_t i = 0; i < target.size(); ++i)
          parts[b][i] = (w[b] / sum) * target[i];
    }

    double current = decomposition_cost(parts, fam);
    best_upper = std::min(best_upper, current);
    double step = 0.2 * scale;
    double restart_best = current;
    bool converged = false;

    for (int it = 0; it < options.iterations; ++it) {
      // subgradient of each per-mask trace norm
      std::vector<Family> grads(mask_count);
      for (unsigned b = 0; b < mask_count; ++b) {
        const AlphaMask alpha(k, b);
        const auto vs = nuclear_subgradient(matricize(to_operator_family(fam, parts[b]), alpha));
        grads[b] = unmatricize(vs.subgradient, fam, alpha);
      }
      for (unsigned b = 0; b < mask_count; ++b)
        for (std::size_t i = 0; i < target.size(); ++i) parts[b][i] -= step * grads[b][i];
      // re-project onto the affine constraint sum_b parts[b] = target
      Family deviation = zero_family(fam);
      for (unsigned b = 0; b < mask_count; ++b)
        for (std::size_t i = 0; i < target.size(); ++i) deviation[i] += parts[b][i];
      for (std::size_t i = 0; i < target.size(); ++i)
        deviation[i] = (deviation[i] - target[i]) / static_cast<double>(mask_count);
      for (unsigned b = 0; b < mask_count; ++b)
        for (std::size_t i = 0; i < target.size(); ++i) parts[b][i] -= deviation[i];

      current = decomposition_cost(parts, fam);
      if (current < best_upper) best_upper = current;
      if (restart_best - current < options.improvement_tol && it > 20) {
        converged = true;
        break;
      }
      restart_best = std::min(restart_best, current);
      step *= options.step_decay;
    }
    any_converged = any_converged || converged;
  }
  cert.upper = best_upper;

  // ---- lower certificate: projected gradient ascent of the pairing over
  // the unit ball of the bracket norm.  Every evaluated point is feasible,
  // so the best value is a true lower bound.
  auto pairing = [&](const Family& a) {
    Complex z = 0;
    for (std::size_t i = 0; i < target.size(); ++i)
      z += (target[i].adjoint() * a[i]).trace();
    return z;
  };

  double best_lower = 0.0;
  const int ascent_restarts = std::max(4, options.restarts / 4);
  for (int restart = 0; restart < ascent_restarts; ++restart) {
    Rng rng(derive_seed(options.seed, 0xB000 + static_cast<std::uint64_t>(restart)));
    Family a(fam.family_size());
    if (restart == 0) {
      a = target;
    } else if (restart <= static_cast<int>(mask_count)) {
      // singular directions of one matricization of the target
      const AlphaMask alpha(k, restart - 1);
      const auto vs = nuclear_subgradient(matricize(fam, alpha));
      a = unmatricize(vs.subgradient, fam, alpha);
    } else {
      for (auto& m : a) m = rng.gaussian_matrix(fam.dim(), fam.dim());
    }

    double bn = bracket_norm(to_operator_family(fam, a));
    if (bn <= 0) continue;
    for (auto& m : a) m /= bn;
    double value = std::abs(pairing(a));
    best_lower = std::max(best_lower, value);

    double step = 0.5;
    for (int it = 0; it < options.iterations / 2; ++it) {
      const Complex z = pairing(a);
      const Complex phase = std::abs(z) > 0 ? z / std::abs(z) : Complex(1, 0);
      Family trial = a;
      for (std::size_t i = 0; i < target.size(); ++i)
        trial[i] += step * phase * target[i] / scale;
      const double tn = bracket_norm(to_operator_family(fam, trial));
      if (tn > 0)
        for (auto& m : trial) m /= tn;
      const double tv = std::abs(pairing(trial));
      if (tv > value) {
        a = std::move(trial);
        value = tv;
        step *= 1.1;
      } else {
        step *= 0.6;
        if (step < 1e-10) break;
      }
    }
    best_lower = std::max(best_lower, value);
  }
  cert.lower = best_lower;
  cert.stagnated = !any_converged;

  if (cert.lower > cert.upper) cert.lower = cert.upper;  // numerical guard, both remain certified
  return cert;
}

}  // namespace opalg

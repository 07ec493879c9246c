#pragma once

#include <cstdint>
#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

/// Subset of the tensor positions {1, ..., k}, stored as a bitmask with
/// bit (t-1) set when position t belongs to the subset.
class AlphaMask {
 public:
  AlphaMask(int degree, unsigned bits);

  static AlphaMask empty(int degree) { return AlphaMask(degree, 0u); }
  static AlphaMask full(int degree) { return AlphaMask(degree, (1u << degree) - 1u); }
  static AlphaMask from_positions(int degree, const std::vector<int>& positions);

  int degree() const { return degree_; }
  unsigned bits() const { return bits_; }
  bool contains(int position) const { return (bits_ >> (position - 1)) & 1u; }
  int member_count() const;
  AlphaMask complement() const { return AlphaMask(degree_, ~bits_ & ((1u << degree_) - 1u)); }
  std::vector<int> positions() const;

  bool operator==(const AlphaMask&) const = default;

 private:
  int degree_;
  unsigned bits_;
};

/// Family of d x d complex matrices indexed by [n]^k.  The flat index of
/// a multi-index (j_1, ..., j_k), all 1-based, is sum (j_t - 1) n^{k-t}:
/// lexicographic with j_1 most significant.  The same flattening is used
/// for the matricizations and the concrete tensor assembly so the two
/// routes stay index-compatible.
class OperatorFamily {
 public:
  OperatorFamily(int index_range, int degree, int dim);
  static OperatorFamily from_entries(int index_range, int degree, int dim,
                                     std::vector<ComplexMatrix> entries);

  int index_range() const { return n_; }
  int degree() const { return k_; }
  int dim() const { return d_; }
  std::size_t family_size() const { return entries_.size(); }

  const ComplexMatrix& entry_flat(std::size_t flat) const { return entries_[flat]; }
  ComplexMatrix& entry_flat(std::size_t flat) { return entries_[flat]; }
  const ComplexMatrix& entry(const std::vector<int>& multi_index) const;

  std::size_t flat_index(const std::vector<int>& multi_index) const;
  std::vector<int> multi_index(std::size_t flat) const;

  OperatorFamily scaled(Complex factor) const;

 private:
  int n_, k_, d_;
  std::vector<ComplexMatrix> entries_;
};

/// Block matrix with rows indexed by [n]^{alpha^c} and columns by
/// [n]^alpha (both lexicographic), block (i, j) = a_J where J restricted
/// to alpha^c is i and restricted to alpha is j.
ComplexMatrix matricize(const OperatorFamily& fam, const AlphaMask& alpha);

double alpha_norm(const OperatorFamily& fam, const AlphaMask& alpha);

/// Maximum of alpha_norm over all 2^k masks.
double bracket_norm(const OperatorFamily& fam);

struct EnAssembly {
  ComplexMatrix total;                    // sum_J delta_J (x) a_J
  std::vector<ComplexMatrix> components;  // T_alpha, indexed by mask bits
};

/// The concrete operator sum_J delta_J (x) a_J on (C^{2n})^{(x)k} (x) C^d
/// with delta_i = e_{i1} (+) e_{1i}, together with its per-mask parts.
EnAssembly assemble_en_tensor(const OperatorFamily& fam, Eigen::Index max_rows = 8192);

/// Trace-norm dual of alpha_norm under the pairing sum_J tr(xi_J^* a_J).
double dual_alpha_norm(const OperatorFamily& fam, const AlphaMask& alpha);

struct DualBracketOptions {
  int restarts = 64;
  int iterations = 500;
  double step_decay = 0.95;
  double improvement_tol = 1e-8;
  std::uint64_t seed = 2024;
  std::size_t max_coordinates = 4096;  // n^k * d^2 guard
};

struct DualBracketCertificate {
  double lower = 0.0;  // attained pairing value against a unit-bracket-norm family
  double upper = 0.0;  // value of the best decomposition found
  bool stagnated = false;
};

/// Two-sided certificate for the decomposition-infimum dual norm: lower is
/// a feasible pairing value (so a true lower bound), upper the cost of an
/// explicit decomposition (so a true upper bound).
DualBracketCertificate dual_bracket_norm(const OperatorFamily& fam,
                                         const DualBracketOptions& options = {});

}  // namespace opalg

#include "opalg/freegroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace opalg {

namespace {

void push_reduced(std::vector<int>& acc, int letter) {
  if (!acc.empty() && acc.back() == -letter)
    acc.pop_back();
  else
    acc.push_back(letter);
}

// Alphabet position used for the lexicographic order within a length:
// +1 -> 0, -1 -> 1, +2 -> 2, -2 -> 3, ...
int letter_code(int letter) { return 2 * (std::abs(letter) - 1) + (letter < 0 ? 1 : 0); }

int code_to_letter(int code) {
  const int gen = code / 2 + 1;
  return (code % 2 == 0) ? gen : -gen;
}

}  // namespace

ReducedWord ReducedWord::generator(int i) {
  if (i == 0) throw std::invalid_argument("ReducedWord: generator index must be nonzero");
  ReducedWord w;
  w.letters_.push_back(i);
  return w;
}

ReducedWord ReducedWord::from_letters(const std::vector<int>& letters) {
  ReducedWord w;
  for (int l : letters) {
    if (l == 0) throw std::invalid_argument("ReducedWord: letter 0 is not valid");
    push_reduced(w.letters_, l);
  }
  return w;
}

int ReducedWord::max_generator() const {
  int m = 0;
  for (int l : letters_) m = std::max(m, std::abs(l));
  return m;
}

ReducedWord ReducedWord::inverse() const {
  ReducedWord w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
  return w;
}

ReducedWord multiply(const ReducedWord& w1, const ReducedWord& w2) {
  std::vector<int> acc = w1.letters();
  for (int l : w2.letters()) push_reduced(acc, l);
  return ReducedWord::from_letters(acc);
}

std::size_t GroupBall::predicted_size(int n, int radius, std::size_t max_words) {
  if (n < 1 || radius < 0) throw std::invalid_argument("GroupBall: need n >= 1, radius >= 0");
  long double total = 1.0L;
  long double level = 2.0L * n;
  for (int m = 1; m <= radius; ++m) {
    total += level;
    if (total > static_cast<long double>(max_words))
      throw SizeLimitError("GroupBall: ball size exceeds limit",
                           static_cast<std::size_t>(std::min<long double>(total, 1e18L)),
                           max_words);
    level *= (2.0L * n - 1.0L);
  }
  return static_cast<std::size_t>(total);
}

GroupBall::GroupBall(int generator_count, int radius, std::size_t max_words)
    : n_(generator_count), radius_(radius) {
  const std::size_t expected = predicted_size(n_, radius_, max_words);
  words_.reserve(expected);
  index_.reserve(expected);

  words_.emplace_back();
  index_.emplace(std::vector<int>{}, 0);

  std::size_t level_begin = 0;
  for (int len = 1; len <= radius_; ++len) {
    const std::size_t level_end = words_.size();
    for (std::size_t w = level_begin; w < level_end; ++w) {
      // Appending in alphabet order preserves lexicographic order within
      // the new length because the previous level is already sorted.
      const std::vector<int> base = words_[w].letters();
      for (int code = 0; code < 2 * n_; ++code) {
        const int letter = code_to_letter(code);
        if (!base.empty() && base.back() == -letter) continue;
        std::vector<int> next = base;
        next.push_back(letter);
        index_.emplace(next, words_.size());
        ReducedWord nw = ReducedWord::from_letters(next);
        words_.push_back(std::move(nw));
      }
    }
    level_begin = level_end;
  }
}

std::optional<std::size_t> GroupBall::index(const ReducedWord& w) const {
  auto it = index_.find(w.letters());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseOperator lambda_truncated(const GroupBall& ball, const ReducedWord& w) {
  if (w.max_generator() > ball.generator_count())
    throw std::invalid_argument("lambda_truncated: word uses a generator outside the ball");
  std::vector<Triplet> ts;
  ts.reserve(ball.size());
  for (std::size_t col = 0; col < ball.size(); ++col) {
    const ReducedWord target = multiply(w, ball.word(col));
    if (auto row = ball.index(target))
      ts.push_back({static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col), 1.0});
  }
  return SparseOperator::from_triplets(ball.size(), ball.size(), ts);
}

BoundaryProjections boundary_projections(const GroupBall& ball, int generator) {
  if (generator < 1 || generator > ball.generator_count())
    throw std::invalid_argument("boundary_projections: generator index out of range");
  const Eigen::Index dim = static_cast<Eigen::Index>(ball.size());
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd dp = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd dm = Eigen::VectorXd::Zero(dim);
  d0(0) = 1.0;
  for (std::size_t i = 1; i < ball.size(); ++i) {
    const int first = ball.word(i).first_letter();
    if (first == generator) dp(static_cast<Eigen::Index>(i)) = 1.0;
    if (first == -generator) dm(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return {SparseOperator::diagonal(d0), SparseOperator::diagonal(dp),
          SparseOperator::diagonal(dm)};
}

HaagerupPair haagerup_decomposition(const GroupBall& ball, int letter) {
  if (ball.radius() < 1) throw std::invalid_argument("haagerup_decomposition: radius must be >= 1");
  if (letter == 0 || std::abs(letter) > ball.generator_count())
    throw std::invalid_argument("haagerup_decomposition: letter out of range");

  // u keeps the transitions whose output starts with `letter` (length went
  // up), v keeps those whose input starts with `-letter` (length goes
  // down).  Together they reproduce the truncated translation exactly.
  std::vector<Triplet> us, vs;
  for (std::size_t col = 0; col < ball.size(); ++col) {
    const ReducedWord& g = ball.word(col);
    const ReducedWord target = multiply(ReducedWord::generator(letter), g);
    const auto row = ball.index(target);
    if (!row) continue;
    const Triplet t{static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col), 1.0};
    if (target.first_letter() == letter && target.length() == g.length() + 1) us.push_back(t);
    if (g.first_letter() == -letter) vs.push_back(t);
  }
  return {SparseOperator::from_triplets(ball.size(), ball.size(), us),
          SparseOperator::from_triplets(ball.size(), ball.size(), vs)};
}

std::vector<int> signed_letters(int n) {
  std::vector<int> out;
  out.reserve(2 * n);
  for (int i = 1; i <= n; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

SparseOperator lambda_tensor_sum(const GroupBall& ball, const std::vector<ReducedWord>& words,
                                 const std::vector<ComplexMatrix>& coefficients) {
  if (words.size() != coefficients.size())
    throw std::invalid_argument("lambda_tensor_sum: words/coefficients size mismatch");
  if (words.empty()) throw std::invalid_argument("lambda_tensor_sum: empty sum");
  const Eigen::Index d = coefficients.front().rows();
  for (const auto& c : coefficients)
    if (c.rows() != d || c.cols() != d)
      throw std::invalid_argument("lambda_tensor_sum: coefficient dimension mismatch");

  const Eigen::Index dim = static_cast<Eigen::Index>(ball.size()) * d;
  std::vector<Triplet> ts;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t col = 0; col < ball.size(); ++col) {
      const ReducedWord target = multiply(words[i], ball.word(col));
      const auto row = ball.index(target);
      if (!row) continue;
      for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q) {
          const Complex v = coefficients[i](p, q);
          if (v != Complex(0, 0))
            ts.push_back({static_cast<Eigen::Index>(*row) * d + p,
                          static_cast<Eigen::Index>(col) * d + q, v});
        }
    }
  }
  return SparseOperator::accumulate(dim, dim, ts);
}

}  // namespace opalg

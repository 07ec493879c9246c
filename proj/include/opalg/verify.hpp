#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opalg/linalg.hpp"

namespace opalg {

struct TrialConfig {
  int n = 2;
  int k = 1;
  int d = 2;
  int radius = 4;
  int depth = 8;
  int trials = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  int mc_samples = 10000;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static TrialConfig from_json(const nlohmann::json& j);
  bool operator==(const TrialConfig&) const = default;
};

/// One recorded inequality instance lhs <= rhs.  The margin is the
/// scale-free slack (rhs - lhs) / max(1, rhs); a violation is a margin
/// below -tolerance.
struct TrialRecord {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::string witness;
};

struct VerificationReport {
  std::string check;
  TrialConfig config;
  std::vector<TrialRecord> trials;
  double min_margin = 0.0;
  int violations = 0;
  double runtime_ms = 0.0;
  bool pass = false;
  bool inconclusive = false;

  /// Canonical JSON.  Wall-clock runtime is excluded unless requested so
  /// identical configurations serialize byte-identically.
  nlohmann::ordered_json to_json(bool include_runtime = false) const;
  static VerificationReport from_json(const nlohmann::json& j);
};

VerificationReport verify_prop_1_1(const TrialConfig& cfg);
VerificationReport verify_lemma_1_4(const TrialConfig& cfg);
VerificationReport verify_theorem_0k(const TrialConfig& cfg);
VerificationReport verify_khintchine(const TrialConfig& cfg);
VerificationReport verify_lemma_3_2(const TrialConfig& cfg);
VerificationReport verify_lemma_4_2(const TrialConfig& cfg);
VerificationReport verify_prop_4_8(const TrialConfig& cfg);
VerificationReport verify_prop_4_9(const TrialConfig& cfg);

const std::vector<std::string>& suite_names();  // excludes "all"
VerificationReport run_suite(const std::string& name, const TrialConfig& cfg);

/// Worker count for trial parallelism: min(hardware, 8), capped by the
/// OPSPACE_THREADS environment variable when set.
unsigned worker_count();

/// Lower estimate of the operator norm of a linear map on d x d matrices
/// (given as its d^2 x d^2 matrix over column-major vectorization) by
/// projected ascent over the unit ball with singular-value clipping.
/// Always a certified under-estimate: every evaluated point is feasible.
double matrix_map_norm_lower_estimate(const ComplexMatrix& map, int d, std::uint64_t seed,
                                      int restarts = 12, int iterations = 120);

ComplexMatrix apply_matrix_map(const ComplexMatrix& map, const ComplexMatrix& x);

}  // namespace opalg

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "opalg/fock.hpp"
#include "opalg/opspace.hpp"
#include "opalg/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kPass = 0,
  kViolation = 1,
  kInconclusive = 2,
  kUsage = 3,
  kIo = 4,
  kSizeGuard = 5,
};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& canonical) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(canonical));
  return buf;
}

nlohmann::ordered_json make_manifest(const std::string& command,
                                     const nlohmann::ordered_json& parameters) {
  nlohmann::ordered_json manifest{
      {"command", command}, {"version", kVersion}, {"parameters", parameters}};
  manifest["hash"] = hash_hex(command + "|" + std::string(kVersion) + "|" + parameters.dump());
  return manifest;
}

bool write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

// ---------------------------------------------------------------------- verify

struct VerifyOptions {
  std::string suite;
  std::optional<int> n, k, d, radius, depth, trials, mc_samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string out_path;
  bool quick = false;
  bool timings = false;
};

opalg::TrialConfig suite_defaults(const std::string& suite, bool quick) {
  opalg::TrialConfig cfg;
  if (suite == "prop11") {
    cfg.n = 2, cfg.d = 2, cfg.radius = 5, cfg.trials = 50;
  } else if (suite == "lemma14") {
    cfg.n = 3, cfg.d = 3, cfg.trials = 50;
  } else if (suite == "theorem0k") {
    cfg.k = 2, cfg.n = 2, cfg.d = 2, cfg.trials = 50;
  } else if (suite == "khintchine") {
    cfg.k = 1, cfg.n = 2, cfg.d = 2, cfg.trials = 10, cfg.mc_samples = 20000;
  } else if (suite == "lemma32") {
    cfg.k = 2, cfg.n = 2, cfg.d = 2, cfg.trials = 10, cfg.mc_samples = 20000;
  } else if (suite == "lemma42") {
    cfg.n = 2, cfg.d = 2, cfg.depth = 12, cfg.trials = 20;
  } else if (suite == "prop48") {
    cfg.n = 2, cfg.d = 2, cfg.depth = 10, cfg.trials = 20;
  } else if (suite == "prop49") {
    cfg.n = 2, cfg.d = 2, cfg.depth = 4, cfg.trials = 10;
  }
  if (quick) {
    cfg.trials = (suite == "khintchine" || suite == "lemma32") ? 4 : 6;
    cfg.radius = 4;
    if (suite == "lemma42") cfg.depth = 10;
    if (suite == "prop48") cfg.depth = 8;
    if (suite == "prop49") cfg.depth = 4;
    cfg.mc_samples = 10000;
  }
  return cfg;
}

opalg::TrialConfig resolve_config(const VerifyOptions& opt, const std::string& suite) {
  opalg::TrialConfig cfg = suite_defaults(suite, opt.quick);
  if (opt.n) cfg.n = *opt.n;
  if (opt.k) cfg.k = *opt.k;
  if (opt.d) cfg.d = *opt.d;
  if (opt.radius) cfg.radius = *opt.radius;
  if (opt.depth) cfg.depth = *opt.depth;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.mc_samples) cfg.mc_samples = *opt.mc_samples;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.tolerance) cfg.tolerance = *opt.tolerance;
  return cfg;
}

void print_report_summary(const opalg::VerificationReport& rep) {
  const char* status = rep.pass ? (rep.inconclusive ? "INCONCLUSIVE" : "PASS") : "FAIL";
  std::printf("[%-12s] %-10s records=%-4zu min_margin=%+.3e violations=%d (%.0f ms)\n", status,
              rep.check.c_str(), rep.trials.size(), rep.min_margin, rep.violations,
              rep.runtime_ms);
}

int cmd_verify(const VerifyOptions& opt) {
  std::vector<std::string> suites;
  if (opt.suite == "all")
    suites = opalg::suite_names();
  else if (std::find(opalg::suite_names().begin(), opalg::suite_names().end(), opt.suite) !=
           opalg::suite_names().end())
    suites.push_back(opt.suite);
  else {
    std::fprintf(stderr, "error: unknown suite '%s'\n", opt.suite.c_str());
    return kUsage;
  }

  nlohmann::ordered_json parameters;
  parameters["suite"] = opt.suite;
  parameters["quick"] = opt.quick;
  nlohmann::ordered_json configs = nlohmann::ordered_json::array();
  for (const auto& s : suites) configs.push_back(resolve_config(opt, s).to_json());
  parameters["configs"] = configs;
  const nlohmann::ordered_json manifest = make_manifest("verify", parameters);

  {
    const std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::printf("run %s  manifest %s  version %s\n", stamp,
                manifest["hash"].get<std::string>().c_str(), kVersion);
  }

  bool any_fail = false, any_inconclusive = false;
  nlohmann::ordered_json jreports = nlohmann::ordered_json::array();
  for (const auto& s : suites) {
    const opalg::TrialConfig cfg = resolve_config(opt, s);
    const opalg::VerificationReport rep = opalg::run_suite(s, cfg);
    print_report_summary(rep);
    nlohmann::ordered_json jr = rep.to_json(opt.timings);
    jr["manifest"] = manifest["hash"];
    jreports.push_back(std::move(jr));
    any_fail = any_fail || !rep.pass;
    any_inconclusive = any_inconclusive || rep.inconclusive;
  }

  nlohmann::ordered_json doc{{"manifest", manifest},
                             {"reports", std::move(jreports)}};
  const std::string out_path =
      opt.out_path.empty() ? (opt.suite + "_report.json") : opt.out_path;
  if (!write_text_file(out_path, doc.dump(2) + "\n")) {
    std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
    return kIo;
  }
  std::printf("report: %s (manifest %s)\n", out_path.c_str(),
              manifest["hash"].get<std::string>().c_str());
  if (any_fail) return kViolation;
  if (any_inconclusive) return kInconclusive;
  return kPass;
}

// ------------------------------------------------------------------------ norm

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

opalg::OperatorFamily parse_family_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("parse failure at line " +
                             std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  for (const char* field : {"n", "k", "d", "entries"})
    if (!doc.contains(field))
      throw std::runtime_error(std::string("parse failure: missing field '") + field + "'");

  const int n = doc["n"].get<int>();
  const int k = doc["k"].get<int>();
  const int d = doc["d"].get<int>();
  opalg::OperatorFamily fam(n, k, d);

  for (const auto& [key, value] : doc["entries"].items()) {
    std::vector<int> multi;
    std::stringstream ks(key);
    std::string part;
    while (std::getline(ks, part, ',')) multi.push_back(std::stoi(part));
    if (static_cast<int>(multi.size()) != k)
      throw std::runtime_error("parse failure: entry key '" + key + "' does not have " +
                               std::to_string(k) + " indices");
    if (!value.is_array() || value.size() != static_cast<std::size_t>(d) * d)
      throw std::runtime_error("parse failure: entry '" + key + "' must hold " +
                               std::to_string(d * d) + " [re, im] pairs (row-major)");
    opalg::ComplexMatrix m(d, d);
    for (int i = 0; i < d * d; ++i) {
      const auto& pair = value[i];
      if (!pair.is_array() || pair.size() != 2)
        throw std::runtime_error("parse failure: entry '" + key + "' element " +
                                 std::to_string(i) + " is not an [re, im] pair");
      m(i / d, i % d) = opalg::Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    fam.entry_flat(fam.flat_index(multi)) = m;
  }
  return fam;
}

std::string mask_to_string(const opalg::AlphaMask& mask) {
  std::string s = "{";
  bool first = true;
  for (int p : mask.positions()) {
    if (!first) s += ",";
    s += std::to_string(p);
    first = false;
  }
  return s + "}";
}

int cmd_norm(const std::string& path, const std::string& alpha_spec, bool assemble,
             const std::string& out_path) {
  opalg::OperatorFamily fam = [&] {
    try {
      return parse_family_file(path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      std::exit(kIo);
    }
  }();

  nlohmann::ordered_json parameters{{"file", path}, {"alpha", alpha_spec}, {"assemble", assemble}};
  const nlohmann::ordered_json manifest = make_manifest("norm", parameters);

  nlohmann::ordered_json result{{"n", fam.index_range()}, {"k", fam.degree()}, {"d", fam.dim()}};

  if (!alpha_spec.empty()) {
    std::vector<int> positions;
    if (alpha_spec != "-") {
      std::stringstream ss(alpha_spec);
      std::string part;
      while (std::getline(ss, part, ',')) positions.push_back(std::stoi(part));
    }
    const opalg::AlphaMask mask = opalg::AlphaMask::from_positions(fam.degree(), positions);
    const double value = opalg::alpha_norm(fam, mask);
    std::printf("alpha=%s  norm=%.12g\n", mask_to_string(mask).c_str(), value);
    result["alpha"] = mask_to_string(mask);
    result["alpha_norm"] = value;
  } else {
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    double best = 0.0;
    for (unsigned bits = 0; bits < (1u << fam.degree()); ++bits) {
      const opalg::AlphaMask mask(fam.degree(), bits);
      const double value = opalg::alpha_norm(fam, mask);
      best = std::max(best, value);
      std::printf("alpha=%-12s norm=%.12g\n", mask_to_string(mask).c_str(), value);
      table.push_back(nlohmann::ordered_json{{"alpha", mask_to_string(mask)}, {"norm", value}});
    }
    std::printf("bracket norm = %.12g\n", best);
    result["alpha_norms"] = std::move(table);
    result["bracket_norm"] = best;
  }

  int rc = kPass;
  if (assemble) {
    const opalg::EnAssembly assembly = opalg::assemble_en_tensor(fam);
    const double assembled = opalg::operator_norm(assembly.total);
    const double bracket = opalg::bracket_norm(fam);
    std::printf("assembled norm = %.12g (bracket %.12g)\n", assembled, bracket);
    result["assembled_norm"] = assembled;
    result["bracket_norm"] = bracket;
    if (std::abs(assembled - bracket) > 1e-8 * std::max(1.0, bracket)) {
      std::fprintf(stderr, "mismatch: assembled operator norm differs from bracket norm\n");
      rc = kViolation;
    }
  }

  if (!out_path.empty()) {
    result["manifest"] = manifest;
    if (!write_text_file(out_path, result.dump(2) + "\n")) {
      std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
      return kIo;
    }
  }
  return rc;
}

// -------------------------------------------------------------------- converge

int cmd_converge(const std::string& target, int n, int depth_min, int depth_max,
                 const std::string& out_path) {
  if (n < 1 || depth_min > depth_max) {
    std::fprintf(stderr, "error: bad depth range\n");
    return kUsage;
  }
  nlohmann::ordered_json parameters{
      {"target", target}, {"n", n}, {"depth_min", depth_min}, {"depth_max", depth_max}};
  const nlohmann::ordered_json manifest = make_manifest("converge", parameters);

  std::string csv = "depth,value,limit,gap\n";
  char row[128];
  if (target == "cuntz") {
    const double limit = 0.5 * (1.0 + std::sqrt(static_cast<double>(n)));
    for (int dep = depth_min; dep <= depth_max; ++dep) {
      const double value = opalg::cuntz_witness_value(n, dep);
      std::snprintf(row, sizeof(row), "%d,%.12g,%.12g,%.12g\n", dep, value, limit, limit - value);
      csv += row;
    }
  } else if (target == "semicircular") {
    const double limit = 0.25;
    for (int dep = depth_min; dep <= depth_max; ++dep) {
      const opalg::SemicircularSystem sys = opalg::semicircular_system(n, dep);
      const double value = std::real(opalg::vacuum_state(sys.basis, sys.x[0] * sys.x[0]));
      std::snprintf(row, sizeof(row), "%d,%.12g,%.12g,%.12g\n", dep, value, limit, limit - value);
      csv += row;
    }
  } else {
    std::fprintf(stderr, "error: unknown target '%s'\n", target.c_str());
    return kUsage;
  }
  csv += "# manifest=" + manifest["hash"].get<std::string>() + "\n";

  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else if (!write_text_file(out_path, csv)) {
    std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
    return kIo;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opalg - numerical toolkit for operator-space norms on truncated "
               "free-group, Fock and free-product representations"};
  app.require_subcommand(1);

  VerifyOptions vopt;
  auto* verify = app.add_subcommand(
      "verify", "run a verification suite and write a JSON report");
  verify->add_option("suite", vopt.suite,
                     "one of: prop11 lemma14 theorem0k khintchine lemma32 lemma42 prop48 "
                     "prop49 all")
      ->required();
  verify->add_option("--n", vopt.n, "index count / generator count / factor count");
  verify->add_option("--k", vopt.k, "tensor degree");
  verify->add_option("--d", vopt.d, "coefficient matrix dimension");
  verify->add_option("--radius", vopt.radius, "word-length ball radius");
  verify->add_option("--depth", vopt.depth, "truncation depth");
  verify->add_option("--trials", vopt.trials, "number of random trials");
  verify->add_option("--seed", vopt.seed, "master seed (64-bit)");
  verify->add_option("--tol", vopt.tolerance, "violation tolerance on relative margins");
  verify->add_option("--mc-samples", vopt.mc_samples, "Monte-Carlo sample count");
  verify->add_option("--out", vopt.out_path, "report path (default <suite>_report.json)");
  verify->add_flag("--quick", vopt.quick, "reduced sizes for CI, same seeds");
  verify->add_flag("--timings", vopt.timings,
                   "include wall-clock runtime_ms in the JSON (breaks byte-reproducibility)");

  std::string norm_file, alpha_spec, norm_out;
  bool assemble = false;
  auto* norm = app.add_subcommand("norm", "compute matricization norms of a family file");
  norm->add_option("file", norm_file, "JSON family file")->required();
  norm->add_option("--alpha", alpha_spec,
                   "mask positions, e.g. '1,3'; '-' for the empty mask; omit for all masks");
  norm->add_flag("--assemble", assemble, "cross-check against the assembled tensor operator");
  norm->add_option("--out", norm_out, "write results as JSON");

  std::string target, converge_out;
  int conv_n = 1, depth_min = -1, depth_max = -1;
  auto* converge =
      app.add_subcommand("converge", "emit a CSV convergence table (depth,value,limit,gap)");
  converge->add_option("target", target, "cuntz or semicircular")->required();
  converge->add_option("--n", conv_n, "system size")->required();
  converge->add_option("--depth-min", depth_min, "first depth (default 4 / 2)");
  converge->add_option("--depth-max", depth_max, "last depth")->required();
  converge->add_option("--out", converge_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(vopt);
    if (norm->parsed()) return cmd_norm(norm_file, alpha_spec, assemble, norm_out);
    if (converge->parsed()) {
      if (depth_min < 0) depth_min = (target == "cuntz") ? 4 : 2;
      return cmd_converge(target, conv_n, depth_min, depth_max, converge_out);
    }
  } catch (const opalg::SizeLimitError& e) {
    std::fprintf(stderr, "size guard: %s (requested %zu, limit %zu)\n", e.what(), e.requested(),
                 e.limit());
    return kSizeGuard;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kUsage;
}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "perturbatrix/io.hpp"
#include "perturbatrix/parallel.hpp"

namespace fs = std::filesystem;
using namespace perturbatrix;

namespace {

enum Exit { kOk = 0, kUsage = 1, kHypothesis = 2, kNumeric = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotUnitVector:
      return kUsage;
    case ErrorKind::NotHermitian:
    case ErrorKind::NotSectorial:
    case ErrorKind::NotPSD:
    case ErrorKind::NotInCone:
    case ErrorKind::HypothesisViolated:
    case ErrorKind::HypothesisUnverifiable:
    case ErrorKind::OutOfSector:
      return kHypothesis;
    default:
      return kNumeric;
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

// Writes outputs either to stdout (no directory) or into a directory with a manifest.
class Sink {
 public:
  explicit Sink(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  void put(const std::string& name, const std::string& content, bool primary) {
    if (dir_.empty()) {
      if (primary) std::cout << content;
      return;
    }
    const fs::path path = fs::path(dir_) / name;
    std::ofstream(path, std::ios::binary) << content;
    manifest_.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }

  void finish(const std::string& command, const std::string& input) {
    if (dir_.empty()) return;
    const Json m = {{"command", command}, {"input", input}, {"outputs", manifest_}};
    std::ofstream(fs::path(dir_) / "manifest.json", std::ios::binary) << dump_json(m);
  }

 private:
  std::string dir_;
  Json manifest_ = Json::array();
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "not a number list: " + text);
    }
  }
  return out;
}

ProblemAnalysis analyze_or_abort(const ProblemSpec& spec, bool force) {
  ProblemAnalysis an = analyze_problem(spec.problem);
  if (!an.hypotheses_hold() && !force) {
    std::string names;
    for (const HypothesisCheck& h : an.hypotheses)
      if (!h.pass) names += (names.empty() ? "" : ", ") + h.name;
    fail(ErrorKind::HypothesisViolated, "failed hypotheses: " + names + " (use --force to proceed)");
  }
  return an;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral curves of A + gamma B for Hermitian A and sectorial B"};
  app.require_subcommand(1);
  std::string spec_path, out_dir;
  bool force = false;

  auto* check = app.add_subcommand("check", "Hypothesis report");
  check->add_option("spec", spec_path, "problem spec (JSON)")->required();
  check->add_option("--out-dir", out_dir, "write report.json and manifest.json here");

  std::string theta_text;
  double t_max = 0.0;
  auto* trace = app.add_subcommand("trace", "Trace spectral curves along rays");
  trace->add_option("spec", spec_path, "problem spec (JSON)")->required();
  trace->add_option("--theta", theta_text, "ray angles in degrees, comma separated");
  trace->add_option("--tmax", t_max, "largest |gamma| (default: classification horizon)");
  trace->add_option("--out-dir", out_dir, "write trace.csv and manifest.json here");
  trace->add_flag("--force", force, "trace even if hypotheses fail");

  int theta_grid = 0;
  double resolution = 0.0;
  auto* mono = app.add_subcommand("monodromy", "Permutation table and exceptional angles");
  mono->add_option("spec", spec_path, "problem spec (JSON)")->required();
  mono->add_option("--theta-grid", theta_grid, "number of equal pieces of the coupling sector");
  mono->add_option("--resolution", resolution, "bracket width in degrees");
  mono->add_option("--out-dir", out_dir, "write monodromy.json, table.csv and manifest.json here");
  mono->add_flag("--force", force, "run even if hypotheses fail");

  std::string grid_text;
  auto* limit = app.add_subcommand("limit", "mu_N grid and forbidden region for a density family");
  limit->add_option("spec", spec_path, "family spec (JSON)")->required();
  limit->add_option("--grid", grid_text, "x0,x1,y0,y1,nx,ny in the gamma plane");
  limit->add_option("--out-dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const int threads = default_thread_count();
  try {
    Sink sink(out_dir);
    if (*check) {
      const ProblemSpec spec = load_problem_spec(spec_path);
      const CheckOutcome res = run_check(spec);
      sink.put("report.json", dump_json(res.report), true);
      sink.finish("check", spec_path);
      if (!res.failures.empty()) {
        for (const std::string& f : res.failures) std::cerr << "hypothesis failed: " << f << "\n";
        return kHypothesis;
      }
      return kOk;
    }
    if (*trace) {
      const ProblemSpec spec = load_problem_spec(spec_path);
      const ProblemAnalysis an = analyze_or_abort(spec, force);
      const std::vector<double> thetas = theta_text.empty() ? spec.run.theta_deg : parse_list(theta_text);
      if (thetas.empty()) fail(ErrorKind::InvalidArgument, "no ray angle given (--theta or run.theta_deg)");
      const TraceOutcome res = run_trace(an, thetas, t_max > 0.0 ? t_max : spec.run.t_max, force);
      sink.put("trace.csv", res.csv, true);
      sink.finish("trace", spec_path);
      for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
      return kOk;
    }
    if (*mono) {
      const ProblemSpec spec = load_problem_spec(spec_path);
      const ProblemAnalysis an = analyze_or_abort(spec, force);
      const MonodromyOutcome res = run_monodromy(an, theta_grid > 0 ? theta_grid : spec.run.theta_grid,
                                                 resolution > 0.0 ? resolution : spec.run.resolution_deg, threads, force);
      Json report = {{"name", spec.name}};
      for (auto it = res.report.begin(); it != res.report.end(); ++it) report[it.key()] = it.value();
      sink.put("monodromy.json", dump_json(report), true);
      sink.put("table.csv", res.csv, false);
      sink.finish("monodromy", spec_path);
      return kOk;
    }
    if (*limit) {
      FamilySpec spec = load_family_spec(spec_path);
      if (!grid_text.empty()) {
        const std::vector<double> g = parse_list(grid_text);
        if (g.size() != 6) fail(ErrorKind::ParseError, "--grid expects x0,x1,y0,y1,nx,ny");
        spec.grid.x0 = g[0];
        spec.grid.x1 = g[1];
        spec.grid.y0 = g[2];
        spec.grid.y1 = g[3];
        spec.grid.nx = static_cast<int>(g[4]);
        spec.grid.ny = static_cast<int>(g[5]);
        if (!(spec.grid.y0 > 0.0)) fail(ErrorKind::ParseError, "--grid: the box must lie in the upper half-plane");
      }
      const LimitOutcome res = run_limit(spec, threads);
      sink.put("mu_grid.csv", res.mu_csv, false);
      sink.put("forbidden.json", dump_json(res.region), false);
      sink.finish("limit", spec_path);
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}

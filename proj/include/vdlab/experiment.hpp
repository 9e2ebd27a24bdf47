#pragma once

// Declarative experiment files and the runner behind the command-line tool.
//
// File format: line-oriented `key = value` pairs grouped under `[section]`
// headers, `#` starts a comment, expressions are written in double quotes.
//
//   name = "fmt-line"
//   kind = fmt
//   [curve]
//   components = "(1, z)"        # or: affine = "(z, exp(z))"
//   [divisor]
//   q = "w1"
//   [grid]
//   min = 2
//   max = 128
//   points = 13

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vdlab/connection.hpp"
#include "vdlab/jacobian.hpp"
#include "vdlab/nevanlinna.hpp"

namespace vdlab {

enum class Kind {
  Fmt,
  Jensen,
  Thm24,
  Thm25,
  SmtIdentity,
  SmtInequality,
  Ramification,
  FirstIntegral,
  Autoparallel,
  SiuResidual,
  Diagnostic
};

const std::vector<std::string>& kind_names();
std::optional<Kind> kind_from_name(const std::string& name);
std::string kind_name(Kind k);

struct ConfigDiagnostic {
  int line = 0;    // 1-based, 0 when not tied to a line
  int column = 0;  // 1-based
  std::string message;
  std::string to_string() const;
};

// Thrown by parse_config with every diagnostic found in the file.
class ConfigErrorList : public ConfigError {
 public:
  ConfigErrorList(std::string source, std::vector<ConfigDiagnostic> diagnostics);
  const std::vector<ConfigDiagnostic>& diagnostics() const noexcept { return diagnostics_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::vector<ConfigDiagnostic> diagnostics_;
};

struct Tolerances {
  double quadrature = 1e-8;
  std::optional<double> flatness;  // kind-specific default when absent
  double jensen = 1e-8;
  double g_slack = 1e-9;
  double zero_match = 1e-9;
  double wronskian = 1e-12;
  double exceptional_fraction = 0.05;
  double delta = 1.0;
};

struct Expectations {
  std::optional<double> residual;         // fmt: value the residual must equal
  std::optional<ZeroList> zeros;          // thm24 / ramification
  std::optional<bool> autoparallel;       // autoparallel / siu-residual
  std::optional<bool> contained;          // siu-residual membership verdict
  std::optional<cplx> wronskian;          // autoparallel: value at every sample
  std::optional<double> max_deviation;    // first-integral
  std::optional<double> min_deviation;    // first-integral control
  std::optional<double> max_ratio;        // diagnostic / siu-residual / smt-inequality
  std::optional<bool> effective;          // thm24 / ramification
  std::optional<MultiIndex> lambda;       // fields selected from a probe
};

struct ExperimentConfig {
  std::string name;
  std::string source;
  Kind kind = Kind::Fmt;
  unsigned long long seed = 20240601ULL;

  std::optional<ProjectiveCurve> curve;
  std::optional<Divisor> divisor;
  std::vector<MeromorphicVectorField> fields;
  std::optional<PoleSection> pole;
  std::optional<cplx> probe;
  std::optional<MeromorphicConnection> connection;
  std::optional<Expression> jensen_g;
  double jensen_s = 1.0;
  std::optional<Expression> first_integral;
  std::vector<cplx> samples;
  std::optional<Expression> kappa;  // absent with kappa_from_curve: use the curve's density
  bool kappa_from_curve = false;
  int sample_count = 1000;
  double sample_radius = 4.0;

  std::vector<double> grid;
  Tolerances tol;
  Expectations expect;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ExperimentConfig parse_config(const std::filesystem::path& path);

// "(a, b, c)" split at top-level commas.
std::vector<std::string> split_tuple(const std::string& text);

enum class Status { Pass, Fail, Inconclusive };
std::string status_name(Status s);

struct ExperimentReport {
  std::string name;
  Kind kind = Kind::Fmt;
  Status status = Status::Fail;
  unsigned long long seed = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> log;      // perturbed radii and skipped nodes
  std::vector<std::string> details;  // kind-specific findings
  std::optional<double> max, min, spread;
  std::string error;
  std::string summary() const;
};

struct RunOptions {
  std::filesystem::path out_dir = "vdlab-out";
  std::optional<unsigned long long> seed;
  int jobs = 1;
  Exec exec = Exec::Parallel;
};

// Never throws for module errors: they become a failing report.
ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                const RunOptions& options = {});

std::vector<ExperimentReport> run_batch(const std::vector<ExperimentConfig>& configs, const RunOptions& options);

}  // namespace vdlab

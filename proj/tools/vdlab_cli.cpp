#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "vdlab/experiment.hpp"

namespace fs = std::filesystem;

#ifndef VDLAB_CONFIG_DIR
#define VDLAB_CONFIG_DIR "configs"
#endif

namespace {

fs::path suite_dir(const std::string& suite) {
  const char* env = std::getenv("VDLAB_CONFIGS");
  const fs::path root = env ? fs::path(env) : fs::path(VDLAB_CONFIG_DIR);
  return root / suite;
}

std::vector<fs::path> suite_files(const std::string& suite) {
  const fs::path dir = suite_dir(suite);
  if (!fs::is_directory(dir)) throw vdlab::ConfigError("suite directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

// Parses every file, printing all diagnostics; returns false if any failed.
bool load(const std::vector<fs::path>& paths, std::vector<vdlab::ExperimentConfig>& out) {
  bool ok = true;
  for (const auto& p : paths) {
    try {
      out.push_back(vdlab::parse_config(p));
    } catch (const vdlab::ConfigError& e) {
      std::cerr << e.what() << '\n';
      ok = false;
    }
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vdlab: numerical experiments on holomorphic curves in projective space"};
  app.require_subcommand(1);

  std::vector<std::string> run_files;
  std::string out_dir = "vdlab-out";
  std::string suite;
  unsigned long long seed = 0;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run experiment configs");
  run->add_option("configs", run_files, "config files");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--suite", suite, "run a shipped suite (acceptance)");
  auto* seed_opt = run->add_option("--seed", seed, "override the sampling seed");
  run->add_option("--jobs", jobs, "experiments run concurrently")->check(CLI::PositiveNumber);

  std::vector<std::string> check_files;
  auto* check = app.add_subcommand("check", "validate configs without running them");
  check->add_option("configs", check_files, "config files")->required();

  auto* list = app.add_subcommand("list-kinds", "print the experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*list) {
    for (const auto& k : vdlab::kind_names()) std::cout << k << '\n';
    return 0;
  }

  if (*check) {
    std::vector<vdlab::ExperimentConfig> configs;
    std::vector<fs::path> paths(check_files.begin(), check_files.end());
    if (!load(paths, configs)) return 2;
    for (const auto& c : configs) std::cout << "ok " << c.name << " (" << vdlab::kind_name(c.kind) << ")\n";
    return 0;
  }

  std::vector<fs::path> paths(run_files.begin(), run_files.end());
  try {
    if (!suite.empty()) {
      const auto more = suite_files(suite);
      paths.insert(paths.end(), more.begin(), more.end());
    }
  } catch (const vdlab::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (paths.empty()) {
    std::cerr << "run: no config files given\n";
    return 2;
  }
  std::vector<vdlab::ExperimentConfig> configs;
  if (!load(paths, configs)) return 2;

  vdlab::RunOptions opts;
  opts.out_dir = out_dir;
  opts.jobs = jobs;
  if (*seed_opt) opts.seed = seed;
  std::vector<vdlab::ExperimentReport> reports;
  try {
    fs::create_directories(opts.out_dir);
    reports = vdlab::run_batch(configs, opts);
  } catch (const vdlab::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << '\n';
    return 1;
  }
  bool all = true;
  for (const auto& r : reports) {
    std::cout << vdlab::status_name(r.status) << ' ' << r.name << " (" << vdlab::kind_name(r.kind) << ")";
    if (!r.error.empty()) std::cout << ": " << r.error;
    std::cout << '\n';
    all = all && r.status == vdlab::Status::Pass;
  }
  std::cout << "reports in " << opts.out_dir.string() << '\n';
  return all ? 0 : 1;
}

// Copyright 2026 The asymdigest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// -----------------------------------------------------------------------------
// File: cli.hpp
// -----------------------------------------------------------------------------
//
// The asymdigest command line, kept in a header so tests can drive it
// in-process with their own streams.
//
//   asymdigest bench          run an accuracy experiment, write CSV + JSON
//   asymdigest check-decency  grid-check a scale descriptor
//   asymdigest quantile       digest numbers from a file or stdin
//   asymdigest plot           render a bench CSV as SVG box plots
//
// Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asymdigest/asymdigest.hpp"

namespace asymdigest::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

inline constexpr const char* kSeedVariable = "ASYMDIGEST_SEED";

struct BenchFlags {
  std::string scale = "k2:glued@0.5";
  double delta = 100.0;
  std::size_t samples = 100000;
  std::size_t trials = 20;
  std::string dist = "uniform";
  double rate = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 42;
  std::vector<double> probes = default_probe_quantiles();
  std::string out = "report.csv,report.json";
  std::string trials_out;
  std::size_t threads = 0;
};

struct DecencyFlags {
  std::string scale;
  double delta = 100.0;
  std::size_t alphas = 99;
  std::size_t qs = 999;
  double tolerance = 1e-9;
  bool no_validate = false;
};

struct QuantileFlags {
  std::string scale = "k2";
  double delta = 100.0;
  std::vector<double> probes = {0.5, 0.9, 0.99, 0.999};
  std::string input = "-";
  bool validate = false;
};

struct PlotFlags {
  std::string input;
  std::string output;
  std::string trials;
  std::string panel = "both";
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string trials_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  return (p.parent_path() / (p.stem().string() + "_trials.csv")).string();
}

}  // namespace detail

inline int cmd_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  config.scale_descriptor = flags.scale;
  config.compression = flags.delta;
  config.samples_per_trial = flags.samples;
  config.trials = flags.trials;
  config.probe_quantiles = flags.probes;
  config.base_seed = flags.seed;
  config.threads = flags.threads;
  if (flags.dist == "exponential") {
    config.distribution = Distribution::exponential(flags.rate);
  } else if (flags.dist == "lognormal") {
    config.distribution = Distribution::lognormal(flags.mu, flags.sigma);
  }

  if (const char* env = std::getenv(kSeedVariable); env && *env) {
    const std::string text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), config.base_seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      err << kSeedVariable << " is not an unsigned integer: '" << text << "'\n";
      return kUsage;
    }
  }

  const auto outputs = detail::split_list(flags.out);
  if (outputs.empty() || outputs.size() > 2 || outputs[0].empty() ||
      (outputs.size() == 2 && outputs[1].empty())) {
    err << "--out expects CSV[,JSON]\n";
    return kUsage;
  }
  try {
    validate(config);
    parse_scale(config.scale_descriptor, config.compression);
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kUsage;
  }

  const AggregateReport report = run_experiment(config);

  const std::string trials_path =
      flags.trials_out.empty() ? detail::trials_path_for(outputs[0]) : flags.trials_out;
  {
    std::ofstream csv(outputs[0]);
    write_quantile_csv(csv, report);
    std::ofstream trials(trials_path);
    write_trials_csv(trials, report);
    if (!csv || !trials) {
      err << "cannot write " << outputs[0] << " or " << trials_path << '\n';
      return kFailure;
    }
  }
  if (outputs.size() == 2) {
    std::ofstream json(outputs[1]);
    json << to_json(report).dump(2) << '\n';
    if (!json) {
      err << "cannot write " << outputs[1] << '\n';
      return kFailure;
    }
  }
  out << "scale " << config.scale_descriptor << ", delta " << config.compression << ", "
      << config.trials << " trials x " << config.samples_per_trial << " samples\n";
  out << "mean centroid count " << report.mean_centroid_count() << '\n';
  out << "wrote " << outputs[0] << ", " << trials_path;
  if (outputs.size() == 2) out << ", " << outputs[1];
  out << '\n';
  return kOk;
}

inline int cmd_check_decency(const DecencyFlags& flags, std::ostream& out, std::ostream& err) {
  ScaleSpec spec = ScaleSpec::k0(flags.delta);
  try {
    spec = parse_scale(flags.scale, flags.delta, !flags.no_validate);
  } catch (const std::invalid_argument& e) {
    err << "cannot parse scale: " << e.what() << '\n';
    return kUsage;
  }
  DecencyOptions options;
  options.alpha_count = flags.alphas;
  options.q_count = flags.qs;
  options.tolerance = flags.tolerance;
  const DecencyReport report = check_decency(spec, options);
  if (report.passed()) {
    out << "PASS " << spec.descriptor() << " (alphas=" << flags.alphas << ", qs=" << flags.qs
        << ", tolerance=" << asymdigest::detail::format_number(flags.tolerance) << ")\n";
    return kOk;
  }
  out << "FAIL " << spec.descriptor() << ": " << report.violations.size() << " violations\n";
  for (const Violation& v : report.violations) {
    out << "alpha=" << asymdigest::detail::format_number(v.alpha)
        << " q=" << asymdigest::detail::format_number(v.q) << " branch=" << to_string(v.branch)
        << " magnitude=" << asymdigest::detail::format_number(v.magnitude) << '\n';
  }
  return kFailure;
}

inline int cmd_quantile(const QuantileFlags& flags, std::istream& in, std::ostream& out,
                        std::ostream& err) {
  ScaleSpec spec = ScaleSpec::k0(flags.delta);
  try {
    spec = parse_scale(flags.scale, flags.delta);
  } catch (const std::invalid_argument& e) {
    err << "cannot parse scale: " << e.what() << '\n';
    return kUsage;
  }

  std::ifstream file;
  std::istream* source = &in;
  if (flags.input != "-") {
    file.open(flags.input);
    if (!file) {
      err << "cannot open " << flags.input << '\n';
      return kFailure;
    }
    source = &file;
  }

  Digest digest(flags.delta, spec);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(*source, line)) {
    ++line_number;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string_view cell(line.data() + b, e - b + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
      err << "line " << line_number << ": not a number: '" << cell << "'\n";
      return kFailure;
    }
    digest.add(value);
  }
  if (digest.empty()) {
    err << "no input values\n";
    return kFailure;
  }
  digest.compress();

  for (double q : flags.probes) {
    out << asymdigest::detail::format_number(q) << '\t'
        << asymdigest::detail::format_number(digest.quantile(q)) << '\n';
  }
  if (flags.validate) {
    const auto bad = digest.validate_ksize();
    if (!bad.empty()) {
      err << bad.size() << " clusters exceed k-size 1:";
      for (auto i : bad) err << ' ' << i;
      err << '\n';
      return kFailure;
    }
  }
  return kOk;
}

inline int cmd_plot(const PlotFlags& flags, std::ostream& out, std::ostream& err) {
  PlotPanels panels = PlotPanels::Both;
  if (flags.panel == "err") panels = PlotPanels::Error;
  if (flags.panel == "nerr") panels = PlotPanels::NormalizedError;

  std::vector<QuantileStats> rows;
  std::vector<std::size_t> counts;
  std::string reading = flags.input;
  try {
    std::ifstream csv(flags.input);
    if (!csv) {
      err << "cannot open " << flags.input << '\n';
      return kFailure;
    }
    rows = read_quantile_csv(csv);
    if (!flags.trials.empty()) {
      reading = flags.trials;
      std::ifstream trials(flags.trials);
      if (!trials) {
        err << "cannot open " << flags.trials << '\n';
        return kFailure;
      }
      counts = read_trials_csv(trials);
    }
  } catch (const csv_error& e) {
    err << reading << ": " << e.what() << '\n';
    return kFailure;
  }

  const std::string svg = render_svg(rows, flags.trials.empty() ? nullptr : &counts, panels);
  std::ofstream file(flags.output, std::ios::binary);
  file << svg;
  if (!file) {
    err << "cannot write " << flags.output << '\n';
    return kFailure;
  }
  out << "wrote " << flags.output << '\n';
  return kOk;
}

/// Parses `args` (without the program name) and runs the chosen subcommand.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"t-digest toolkit with asymmetric scale functions", "asymdigest"};
  app.require_subcommand(1);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a seeded accuracy experiment");
  bench_cmd->add_option("--scale", bench.scale, "Scale descriptor")->capture_default_str();
  bench_cmd->add_option("--delta", bench.delta, "Compression parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--samples", bench.samples, "Samples per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials, "Number of trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--dist", bench.dist, "Sample distribution")
      ->check(CLI::IsMember({"uniform", "exponential", "lognormal"}))
      ->capture_default_str();
  bench_cmd->add_option("--rate", bench.rate, "Exponential rate")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--mu", bench.mu, "Log-normal mu");
  bench_cmd->add_option("--sigma", bench.sigma, "Log-normal sigma")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Base seed (ASYMDIGEST_SEED overrides)")
      ->capture_default_str();
  bench_cmd->add_option("--probes", bench.probes, "Probe quantiles")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--out", bench.out, "Output CSV[,JSON]")->capture_default_str();
  bench_cmd->add_option("--trials-out", bench.trials_out,
                        "Per-trial centroid count CSV (default <csv>_trials.csv)");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");

  DecencyFlags decency;
  auto* decency_cmd = app.add_subcommand("check-decency", "Grid-check a scale function");
  decency_cmd->add_option("--scale", decency.scale, "Scale descriptor")->required();
  decency_cmd->add_option("--delta", decency.delta, "Compression parameter")
      ->check(CLI::PositiveNumber);
  decency_cmd->add_option("--alphas", decency.alphas, "Number of alpha grid points")
      ->check(CLI::PositiveNumber);
  decency_cmd->add_option("--qs", decency.qs, "Number of q grid points")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  decency_cmd->add_option("--tolerance", decency.tolerance, "Absolute slack")
      ->check(CLI::NonNegativeNumber);
  decency_cmd->add_flag("--no-validate", decency.no_validate,
                        "Allow polynomials below the decency threshold");

  QuantileFlags quantile;
  auto* quantile_cmd = app.add_subcommand("quantile", "Digest a stream and print quantiles");
  quantile_cmd->add_option("--scale", quantile.scale, "Scale descriptor")->capture_default_str();
  quantile_cmd->add_option("--delta", quantile.delta, "Compression parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  quantile_cmd->add_option("--probes", quantile.probes, "Quantiles to report")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  quantile_cmd->add_option("--input", quantile.input, "Input file, '-' for stdin")
      ->capture_default_str();
  quantile_cmd->add_flag("--validate", quantile.validate, "Fail if any cluster exceeds k-size 1");

  PlotFlags plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a bench CSV as SVG");
  plot_cmd->add_option("--input", plot.input, "Per-quantile report CSV")->required();
  plot_cmd->add_option("--output", plot.output, "SVG output path")->required();
  plot_cmd->add_option("--trials", plot.trials, "Per-trial centroid count CSV");
  plot_cmd->add_option("--panel", plot.panel, "Panels to draw")
      ->check(CLI::IsMember({"err", "nerr", "both"}))
      ->capture_default_str();

  std::vector<const char*> argv{"asymdigest"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (bench_cmd->parsed()) return cmd_bench(bench, out, err);
    if (decency_cmd->parsed()) return cmd_check_decency(decency, out, err);
    if (quantile_cmd->parsed()) return cmd_quantile(quantile, in, out, err);
    if (plot_cmd->parsed()) return cmd_plot(plot, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace asymdigest::cli

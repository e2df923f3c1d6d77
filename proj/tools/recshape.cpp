// recshape: analyze / synthesize / sample / roundtrip for real linear
// recurrences and their value-set closures, over JSON wire formats.
//
// Exit codes: 0 success, 1 domain error (non-convergence, failed fit,
// failed roundtrip), 2 usage error (bad flags, malformed JSON).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "recshape/errors.hpp"
#include "recshape/json_io.hpp"
#include "recshape/synthesis.hpp"

namespace {

using namespace recshape;

std::string load_input(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    return arg;  // inline JSON
  }
  std::ifstream in(arg);
  if (!in) throw JsonParseError("cannot open input file: " + arg);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text << "\n";
}

int env_threads() {
  const char* v = std::getenv("RECSHAPE_THREADS");
  if (!v) return 1;
  int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

struct CommonOpts {
  std::string input;
  std::string output;
  std::int64_t n = 1'000'000;
  std::int64_t burn_in = 256;
  double gap_eps = 0.01;
  int min_run = 32;
  double trig_tol = 1e-6;
  double fit_tol = 1e-9;
};

ClosureConfig make_closure_config(const CommonOpts& opts, bool empirical_only) {
  ClosureConfig cfg;
  cfg.trig.tol = opts.trig_tol;
  cfg.empirical.sample_count = opts.n;
  cfg.empirical.burn_in = opts.burn_in;
  cfg.empirical.gap_eps = opts.gap_eps;
  cfg.empirical.min_run = opts.min_run;
  cfg.empirical.threads = env_threads();
  cfg.force_empirical = empirical_only;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value-set closures of real linear recurrences"};
  app.require_subcommand(1);

  CommonOpts opts;
  bool empirical_only = false;
  bool dump_spectral_flag = false;
  std::uint64_t seed = 42;
  int random_count = 0;
  double hausdorff_tol = 0.05;
  bool no_reduce = false;

  auto add_common = [&](CLI::App* cmd, bool with_input = true) {
    if (with_input) {
      cmd->add_option("input", opts.input, "input file path or inline JSON")
          ->required();
    }
    cmd->add_option("-o,--output", opts.output, "write output here instead of stdout");
    cmd->add_option("-n,--n", opts.n, "sample count N");
    cmd->add_option("--burn-in", opts.burn_in, "indices below this are transient");
    cmd->add_option("--gap-eps", opts.gap_eps, "gap that separates empirical runs");
    cmd->add_option("--min-run", opts.min_run, "samples needed to call a run an interval");
    cmd->add_option("--trig-tol", opts.trig_tol, "certification tolerance for the torus range");
    cmd->add_option("--fit-tol", opts.fit_tol, "tolerance for minimal-recurrence fitting");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "closure report for a recurrence");
  add_common(analyze);
  analyze->add_flag("--empirical-only", empirical_only, "force the sampling oracle");
  analyze->add_flag("--dump-spectral", dump_spectral_flag,
                    "append the root/dominance summary");

  CLI::App* synthesize_cmd =
      app.add_subcommand("synthesize", "recurrence realizing a target interval union");
  add_common(synthesize_cmd);
  synthesize_cmd->add_flag("--no-reduce", no_reduce, "skip minimal-order reduction");

  CLI::App* sample_cmd = app.add_subcommand("sample", "print a_0..a_{N-1}");
  add_common(sample_cmd);

  CLI::App* roundtrip_cmd = app.add_subcommand(
      "roundtrip", "synthesize from targets, then compare the empirical closure");
  roundtrip_cmd->add_option("input", opts.input, "targets file path or inline JSON");
  roundtrip_cmd->add_option("--random", random_count,
                            "run this many seeded random target collections instead");
  roundtrip_cmd->add_option("--seed", seed, "seed for --random fixtures");
  roundtrip_cmd->add_option("--hausdorff-tol", hausdorff_tol, "pass threshold");
  roundtrip_cmd->add_option("-o,--output", opts.output, "write output here instead of stdout");
  roundtrip_cmd->add_option("-n,--n", opts.n, "sample count N");
  roundtrip_cmd->add_option("--burn-in", opts.burn_in, "indices below this are transient");
  roundtrip_cmd->add_option("--gap-eps", opts.gap_eps, "gap that separates empirical runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analyze->parsed()) {
      LinearRecurrence rec = parse_recurrence(load_input(opts.input));
      ClosureConfig cfg = make_closure_config(opts, empirical_only);
      ClosureReport report = closure_of(rec, cfg);
      std::string out = dump_report(report);
      if (dump_spectral_flag) {
        Decomposition dec = decompose(rec, cfg.spectral);
        out.pop_back();
        out += ", \"spectral\": " + dump_spectral(dec) + "}";
      }
      write_output(opts.output, out);
    } else if (synthesize_cmd->parsed()) {
      TargetIntervals targets = parse_targets(load_input(opts.input));
      SynthesisConfig cfg;
      cfg.build.reduce = !no_reduce;
      cfg.build.reduce_tol = opts.fit_tol;
      cfg.empirical.sample_count = opts.n;
      cfg.empirical.burn_in = opts.burn_in;
      cfg.empirical.gap_eps = opts.gap_eps;
      cfg.empirical.min_run = opts.min_run;
      cfg.empirical.threads = env_threads();
      write_output(opts.output, dump_synthesis(synthesize(targets, cfg)));
    } else if (sample_cmd->parsed()) {
      LinearRecurrence rec = parse_recurrence(load_input(opts.input));
      std::vector<double> values = sample_prefix(rec, opts.n);
      std::string out;
      for (double v : values) {
        out += format_double(v);
        out += '\n';
      }
      if (!out.empty()) out.pop_back();
      write_output(opts.output, out);
    } else if (roundtrip_cmd->parsed()) {
      std::vector<TargetIntervals> fixtures;
      if (random_count > 0) {
        for (int i = 0; i < random_count; ++i) {
          fixtures.push_back(random_targets(seed + static_cast<std::uint64_t>(i)));
        }
      } else if (!opts.input.empty()) {
        fixtures.push_back(parse_targets(load_input(opts.input)));
      } else {
        std::cerr << "roundtrip: need a targets input or --random COUNT\n";
        return 2;
      }
      SynthesisConfig cfg;
      cfg.empirical.sample_count = opts.n;
      cfg.empirical.burn_in = opts.burn_in;
      cfg.empirical.gap_eps = opts.gap_eps;
      cfg.empirical.threads = env_threads();
      std::string out;
      bool all_pass = true;
      for (std::size_t i = 0; i < fixtures.size(); ++i) {
        SynthesisResult result = synthesize(fixtures[i], cfg);
        bool pass = result.hausdorff <= hausdorff_tol;
        all_pass = all_pass && pass;
        out += pass ? "PASS" : "FAIL";
        out += " targets=" + dump_targets(fixtures[i]);
        out += " hausdorff=" + format_double(result.hausdorff);
        out += '\n';
      }
      if (!out.empty()) out.pop_back();
      write_output(opts.output, out);
      if (!all_pass) return 1;
    }
  } catch (const JsonParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

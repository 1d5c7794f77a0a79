// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point. Subcommands: sweep, heatmap, patterns, validate,
// dump-config. Precedence: command-line overrides beat config-file values
// beat built-in defaults.
// Exit codes: 0 ok, 2 config error, 3 solver failure budget exceeded,
// 4 validate failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "risleak/harness.hpp"

namespace {

using namespace risleak;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Scenario config file (key = value lines)");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seed", args.seed, "Master seed override");
  cmd->add_option("--trials", args.trials, "Monte Carlo trials override");
  cmd->add_option("--jobs", args.jobs, "Worker threads (1 = serial reference path)");
  cmd->add_option("overrides", args.overrides, "key=value config overrides");
}

ScenarioConfig resolve_config(const CommonArgs& args) {
  ScenarioConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  for (const std::string& ov : args.overrides) apply_override(cfg, ov);
  if (args.seed) cfg.seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  cfg.finalize();
  return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  std::filesystem::create_directories(args.out_dir);
  return (std::filesystem::path(args.out_dir) / name).string();
}

// Roughly 10% of trials failing means the solver is not holding up; callers
// treat that as a hard error (exit 3).
bool failure_budget_exceeded(const SweepResult& result) {
  for (const auto& rec : result.aggregates)
    if (rec.failures * 10 > (rec.trials + rec.failures)) return true;
  return false;
}

std::vector<int> parse_counts(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --faulty list entry '" + item + "'");
    }
  }
  return out;
}

int cmd_sweep(const CommonArgs& args, const std::string& fault_list,
              const std::string& pattern_name) {
  ScenarioConfig cfg = resolve_config(args);
  SweepSpec spec;
  if (!fault_list.empty()) spec.fault_counts = parse_counts(fault_list);
  spec.trials = cfg.trials;
  spec.pattern = parse_fault_pattern(pattern_name);
  SweepResult result = run_sweep(cfg, spec, args.jobs);
  const std::string sweep_csv = out_path(args, "sweep.csv");
  const std::string trials_csv = out_path(args, "sweep_trials.csv");
  write_sweep_csv(sweep_csv, result.aggregates);
  write_trials_csv(trials_csv, result.trials);
  write_metadata(out_path(args, "metadata.json"), cfg, "sweep", args.jobs,
                 {sweep_csv, trials_csv});
  std::cout << "sweep: " << result.aggregates.size() << " aggregate rows -> " << sweep_csv
            << "\n";
  return failure_budget_exceeded(result) ? 3 : 0;
}

int cmd_patterns(const CommonArgs& args) {
  ScenarioConfig cfg = resolve_config(args);
  SweepResult result = run_pattern_study(cfg, cfg.trials, args.jobs);
  const std::string csv = out_path(args, "patterns.csv");
  const std::string trials_csv = out_path(args, "patterns_trials.csv");
  write_sweep_csv(csv, result.aggregates, /*pattern_keyed=*/true);
  write_trials_csv(trials_csv, result.trials);
  write_metadata(out_path(args, "metadata.json"), cfg, "patterns", args.jobs, {csv, trials_csv});
  std::cout << "patterns: " << result.aggregates.size() << " aggregate rows -> " << csv << "\n";
  return failure_budget_exceeded(result) ? 3 : 0;
}

int cmd_heatmap(const CommonArgs& args, const std::string& method_name, int faulty,
                int grid_n, const std::string& pattern_name, int average) {
  ScenarioConfig cfg = resolve_config(args);
  const Method method = parse_method(method_name);
  GridSpec grid;
  grid.nx = grid.ny = grid_n;
  HeatmapResult result = run_heatmap(cfg, method, faulty, grid,
                                     parse_fault_pattern(pattern_name), args.jobs > 1, average);
  const std::string map_csv = out_path(args, "heatmap.csv");
  const std::string mask_csv = out_path(args, "fault_mask.csv");
  write_heatmap_csv(map_csv, result.map);
  write_mask_csv(mask_csv, result.mask);
  write_metadata(out_path(args, "metadata.json"), cfg, "heatmap", args.jobs,
                 {map_csv, mask_csv});
  std::cout << "heatmap: method " << to_string(method) << ", B=" << faulty << ", snr "
            << linear_to_db(result.diag.snr) << " dB, slnr " << linear_to_db(result.diag.slnr)
            << " dB -> " << map_csv << "\n";
  return 0;
}

int cmd_dump_config(const CommonArgs& args) {
  ScenarioConfig cfg = resolve_config(args);
  std::cout << dump_config(cfg);
  return 0;
}

// Fast invariant suite: the algebraic identities the pipeline rests on.
int cmd_validate(const CommonArgs& args) {
  ScenarioConfig cfg = resolve_config(args);
  cfg.ris_nx = 4;
  cfg.ris_ny = 3;
  cfg.ap_antennas = 4;
  cfg.test_points = 6;
  cfg.finalize();
  const ArrayGeometry geom = build_geometry(cfg);
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    all_ok = all_ok && ok;
  };

  // Steering vectors are unit-modulus entrywise.
  {
    const VecC b = steering_vector(geom.ris_elements, Vec3(0, 1, 0), cfg.wavelength_m);
    bool ok = true;
    for (Eigen::Index i = 0; i < b.size(); ++i) ok = ok && std::abs(std::abs(b(i)) - 1.0) < 1e-12;
    report("steering unit modulus", ok);
  }

  // Lifting identity and rank-1 cascade factorization on random draws.
  {
    bool lift_ok = true, rank_ok = true;
    for (int rep = 0; rep < 10; ++rep) {
      rng::Stream tp(cfg.seed, rng::StreamTag::TestPoints, static_cast<std::uint64_t>(rep));
      const TestPointCloud cloud = sample_test_points(cfg, tp);
      const ChannelSet channels =
          build_channel_set(cfg, geom, cloud, cfg.seed, static_cast<std::uint64_t>(rep));
      rng::Stream fi(cfg.seed, rng::StreamTag::FaultIndices, static_cast<std::uint64_t>(rep));
      FaultRealization fault;
      fault.indices = sample_fault_indices(FaultPattern::Uniform, 3, cfg.ris_nx, cfg.ris_ny,
                                           cfg.pattern_padding, fi);
      rng::Stream fs(cfg.seed, rng::StreamTag::FaultStates, static_cast<std::uint64_t>(rep));
      fault.states = sample_fault_states(3, fs);
      const PartitionedChannels part = partition(channels, fault);

      rng::Stream rs(cfg.seed, rng::StreamTag::Generic, static_cast<std::uint64_t>(rep));
      VecC vhat(part.lifted_dim());
      for (Eigen::Index i = 0; i < vhat.size(); ++i)
        vhat(i) = std::exp(std::complex<double>(0, rs.uniform(0, 6.283185307)));
      vhat(vhat.size() - 1) = 1.0;
      for (int t = 0; t < static_cast<int>(part.pts.size()); ++t) {
        const double direct = (vhat.adjoint() * part.stacked(t)).squaredNorm();
        const double lifted = (vhat.adjoint() * part.lifted(t) * vhat)(0).real();
        if (std::abs(direct - lifted) > 1e-9 * std::max(1e-300, std::abs(direct)))
          lift_ok = false;
        const MatC& Hbar = channels.Hbar[static_cast<std::size_t>(t)];
        const VecC c = Hbar * channels.ap_steer / channels.ap_steer.squaredNorm();
        if ((Hbar - c * channels.ap_steer.adjoint()).norm() > 1e-10 * std::max(1e-300, Hbar.norm()))
          rank_ok = false;
      }
    }
    report("lifting identity", lift_ok);
    report("rank-1 cascade factorization", rank_ok);
  }

  // Jensen bound on a fixed configuration.
  {
    rng::Stream tp(cfg.seed, rng::StreamTag::TestPoints, 99);
    const TestPointCloud cloud = sample_test_points(cfg, tp);
    const ChannelSet channels = build_channel_set(cfg, geom, cloud, cfg.seed, 99);
    rng::Stream fi(cfg.seed, rng::StreamTag::FaultIndices, 99);
    const std::vector<int> idx = sample_fault_indices(FaultPattern::Uniform, 4, cfg.ris_nx,
                                                      cfg.ris_ny, cfg.pattern_padding, fi);
    const PartitionedChannels robust_part = partition_indices_only(channels, idx);
    VecC v_r = VecC::Ones(robust_part.n_functioning());
    const double bound =
        expected_slnr_lower_bound(v_r, robust_part, cfg.noise_power_w, cfg.tx_power_w);
    double mean = 0;
    const int redraws = 2000;
    for (int r = 0; r < redraws; ++r) {
      rng::Stream fs(cfg.seed, rng::StreamTag::FaultStates, 100 + static_cast<std::uint64_t>(r));
      FaultRealization fault;
      fault.indices = idx;
      fault.states = sample_fault_states(4, fs);
      mean += slnr(v_r, partition(channels, fault), cfg.noise_power_w, cfg.tx_power_w);
    }
    mean /= redraws;
    report("jensen lower bound", mean >= bound * 0.99);
  }

  // Solver sanity: known optima.
  {
    sdp::SdpProblem p;
    p.n = 2;
    p.mode = sdp::Mode::MaximizeObjective;
    p.C = MatC::Zero(2, 2);
    p.C(0, 1) = 1;
    p.C(1, 0) = 1;
    const sdp::SdpSolution sol = sdp::solve(p);
    report("solver 2x2 optimum",
           sol.status == sdp::Status::Optimal && std::abs(sol.objective - 2.0) < 1e-4);

    sdp::SdpProblem pr;
    pr.n = 6;
    pr.mode = sdp::Mode::MaximizeObjective;
    rng::Stream rs(7, rng::StreamTag::Generic, 1);
    VecC c(6);
    for (int i = 0; i < 6; ++i) c(i) = rs.cnormal();
    pr.C = c * c.adjoint();
    const sdp::SdpSolution sol2 = sdp::solve(pr);
    const double expect = std::pow(c.cwiseAbs().sum(), 2);
    report("solver rank-1 alignment", sol2.status == sdp::Status::Optimal &&
                                          std::abs(sol2.objective - expect) < 1e-4 * expect);
  }

  return all_ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS leakage mitigation simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string fault_list;
  std::string method_name = "max_slnr";
  std::string pattern_name = "uniform";
  int faulty = 10;
  int grid_n = 60;
  int average = 1;

  CLI::App* sweep = app.add_subcommand("sweep", "SLNR/SNR sweep over fault counts");
  add_common(sweep, args);
  sweep->add_option("--faulty", fault_list,
                    "Comma-separated fault counts (default 0,5,10,15,20,25)");
  sweep->add_option("--pattern", pattern_name, "uniform|quadrant|top_rows|left_columns");

  CLI::App* heatmap = app.add_subcommand("heatmap", "Received-power map for one method");
  add_common(heatmap, args);
  heatmap->add_option("--method", method_name, "baseline|naive|max_slnr|robust");
  heatmap->add_option("--faulty", faulty, "Number of faulty elements");
  heatmap->add_option("--grid", grid_n, "Cells per side of the map");
  heatmap->add_option("--pattern", pattern_name, "uniform|quadrant|top_rows|left_columns");
  heatmap->add_option("--average", average, "Average this many independent realizations");

  CLI::App* patterns = app.add_subcommand("patterns", "Pattern study at 25% faults");
  add_common(patterns, args);

  CLI::App* validate = app.add_subcommand("validate", "Fast invariant suite");
  add_common(validate, args);

  CLI::App* dump = app.add_subcommand("dump-config", "Print the resolved config");
  add_common(dump, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(args, fault_list, pattern_name);
    if (heatmap->parsed())
      return cmd_heatmap(args, method_name, faulty, grid_n, pattern_name, average);
    if (patterns->parsed()) return cmd_patterns(args);
    if (validate->parsed()) return cmd_validate(args);
    if (dump->parsed()) return cmd_dump_config(args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

// SPDX-License-Identifier: Apache-2.0

#include "risleak/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace risleak {

namespace {

std::string fmt_csv(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

void checksum_add(std::uint64_t& h, const double* data, std::size_t count) {
  h = fnv1a(data, count * sizeof(double), h);
}

std::uint64_t trial_checksum(const TestPointCloud& cloud, const ChannelSet& channels,
                             const FaultRealization& fault) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& p : cloud.positions) checksum_add(h, p.data(), 3);
  for (const auto& hv : channels.h)
    checksum_add(h, reinterpret_cast<const double*>(hv.data()), 2 * static_cast<std::size_t>(hv.size()));
  for (int idx : fault.indices) {
    const double d = idx;
    checksum_add(h, &d, 1);
  }
  checksum_add(h, reinterpret_cast<const double*>(fault.states.data()),
               2 * static_cast<std::size_t>(fault.states.size()));
  return h;
}

// Commanded phases of the functioning elements for a method that outputs the
// full N-element configuration (the baseline).
VecC restrict_to_functioning(const VecC& v_full, const PartitionedChannels& part) {
  VecC v(part.n_functioning());
  for (int r = 0; r < part.n_functioning(); ++r)
    v(r) = v_full(part.functioning[static_cast<std::size_t>(r)]);
  return v;
}

void realized_metrics(const VecC& v_r, const PartitionedChannels& part,
                      const ScenarioConfig& cfg, MethodTrial& out) {
  out.snr = snr(v_r, part, cfg.tx_power_w, cfg.noise_power_w);
  out.slnr = slnr(v_r, part, cfg.noise_power_w, cfg.tx_power_w);
  out.leakage = leakage(v_r, part);
}

struct TrialContext {
  TestPointCloud cloud;
  ChannelSet channels;
  FaultRealization fault;
  PartitionedChannels part;          // true states
  PartitionedChannels part_robust;   // indices only
  std::uint64_t checksum = 0;
};

TrialContext make_trial_context(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                                FaultPattern pattern, int fault_count, int trial) {
  TrialContext ctx;
  rng::Stream tp_stream(cfg.seed, rng::StreamTag::TestPoints, static_cast<std::uint64_t>(trial));
  ctx.cloud = sample_test_points(cfg, tp_stream);
  ctx.channels = build_channel_set(cfg, geom, ctx.cloud, cfg.seed, static_cast<std::uint64_t>(trial));
  rng::Stream idx_stream(cfg.seed, rng::StreamTag::FaultIndices, static_cast<std::uint64_t>(trial));
  ctx.fault.indices = sample_fault_indices(pattern, fault_count, cfg.ris_nx, cfg.ris_ny,
                                           cfg.pattern_padding, idx_stream);
  rng::Stream state_stream(cfg.seed, rng::StreamTag::FaultStates, static_cast<std::uint64_t>(trial));
  ctx.fault.states = sample_fault_states(static_cast<int>(ctx.fault.indices.size()), state_stream);
  ctx.part = partition(ctx.channels, ctx.fault);
  ctx.part_robust = partition_indices_only(ctx.channels, ctx.fault.indices);
  ctx.checksum = trial_checksum(ctx.cloud, ctx.channels, ctx.fault);
  return ctx;
}

double trial_gamma(const ScenarioConfig& cfg, double naive_snr) {
  if (cfg.gamma_mode == GammaMode::Fixed)
    return db_to_linear(cfg.gamma_fixed_snr_db) * cfg.noise_power_w / cfg.tx_power_w;
  return gamma_threshold(naive_snr, cfg.snr_divisor, cfg.noise_power_w, cfg.tx_power_w);
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<TrialRecord> run_single_trial(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                                          FaultPattern pattern, int fault_count, int trial,
                                          const std::vector<Method>& methods) {
  const TrialContext ctx = make_trial_context(cfg, geom, pattern, fault_count, trial);
  const OptimizerSettings settings = OptimizerSettings::from_config(cfg);

  // The naive result feeds the gamma rule, so it is computed whenever any
  // SLNR method runs even if not requested for reporting.
  const bool need_naive =
      std::any_of(methods.begin(), methods.end(), [](Method m) {
        return m == Method::Naive || m == Method::MaxSlnr || m == Method::Robust;
      });
  std::optional<NaiveResult> naive;
  std::string naive_error;
  double gamma = 0.0;
  if (need_naive) {
    try {
      rng::Stream stream(cfg.seed, rng::StreamTag::Randomization,
                         static_cast<std::uint64_t>(trial), 0);
      naive = naive_max_snr(ctx.part, settings, stream);
      gamma = trial_gamma(cfg, snr(naive->config.v, ctx.part, cfg.tx_power_w, cfg.noise_power_w));
    } catch (const std::exception& e) {
      naive_error = e.what();
    }
  }

  std::vector<TrialRecord> records;
  for (Method method : methods) {
    TrialRecord rec;
    rec.fault_count = fault_count;
    rec.pattern = to_string(pattern);
    rec.trial = trial;
    rec.method = method;
    rec.draw_checksum = ctx.checksum;
    MethodTrial& out = rec.out;
    try {
      switch (method) {
        case Method::Baseline: {
          const RisConfig full = baseline(ctx.channels.Hbar[static_cast<std::size_t>(ctx.cloud.ue_index)]);
          realized_metrics(restrict_to_functioning(full.v, ctx.part), ctx.part, cfg, out);
          break;
        }
        case Method::Naive: {
          if (!naive) throw std::runtime_error(naive_error);
          realized_metrics(naive->config.v, ctx.part, cfg, out);
          out.fallback = naive->randomization.fallback;
          out.sdp_iterations = naive->relaxed.iterations;
          break;
        }
        case Method::MaxSlnr: {
          if (!naive) throw std::runtime_error(naive_error);
          rng::Stream stream(cfg.seed, rng::StreamTag::Randomization,
                             static_cast<std::uint64_t>(trial), 1);
          const MaxSlnrResult r = max_slnr(ctx.part, gamma, cfg.noise_power_w, cfg.tx_power_w,
                                           settings, stream);
          realized_metrics(r.config.v, ctx.part, cfg, out);
          out.fallback = r.randomization.fallback;
          out.sdp_iterations = r.sdp_iterations;
          out.bisection_steps = r.bisection.iterations;
          break;
        }
        case Method::Robust: {
          if (!naive) throw std::runtime_error(naive_error);
          rng::Stream stream(cfg.seed, rng::StreamTag::Randomization,
                             static_cast<std::uint64_t>(trial), 2);
          const MaxSlnrResult r = robust_max_slnr(ctx.part_robust, gamma, cfg.noise_power_w,
                                                  cfg.tx_power_w, settings, stream);
          // Evaluation uses the true states even though the optimizer did not.
          realized_metrics(r.config.v, ctx.part, cfg, out);
          out.robust_bound = expected_slnr_lower_bound(r.config.v, ctx.part_robust,
                                                       cfg.noise_power_w, cfg.tx_power_w);
          out.fallback = r.randomization.fallback;
          out.sdp_iterations = r.sdp_iterations;
          out.bisection_steps = r.bisection.iterations;
          break;
        }
      }
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& trials,
                                       const std::vector<std::pair<int, std::string>>& cells,
                                       const std::vector<Method>& methods) {
  std::vector<AggregateRecord> out;
  for (const auto& [fault_count, pattern] : cells) {
    for (Method method : methods) {
      AggregateRecord rec;
      rec.fault_count = fault_count;
      rec.pattern = pattern;
      rec.method = method;
      std::vector<double> slnrs, snrs;
      double iters = 0.0, bound_sum = 0.0;
      int fallbacks = 0;
      for (const TrialRecord& tr : trials) {
        if (tr.fault_count != fault_count || tr.pattern != pattern || tr.method != method)
          continue;
        if (tr.out.failed) {
          ++rec.failures;
          continue;
        }
        slnrs.push_back(tr.out.slnr);
        snrs.push_back(tr.out.snr);
        iters += tr.out.sdp_iterations;
        bound_sum += tr.out.robust_bound;
        fallbacks += tr.out.fallback ? 1 : 0;
      }
      rec.trials = static_cast<int>(slnrs.size());
      if (!slnrs.empty()) {
        auto mean = [](const std::vector<double>& v) {
          double s = 0;
          for (double x : v) s += x;
          return s / static_cast<double>(v.size());
        };
        auto std_db = [&](const std::vector<double>& v) {
          std::vector<double> db(v.size());
          for (std::size_t i = 0; i < v.size(); ++i) db[i] = linear_to_db(std::max(v[i], 1e-300));
          const double m = mean(db);
          double s = 0;
          for (double x : db) s += (x - m) * (x - m);
          return v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
        };
        rec.mean_slnr = mean(slnrs);
        rec.mean_snr = mean(snrs);
        rec.mean_slnr_db = linear_to_db(rec.mean_slnr);
        rec.mean_snr_db = linear_to_db(rec.mean_snr);
        rec.std_slnr_db = std_db(slnrs);
        rec.std_snr_db = std_db(snrs);
        rec.mean_iterations = iters / static_cast<double>(rec.trials);
        rec.mean_robust_bound = bound_sum / static_cast<double>(rec.trials);
        rec.fallback_rate = static_cast<double>(fallbacks) / static_cast<double>(rec.trials);
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, int jobs) {
  const ArrayGeometry geom = build_geometry(cfg);
  struct Cell {
    int fault_count;
    int trial;
  };
  std::vector<Cell> cells;
  for (int b : spec.fault_counts)
    for (int t = 0; t < spec.trials; ++t) cells.push_back({b, t});

  std::vector<std::vector<TrialRecord>> per_cell(cells.size());
  const int n_cells = static_cast<int>(cells.size());
  if (jobs <= 1) {
    for (int i = 0; i < n_cells; ++i)
      per_cell[static_cast<std::size_t>(i)] =
          run_single_trial(cfg, geom, spec.pattern, cells[static_cast<std::size_t>(i)].fault_count,
                           cells[static_cast<std::size_t>(i)].trial, spec.methods);
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int i = 0; i < n_cells; ++i)
      per_cell[static_cast<std::size_t>(i)] =
          run_single_trial(cfg, geom, spec.pattern, cells[static_cast<std::size_t>(i)].fault_count,
                           cells[static_cast<std::size_t>(i)].trial, spec.methods);
  }

  SweepResult result;
  for (auto& batch : per_cell)
    for (auto& rec : batch) result.trials.push_back(std::move(rec));

  std::vector<std::pair<int, std::string>> agg_cells;
  for (int b : spec.fault_counts) agg_cells.emplace_back(b, to_string(spec.pattern));
  result.aggregates = aggregate(result.trials, agg_cells, spec.methods);
  return result;
}

SweepResult run_pattern_study(const ScenarioConfig& cfg, int trials, int jobs) {
  const std::array<FaultPattern, 4> patterns{FaultPattern::Quadrant, FaultPattern::Uniform,
                                             FaultPattern::TopRows, FaultPattern::LeftColumns};
  SweepResult combined;
  for (FaultPattern pattern : patterns) {
    const int B = pattern == FaultPattern::Uniform
                      ? cfg.ris_elements() / 4
                      : pattern_element_count(pattern, cfg.ris_nx, cfg.ris_ny, cfg.pattern_padding);
    SweepSpec spec;
    spec.fault_counts = {B};
    spec.trials = trials;
    spec.pattern = pattern;
    SweepResult r = run_sweep(cfg, spec, jobs);
    for (auto& t : r.trials) combined.trials.push_back(std::move(t));
    for (auto& a : r.aggregates) combined.aggregates.push_back(std::move(a));
  }
  return combined;
}

namespace {

HeatmapResult heatmap_realization(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                                  Method method, int fault_count, const GridSpec& grid,
                                  FaultPattern pattern, bool parallel, int trial);

}  // namespace

HeatmapResult run_heatmap(const ScenarioConfig& cfg, Method method, int fault_count,
                          const GridSpec& grid, FaultPattern pattern, bool parallel,
                          int average) {
  const ArrayGeometry geom = build_geometry(cfg);
  HeatmapResult result =
      heatmap_realization(cfg, geom, method, fault_count, grid, pattern, parallel, 0);
  for (int trial = 1; trial < average; ++trial) {
    const HeatmapResult next =
        heatmap_realization(cfg, geom, method, fault_count, grid, pattern, parallel, trial);
    for (std::size_t c = 0; c < result.map.power_w.size(); ++c)
      result.map.power_w[c] += next.map.power_w[c];
  }
  if (average > 1)
    for (double& p : result.map.power_w) p /= average;
  return result;
}

namespace {

HeatmapResult heatmap_realization(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                                  Method method, int fault_count, const GridSpec& grid,
                                  FaultPattern pattern, bool parallel, int trial) {
  const TrialContext ctx = make_trial_context(cfg, geom, pattern, fault_count, trial);
  const OptimizerSettings settings = OptimizerSettings::from_config(cfg);

  HeatmapResult result;
  VecC v_r;
  switch (method) {
    case Method::Baseline: {
      const RisConfig full = baseline(ctx.channels.Hbar[static_cast<std::size_t>(ctx.cloud.ue_index)]);
      v_r = restrict_to_functioning(full.v, ctx.part);
      break;
    }
    case Method::Naive: {
      rng::Stream stream(cfg.seed, rng::StreamTag::Randomization,
                         static_cast<std::uint64_t>(trial), 0);
      const NaiveResult r = naive_max_snr(ctx.part, settings, stream);
      v_r = r.config.v;
      result.diag.fallback = r.randomization.fallback;
      break;
    }
    case Method::MaxSlnr:
    case Method::Robust: {
      rng::Stream nstream(cfg.seed, rng::StreamTag::Randomization,
                          static_cast<std::uint64_t>(trial), 0);
      const NaiveResult naive = naive_max_snr(ctx.part, settings, nstream);
      const double gamma =
          trial_gamma(cfg, snr(naive.config.v, ctx.part, cfg.tx_power_w, cfg.noise_power_w));
      rng::Stream stream(cfg.seed, rng::StreamTag::Randomization,
                         static_cast<std::uint64_t>(trial),
                         method == Method::MaxSlnr ? 1 : 2);
      const MaxSlnrResult r =
          method == Method::MaxSlnr
              ? max_slnr(ctx.part, gamma, cfg.noise_power_w, cfg.tx_power_w, settings, stream)
              : robust_max_slnr(ctx.part_robust, gamma, cfg.noise_power_w, cfg.tx_power_w,
                                settings, stream);
      v_r = r.config.v;
      result.diag.fallback = r.randomization.fallback;
      result.diag.sdp_iterations = r.sdp_iterations;
      result.diag.bisection_steps = r.bisection.iterations;
      break;
    }
  }

  realized_metrics(v_r, ctx.part, cfg, result.diag);
  result.v_full = interleave_configuration(v_r, ctx.fault.states, ctx.part);
  result.map = received_power_map(result.v_full, cfg, geom, ctx.channels.G,
                                  ctx.channels.h[static_cast<std::size_t>(ctx.cloud.ue_index)],
                                  grid, cfg.seed, static_cast<std::uint64_t>(trial), parallel);
  result.mask = fault_mask(ctx.fault.indices, cfg.ris_nx, cfg.ris_ny);

  // The cell holding the UE reuses the UE channel, so its power must agree
  // with the realized SNR.
  int ue_cell = 0;
  double best = 1e300;
  for (int c = 0; c < grid.nx * grid.ny; ++c) {
    const double dx = result.map.x_m[static_cast<std::size_t>(c)];
    const double dy = result.map.y_m[static_cast<std::size_t>(c)];
    const double d = dx * dx + dy * dy;
    if (d < best) {
      best = d;
      ue_cell = c;
    }
  }
  result.ue_cell_power_w = result.map.power_w[static_cast<std::size_t>(ue_cell)];
  return result;
}

}  // namespace

void write_sweep_csv(const std::string& path, const std::vector<AggregateRecord>& records,
                     bool pattern_keyed) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << (pattern_keyed ? "pattern" : "fault_count")
    << ",method,mean_slnr_db,std_slnr_db,mean_snr_db,std_snr_db,trials,failures\n";
  for (const auto& r : records) {
    if (pattern_keyed)
      f << r.pattern;
    else
      f << r.fault_count;
    f << "," << to_string(r.method) << "," << fmt_csv(r.mean_slnr_db) << ","
      << fmt_csv(r.std_slnr_db) << "," << fmt_csv(r.mean_snr_db) << "," << fmt_csv(r.std_snr_db)
      << "," << r.trials << "," << r.failures << "\n";
  }
}

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "fault_count,pattern,trial,method,snr_db,slnr_db,leakage_db,robust_bound_db,"
       "sdp_iterations,bisection_steps,fallback,failed,draw_checksum\n";
  for (const auto& r : records) {
    f << r.fault_count << "," << r.pattern << "," << r.trial << "," << to_string(r.method) << ",";
    if (r.out.failed)
      f << ",,,";
    else {
      f << fmt_csv(linear_to_db(std::max(r.out.snr, 1e-300))) << ","
        << fmt_csv(linear_to_db(std::max(r.out.slnr, 1e-300))) << ","
        << fmt_csv(linear_to_db(std::max(r.out.leakage, 1e-300))) << ",";
      if (r.method == Method::Robust)
        f << fmt_csv(linear_to_db(std::max(r.out.robust_bound, 1e-300)));
    }
    f << "," << r.out.sdp_iterations << "," << r.out.bisection_steps << ","
      << (r.out.fallback ? 1 : 0) << "," << (r.out.failed ? 1 : 0) << "," << r.draw_checksum
      << "\n";
  }
}

void write_heatmap_csv(const std::string& path, const PowerMap& map) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "x_m,y_m,power_dbm\n";
  for (std::size_t c = 0; c < map.power_w.size(); ++c)
    f << fmt_csv(map.x_m[c]) << "," << fmt_csv(map.y_m[c]) << ","
      << fmt_csv(watts_to_dbm(std::max(map.power_w[c], 1e-300))) << "\n";
}

void write_mask_csv(const std::string& path, const std::vector<std::vector<int>>& mask) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  // ix grows along +x ("left" = small ix), iy along +z ("upper" = large iy).
  f << "ix,iy,faulty\n";
  for (std::size_t ix = 0; ix < mask.size(); ++ix)
    for (std::size_t iy = 0; iy < mask[ix].size(); ++iy)
      f << ix << "," << iy << "," << mask[ix][iy] << "\n";
}

void write_metadata(const std::string& path, const ScenarioConfig& cfg,
                    const std::string& command, int jobs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json meta;
  meta["tool"] = "risleak";
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["jobs"] = jobs;
  meta["seed"] = cfg.seed;
  nlohmann::json config = nlohmann::json::object();
  std::istringstream dump(dump_config(cfg));
  std::string line;
  while (std::getline(dump, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) config[line.substr(0, eq)] = line.substr(eq + 3);
  }
  meta["config"] = config;
  meta["outputs"] = outputs;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << meta.dump(2) << "\n";
}

}  // namespace risleak

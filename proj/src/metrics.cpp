// SPDX-License-Identifier: Apache-2.0

#include "risleak/metrics.hpp"

#include <omp.h>

#include <stdexcept>

namespace risleak {

Method parse_method(const std::string& name) {
  if (name == "baseline") return Method::Baseline;
  if (name == "naive") return Method::Naive;
  if (name == "max_slnr") return Method::MaxSlnr;
  if (name == "robust") return Method::Robust;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Baseline: return "baseline";
    case Method::Naive: return "naive";
    case Method::MaxSlnr: return "max_slnr";
    case Method::Robust: return "robust";
  }
  return "?";
}

double signal_power(const VecC& v_r, const PartitionedChannels& part, int t) {
  const PointPartition& pp = part.pts.at(static_cast<std::size_t>(t));
  if (v_r.size() != pp.Hr.rows()) throw std::invalid_argument("signal_power: v_R length mismatch");
  return ((v_r.adjoint() * pp.Hr + pp.hb).squaredNorm());
}

double snr(const VecC& v_r, const PartitionedChannels& part, double tx_power,
           double noise_power) {
  return tx_power * signal_power(v_r, part, part.ue_index) / noise_power;
}

double leakage(const VecC& v_r, const PartitionedChannels& part) {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(part.pts.size()); ++t) {
    if (t == part.ue_index) continue;
    sum += signal_power(v_r, part, t);
  }
  return sum;
}

double slnr(const VecC& v_r, const PartitionedChannels& part, double noise_power,
            double tx_power) {
  return signal_power(v_r, part, part.ue_index) /
         (leakage(v_r, part) + noise_power / tx_power);
}

double expected_slnr_lower_bound(const VecC& v_r, const PartitionedChannels& part,
                                 double noise_power, double tx_power) {
  auto term = [&](int t) {
    const PointPartition& pp = part.pts[static_cast<std::size_t>(t)];
    return (v_r.adjoint() * pp.Hr).squaredNorm() + pp.fro2_b / 3.0;
  };
  double den = noise_power / tx_power;
  for (int t = 0; t < static_cast<int>(part.pts.size()); ++t)
    if (t != part.ue_index) den += term(t);
  return term(part.ue_index) / den;
}

VecC mrt_precoder(const VecC& v_full, const MatC& Hbar_ue, double tx_power) {
  const Eigen::RowVectorXcd row = v_full.adjoint() * Hbar_ue;
  const double nrm = row.norm();
  if (nrm <= 0) throw std::invalid_argument("mrt_precoder: zero effective channel");
  return std::sqrt(tx_power) * row.adjoint() / nrm;
}

namespace {

PowerMap power_map_impl(const VecC& v_full, const ScenarioConfig& cfg,
                        const ArrayGeometry& geom, const MatC& G, const VecC& h_ue,
                        const GridSpec& grid, std::uint64_t master_seed,
                        std::uint64_t trial, bool parallel) {
  if (v_full.size() != G.rows()) throw std::invalid_argument("received_power_map: v length != N");
  PowerMap map;
  map.grid = grid;
  const int cells = grid.nx * grid.ny;
  map.power_w.resize(static_cast<std::size_t>(cells));
  map.x_m.resize(static_cast<std::size_t>(cells));
  map.y_m.resize(static_cast<std::size_t>(cells));

  const VecC w = mrt_precoder(v_full, cascade(h_ue, G), cfg.tx_power_w);
  const double dx = cfg.area_side_x_m / grid.nx;
  const double dy = cfg.area_side_y_m / grid.ny;
  const Vec3 origin = cfg.ue_position - Vec3(cfg.area_side_x_m / 2.0, cfg.area_side_y_m / 2.0, 0.0);

  // Cell whose center is nearest the UE reuses the UE's drawn channel.
  int ue_cell = -1;
  double best = 1e300;
  for (int c = 0; c < cells; ++c) {
    const int ix = c % grid.nx;
    const int iy = c / grid.nx;
    const Vec3 p = origin + Vec3((ix + 0.5) * dx, (iy + 0.5) * dy, 0.0);
    const double dist = (p - cfg.ue_position).norm();
    if (dist < best) { best = dist; ue_cell = c; }
  }

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int c = 0; c < cells; ++c) {
    const int ix = c % grid.nx;
    const int iy = c / grid.nx;
    const Vec3 p = origin + Vec3((ix + 0.5) * dx, (iy + 0.5) * dy, 0.0);
    map.x_m[static_cast<std::size_t>(c)] = p.x() - cfg.ue_position.x();
    map.y_m[static_cast<std::size_t>(c)] = p.y() - cfg.ue_position.y();
    VecC h;
    if (c == ue_cell) {
      h = h_ue;
    } else {
      rng::Stream stream(master_seed, rng::StreamTag::Heatmap, trial,
                         static_cast<std::uint64_t>(c));
      h = rician_channel(cfg, p, geom, stream);
    }
    const MatC Hbar = cascade(h, G);
    const std::complex<double> rx = (v_full.adjoint() * Hbar * w)(0);
    map.power_w[static_cast<std::size_t>(c)] = std::norm(rx);
  }
  return map;
}

}  // namespace

PowerMap received_power_map(const VecC& v_full, const ScenarioConfig& cfg,
                            const ArrayGeometry& geom, const MatC& G, const VecC& h_ue,
                            const GridSpec& grid, std::uint64_t master_seed,
                            std::uint64_t trial, bool parallel) {
  return power_map_impl(v_full, cfg, geom, G, h_ue, grid, master_seed, trial, parallel);
}

PowerMap received_power_map_serial(const VecC& v_full, const ScenarioConfig& cfg,
                                   const ArrayGeometry& geom, const MatC& G, const VecC& h_ue,
                                   const GridSpec& grid, std::uint64_t master_seed,
                                   std::uint64_t trial) {
  return power_map_impl(v_full, cfg, geom, G, h_ue, grid, master_seed, trial, false);
}

VecC interleave_configuration(const VecC& v_r, const VecC& v_b,
                              const PartitionedChannels& part) {
  if (v_r.size() != part.n_functioning() ||
      v_b.size() != static_cast<Eigen::Index>(part.faulty.size()))
    throw std::invalid_argument("interleave_configuration: length mismatch");
  VecC v(part.n_elements);
  for (int r = 0; r < part.n_functioning(); ++r)
    v(part.functioning[static_cast<std::size_t>(r)]) = v_r(r);
  for (std::size_t b = 0; b < part.faulty.size(); ++b)
    v(part.faulty[b]) = v_b(static_cast<Eigen::Index>(b));
  return v;
}

}  // namespace risleak

// SPDX-License-Identifier: Apache-2.0

#include "risleak/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace risleak {

namespace {
constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kJ{0.0, 1.0};
}  // namespace

ArrayGeometry build_geometry(const ScenarioConfig& cfg) {
  ArrayGeometry geom;

  // RIS plane faces the midpoint between AP and UE.
  const Vec3 midpoint = 0.5 * (cfg.ap_position + cfg.ue_position);
  Vec3 normal = midpoint - cfg.ris_position;
  if (normal.norm() < 1e-12) normal = cfg.ap_position - cfg.ris_position;
  normal.normalize();

  Vec3 u = Vec3::UnitZ().cross(normal);  // horizontal in-plane axis
  if (u.norm() < 1e-9) u = Vec3::UnitX();
  u.normalize();
  if (u.x() < 0) u = -u;  // ix grows with +x so "left" keeps its meaning
  Vec3 v = normal.cross(u);
  if (v.z() < 0) v = -v;  // iy grows with +z ("upper" rows)
  v.normalize();

  const double d = cfg.element_spacing_m;
  const double cx = (cfg.ris_nx - 1) / 2.0;
  const double cy = (cfg.ris_ny - 1) / 2.0;
  geom.ris_elements.reserve(cfg.ris_elements());
  for (int iy = 0; iy < cfg.ris_ny; ++iy)
    for (int ix = 0; ix < cfg.ris_nx; ++ix)
      geom.ris_elements.push_back(cfg.ris_position + (ix - cx) * d * u + (iy - cy) * d * v);
  geom.ris_normal = normal;

  // AP: horizontal ULA broadside to the RIS.
  Vec3 toward_ris = cfg.ris_position - cfg.ap_position;
  toward_ris.normalize();
  Vec3 axis = Vec3::UnitZ().cross(toward_ris);
  if (axis.norm() < 1e-9) axis = Vec3::UnitX();
  axis.normalize();
  const double cm = (cfg.ap_antennas - 1) / 2.0;
  geom.ap_elements.reserve(cfg.ap_antennas);
  for (int m = 0; m < cfg.ap_antennas; ++m)
    geom.ap_elements.push_back(cfg.ap_position + (m - cm) * cfg.ap_spacing_m * axis);
  return geom;
}

VecC steering_vector(const std::vector<Vec3>& positions, const Vec3& direction,
                     double wavelength) {
  if (wavelength <= 0) throw std::invalid_argument("steering_vector: wavelength must be > 0");
  const double n2 = direction.norm();
  if (n2 < 1e-12) throw std::invalid_argument("steering_vector: zero-length direction");
  const Vec3 dir = direction / n2;
  const double k = 2.0 * kPi / wavelength;
  VecC b(positions.size());
  const Vec3& r0 = positions.front();
  for (std::size_t n = 0; n < positions.size(); ++n)
    b(static_cast<Eigen::Index>(n)) = std::exp(kJ * (k * (positions[n] - r0).dot(dir)));
  return b;
}

double pathloss(double zeta0, double distance, double exponent) {
  if (distance <= 0) throw std::invalid_argument("pathloss: distance must be > 0");
  return zeta0 / std::pow(distance, exponent);
}

VecC ap_steering(const ScenarioConfig& cfg, const ArrayGeometry& geom) {
  const Vec3 dir = (cfg.ris_position - cfg.ap_position).normalized();
  return steering_vector(geom.ap_elements, dir, cfg.wavelength_m);
}

MatC ap_ris_channel(const ScenarioConfig& cfg, const ArrayGeometry& geom) {
  const double d1 = (cfg.ap_position - cfg.ris_position).norm();
  if (d1 <= 0) throw std::invalid_argument("ap_ris_channel: AP and RIS coincide");
  const double gamma_i = pathloss(cfg.reference_loss, d1, cfg.pathloss_exp_ap_ris);
  const VecC b = steering_vector(geom.ris_elements,
                                 (cfg.ap_position - cfg.ris_position).normalized(),
                                 cfg.wavelength_m);
  const VecC a = ap_steering(cfg, geom);
  return std::sqrt(gamma_i) * b * a.adjoint();
}

VecC nlos_from_paths(const std::vector<ScatterPath>& paths, double gamma_g,
                     const ArrayGeometry& geom, double wavelength) {
  if (paths.empty()) throw std::invalid_argument("nlos_from_paths: need at least one path");
  const Eigen::Index n = static_cast<Eigen::Index>(geom.ris_elements.size());
  VecC h = VecC::Zero(n);
  for (const auto& path : paths) {
    if (path.fading.size() != n)
      throw std::invalid_argument("nlos_from_paths: fading length mismatch");
    h += path.fading.cwiseProduct(steering_vector(geom.ris_elements, path.direction, wavelength));
  }
  return std::sqrt(gamma_g / static_cast<double>(paths.size())) * h;
}

namespace {

// Uniform direction on the hemisphere in front of the RIS.
Vec3 hemisphere_direction(const Vec3& normal, rng::Stream& stream) {
  Vec3 d;
  do {
    d = {stream.normal(), stream.normal(), stream.normal()};
  } while (d.norm() < 1e-9);
  d.normalize();
  if (d.dot(normal) < 0) d = -d;
  return d;
}

}  // namespace

VecC nlos_component(const ScenarioConfig& cfg, const Vec3& point,
                    const ArrayGeometry& geom, rng::Stream& stream) {
  const double d2 = (point - cfg.ris_position).norm();
  const double gamma_g = pathloss(cfg.reference_loss, d2, cfg.pathloss_exp_ris_ue);
  const Eigen::Index n = static_cast<Eigen::Index>(geom.ris_elements.size());
  std::vector<ScatterPath> paths(static_cast<std::size_t>(cfg.scatter_paths));
  for (auto& path : paths) {
    path.fading.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) path.fading(i) = stream.cnormal();
    path.direction = hemisphere_direction(geom.ris_normal, stream);
  }
  return nlos_from_paths(paths, gamma_g, geom, cfg.wavelength_m);
}

VecC rician_channel(const ScenarioConfig& cfg, const Vec3& point,
                    const ArrayGeometry& geom, rng::Stream& stream) {
  const double d2 = (point - cfg.ris_position).norm();
  const double gamma_g = pathloss(cfg.reference_loss, d2, cfg.pathloss_exp_ris_ue);
  const VecC hlos = std::sqrt(gamma_g) *
                    steering_vector(geom.ris_elements, (point - cfg.ris_position).normalized(),
                                    cfg.wavelength_m);
  if (cfg.rician_k >= 1e9) return hlos;
  const VecC hnlos = nlos_component(cfg, point, geom, stream);
  const double k = cfg.rician_k;
  return std::sqrt(k / (1.0 + k)) * hlos + std::sqrt(1.0 / (1.0 + k)) * hnlos;
}

MatC cascade(const VecC& h, const MatC& G) {
  if (h.size() != G.rows()) throw std::invalid_argument("cascade: dimension mismatch");
  return h.conjugate().asDiagonal() * G;
}

ChannelSet build_channel_set(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                             const TestPointCloud& cloud, std::uint64_t master_seed,
                             std::uint64_t trial) {
  ChannelSet set;
  set.G = ap_ris_channel(cfg, geom);
  set.ap_steer = ap_steering(cfg, geom);
  set.ue_index = cloud.ue_index;
  const std::size_t T = cloud.positions.size();
  set.h.reserve(T);
  set.Hbar.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    rng::Stream stream(master_seed, rng::StreamTag::Nlos, trial, t);
    set.h.push_back(rician_channel(cfg, cloud.positions[t], geom, stream));
    set.Hbar.push_back(cascade(set.h.back(), set.G));
  }
  return set;
}

}  // namespace risleak

// SPDX-License-Identifier: Apache-2.0

#include "risleak/faulty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risleak {

namespace {
constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kJ{0.0, 1.0};

int grid_index(int ix, int iy, int nx) { return iy * nx + ix; }
}  // namespace

FaultPattern parse_fault_pattern(const std::string& name) {
  if (name == "uniform") return FaultPattern::Uniform;
  if (name == "quadrant") return FaultPattern::Quadrant;
  if (name == "top_rows") return FaultPattern::TopRows;
  if (name == "left_columns") return FaultPattern::LeftColumns;
  throw std::invalid_argument("unknown fault pattern '" + name + "'");
}

std::string to_string(FaultPattern pattern) {
  switch (pattern) {
    case FaultPattern::Uniform: return "uniform";
    case FaultPattern::Quadrant: return "quadrant";
    case FaultPattern::TopRows: return "top_rows";
    case FaultPattern::LeftColumns: return "left_columns";
  }
  return "?";
}

int pattern_element_count(FaultPattern pattern, int nx, int ny, PatternPadding padding) {
  switch (pattern) {
    case FaultPattern::Uniform:
      return -1;  // caller chooses B
    case FaultPattern::Quadrant:
      return (nx / 2) * (ny - ny / 2);
    case FaultPattern::TopRows:
      return padding == PatternPadding::PadToQuarter ? nx * ny / 4 : 2 * nx;
    case FaultPattern::LeftColumns:
      return padding == PatternPadding::PadToQuarter ? nx * ny / 4 : 2 * ny;
  }
  return -1;
}

std::vector<int> sample_fault_indices(FaultPattern pattern, int B, int nx, int ny,
                                      PatternPadding padding, rng::Stream& stream) {
  const int n = nx * ny;
  if (B < 0 || B > n) throw std::invalid_argument("fault count B must satisfy 0 <= B <= N");

  std::vector<int> out;
  switch (pattern) {
    case FaultPattern::Uniform: {
      // Partial Fisher-Yates over the index range.
      std::vector<int> all(n);
      for (int i = 0; i < n; ++i) all[i] = i;
      for (int i = 0; i < B; ++i) {
        const int j = i + static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(all[i], all[j]);
      }
      out.assign(all.begin(), all.begin() + B);
      break;
    }
    case FaultPattern::Quadrant: {
      // Upper-left: small ix, large iy.
      for (int iy = ny - ny / 2; iy < ny; ++iy)
        for (int ix = 0; ix < nx / 2; ++ix) out.push_back(grid_index(ix, iy, nx));
      break;
    }
    case FaultPattern::TopRows: {
      for (int iy = ny - 1; iy >= ny - 2 && iy >= 0; --iy)
        for (int ix = 0; ix < nx; ++ix) out.push_back(grid_index(ix, iy, nx));
      if (padding == PatternPadding::PadToQuarter) {
        // Top up from the leftmost elements of the next row down.
        const int target = nx * ny / 4;
        int iy = ny - 3;
        int ix = 0;
        while (static_cast<int>(out.size()) < target && iy >= 0) {
          out.push_back(grid_index(ix, iy, nx));
          if (++ix == nx) { ix = 0; --iy; }
        }
      }
      break;
    }
    case FaultPattern::LeftColumns: {
      for (int ix = 0; ix < 2 && ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy) out.push_back(grid_index(ix, iy, nx));
      if (padding == PatternPadding::PadToQuarter) {
        // Top up from the bottom of the next column to the right.
        const int target = nx * ny / 4;
        int ix = 2;
        int iy = 0;
        while (static_cast<int>(out.size()) < target && ix < nx) {
          out.push_back(grid_index(ix, iy, nx));
          if (++iy == ny) { iy = 0; ++ix; }
        }
      }
      break;
    }
  }

  if (pattern != FaultPattern::Uniform) {
    const int expect = pattern_element_count(pattern, nx, ny, padding);
    if (B != expect)
      throw std::invalid_argument("fault count B=" + std::to_string(B) +
                                  " incompatible with structured pattern '" + to_string(pattern) +
                                  "' (expects " + std::to_string(expect) + ")");
  }
  std::sort(out.begin(), out.end());
  return out;
}

VecC sample_fault_states(int B, rng::Stream& stream) {
  if (B < 0) throw std::invalid_argument("fault state count must be >= 0");
  VecC v(B);
  for (int b = 0; b < B; ++b) {
    const double delta = stream.uniform();
    const double phi = stream.uniform(0.0, 2.0 * kPi);
    v(b) = delta * std::exp(kJ * phi);
  }
  return v;
}

namespace {

PartitionedChannels partition_impl(const ChannelSet& channels,
                                   const std::vector<int>& fault_indices, const VecC* states) {
  const int n = static_cast<int>(channels.G.rows());
  const int m = static_cast<int>(channels.G.cols());
  const int B = static_cast<int>(fault_indices.size());

  std::vector<char> is_faulty(static_cast<std::size_t>(n), 0);
  for (int idx : fault_indices) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("fault index out of range");
    if (is_faulty[static_cast<std::size_t>(idx)])
      throw std::invalid_argument("duplicate fault index");
    is_faulty[static_cast<std::size_t>(idx)] = 1;
  }
  if (states && states->size() != B)
    throw std::invalid_argument("fault state vector length mismatch");

  PartitionedChannels part;
  part.ue_index = channels.ue_index;
  part.ap_steer = channels.ap_steer;
  part.a_norm2 = channels.ap_steer.squaredNorm();
  part.n_elements = n;
  part.faulty = fault_indices;
  for (int i = 0; i < n; ++i)
    if (!is_faulty[static_cast<std::size_t>(i)]) part.functioning.push_back(i);
  const int nr = static_cast<int>(part.functioning.size());

  part.pts.reserve(channels.Hbar.size());
  for (const MatC& Hbar : channels.Hbar) {
    PointPartition pp;
    pp.Hr.resize(nr, m);
    pp.Hb.resize(B, m);
    for (int r = 0; r < nr; ++r) pp.Hr.row(r) = Hbar.row(part.functioning[static_cast<std::size_t>(r)]);
    for (int b = 0; b < B; ++b) pp.Hb.row(b) = Hbar.row(part.faulty[static_cast<std::size_t>(b)]);
    pp.hb = states ? (states->adjoint() * pp.Hb).eval() : Eigen::RowVectorXcd::Zero(m).eval();
    pp.fro2_b = pp.Hb.squaredNorm();
    // Rank-1 factor of the stacked matrix: chat = stacked * a / ||a||^2.
    pp.chat.resize(nr + 1);
    pp.chat.head(nr) = pp.Hr * part.ap_steer / part.a_norm2;
    pp.chat(nr) = (pp.hb * part.ap_steer)(0) / part.a_norm2;
    part.pts.push_back(std::move(pp));
  }
  return part;
}

}  // namespace

MatC PartitionedChannels::stacked(int t) const {
  const PointPartition& pp = pts.at(static_cast<std::size_t>(t));
  MatC s(pp.Hr.rows() + 1, pp.Hr.cols());
  s.topRows(pp.Hr.rows()) = pp.Hr;
  s.bottomRows(1) = pp.hb;
  return s;
}

MatC PartitionedChannels::lifted(int t) const {
  const MatC s = stacked(t);
  return s * s.adjoint();
}

PartitionedChannels partition(const ChannelSet& channels, const FaultRealization& fault) {
  return partition_impl(channels, fault.indices, &fault.states);
}

PartitionedChannels partition_indices_only(const ChannelSet& channels,
                                           const std::vector<int>& fault_indices) {
  return partition_impl(channels, fault_indices, nullptr);
}

std::vector<std::vector<int>> fault_mask(const std::vector<int>& indices, int nx, int ny) {
  std::vector<std::vector<int>> mask(static_cast<std::size_t>(nx),
                                     std::vector<int>(static_cast<std::size_t>(ny), 0));
  for (int idx : indices) {
    const int ix = idx % nx;
    const int iy = idx / nx;
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny)
      throw std::invalid_argument("fault index outside grid");
    mask[static_cast<std::size_t>(ix)][static_cast<std::size_t>(iy)] = 1;
  }
  return mask;
}

}  // namespace risleak

// SPDX-License-Identifier: Apache-2.0
//
// Element-failure model: which elements fail (four spatial patterns), the
// uncontrollable reflection state of each failed element, the row partition
// of the cascaded channels into functioning/faulty blocks, and the lifted
// matrices driving the semidefinite programs.

#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "risleak/channel.hpp"
#include "risleak/rng.hpp"

namespace risleak {

enum class FaultPattern { Uniform, Quadrant, TopRows, LeftColumns };

FaultPattern parse_fault_pattern(const std::string& name);
std::string to_string(FaultPattern pattern);

struct FaultRealization {
  std::vector<int> indices;  // sorted, distinct, grid index iy*Nx + ix
  VecC states;               // v_B, |entry| <= 1, aligned with indices
};

// Structured patterns are deterministic; Uniform draws B distinct indices.
// Quadrant selects ix < Nx/2 and iy >= Ny/2 (upper-left), TopRows the two
// highest rows, LeftColumns the two lowest columns; with PadToQuarter those
// two are topped up from the adjacent row/column to exactly Nx*Ny/4.
std::vector<int> sample_fault_indices(FaultPattern pattern, int B, int nx, int ny,
                                      PatternPadding padding, rng::Stream& stream);

// The element count a structured pattern produces (for validation/reporting).
int pattern_element_count(FaultPattern pattern, int nx, int ny, PatternPadding padding);

// v_B entries delta * e^{j phi}, delta ~ U[0,1], phi ~ U[0,2pi).
VecC sample_fault_states(int B, rng::Stream& stream);

// Per-point partitioned channels plus the rank-1 factor used by the hot
// evaluation paths (valid because G is rank 1; verified by tests).
struct PointPartition {
  MatC Hr;                   // (N-B) x M, functioning rows in index order
  MatC Hb;                   // B x M, faulty rows in index order
  Eigen::RowVectorXcd hb;    // v_B^H Hb, the fixed uncontrollable component
  VecC chat;                 // (N-B+1) factor: stacked matrix ~ chat * a^H
  double fro2_b = 0.0;       // ||Hb||_F^2
};

struct PartitionedChannels {
  std::vector<PointPartition> pts;  // per test point
  int ue_index = 0;
  VecC ap_steer;       // a, shared across points
  double a_norm2 = 0;  // ||a||^2 = M
  std::vector<int> functioning;  // original indices, ascending
  std::vector<int> faulty;       // original indices, ascending
  int n_elements = 0;            // N

  int n_functioning() const { return static_cast<int>(functioning.size()); }
  int lifted_dim() const { return n_functioning() + 1; }

  // Stacked matrix [Hbar_R; hb^H] for point t, (N-B+1) x M.
  MatC stacked(int t) const;
  // Lifted Htilde_t = stacked(t) stacked(t)^H, assembled from the blocks.
  MatC lifted(int t) const;
};

PartitionedChannels partition(const ChannelSet& channels, const FaultRealization& fault);

// Partition that withholds the fault states: hb = 0 everywhere, chat carries
// only the functioning rows. This is all the partial-CSI optimizer may see.
PartitionedChannels partition_indices_only(const ChannelSet& channels,
                                           const std::vector<int>& fault_indices);

// Nx x Ny 0/1 grid marking faulty elements, for the heatmap mask export.
std::vector<std::vector<int>> fault_mask(const std::vector<int>& indices, int nx, int ny);

}  // namespace risleak

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scs/camera.hpp"

namespace scs {

struct Dataset;

inline constexpr std::size_t kSelectionMessageBytes = 32;
inline constexpr std::uint16_t kSelectionWireVersion = 1;

// One satellite's contribution to a selection round.
//
// Wire layout, little-endian, 32 bytes:
//   0  u32 cluster_id
//   4  u32 sat_id
//   8  f64 mean_distance_km
//  16  u32 visible_count
//  20  u16 viewpoint_index
//  22  u16 wire version
//  24  u64 FNV-1a of bytes [0, 24)
struct SelectionMessage {
  SatId sat_id = 0;
  ClusterId cluster_id = 0;
  int viewpoint_index = 1;
  double mean_distance_km = 0.0;
  int visible_count = 0;

  std::size_t payload_bytes() const { return kSelectionMessageBytes; }
  std::array<std::byte, kSelectionMessageBytes> encode() const;
  // Throws ValidationError on bad version or checksum.
  static SelectionMessage decode(std::span<const std::byte> bytes);

  bool operator==(const SelectionMessage&) const = default;
};

struct ViewpointScore {
  int viewpoint_index = 1;
  SatId sat_id = 0;
  double mean_distance_km = 0.0;
  int visible_count = 0;

  bool operator==(const ViewpointScore&) const = default;
};

struct SelectionResult {
  ClusterId cluster_id = 0;
  int chosen_index = 1;
  SatId chosen_sat_id = 0;
  // Participating satellites (non-empty views), ascending viewpoint index.
  std::vector<ViewpointScore> scores;

  double chosen_mean_km() const;

  bool operator==(const SelectionResult&) const = default;
};

// Arithmetic mean of entry distances. Throws Error("no visible targets").
double mean_visible_distance(const Observation& obs);

// Argmin of mean_visible_distance over observations with visible targets.
// Ties go to the lowest viewpoint index, whatever the input order. Throws
// Error("cluster has no observer") when every view is empty.
SelectionResult select_viewpoint(std::span<const Observation> cluster_obs);

struct ProtocolRound {
  std::vector<SelectionMessage> messages;
  SelectionResult result;
  std::size_t total_bytes = 0;
};

// Single synchronous round: every participating satellite broadcasts its
// encoded score, each receiver decodes and takes the argmin.
ProtocolRound protocol_round(std::span<const Observation> cluster_obs);

// A set of images evaluated together; pointers stay valid while the dataset
// they came from is alive and unmodified.
struct Partition {
  std::string label;
  std::vector<const Observation*> images;
};

// V_j: the j-th image of every cluster. Throws ValidationError when j is
// outside [1, k].
Partition fixed_viewpoint(const Dataset& dataset, int j);

// V_d: the selected image of every cluster.
Partition selected_viewpoint(const Dataset& dataset);
Partition selected_viewpoint(const Dataset& dataset, std::span<const SelectionResult> selections);

std::vector<SelectionResult> select_all(const Dataset& dataset);

// V1..Vk followed by Vd.
std::vector<Partition> standard_partitions(const Dataset& dataset);

}  // namespace scs

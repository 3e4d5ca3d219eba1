#include "scs/viewpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string_view>

#include "scs/cluster.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {
namespace {

template <typename T>
void put_le(std::byte* out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
  }
}

template <typename T>
T get_le(const std::byte* in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(std::to_integer<std::uint8_t>(in[i])) << (8 * i);
  }
  return value;
}

std::uint64_t checksum(const std::byte* bytes, std::size_t n) {
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(bytes), n));
}

}  // namespace

std::array<std::byte, kSelectionMessageBytes> SelectionMessage::encode() const {
  std::array<std::byte, kSelectionMessageBytes> out{};
  put_le<std::uint32_t>(out.data() + 0, cluster_id);
  put_le<std::uint32_t>(out.data() + 4, sat_id);
  put_le<std::uint64_t>(out.data() + 8, std::bit_cast<std::uint64_t>(mean_distance_km));
  put_le<std::uint32_t>(out.data() + 16, static_cast<std::uint32_t>(visible_count));
  put_le<std::uint16_t>(out.data() + 20, static_cast<std::uint16_t>(viewpoint_index));
  put_le<std::uint16_t>(out.data() + 22, kSelectionWireVersion);
  put_le<std::uint64_t>(out.data() + 24, checksum(out.data(), 24));
  return out;
}

SelectionMessage SelectionMessage::decode(std::span<const std::byte> bytes) {
  if (bytes.size() != kSelectionMessageBytes) {
    throw ValidationError("selection message: expected 32 bytes, got " +
                          std::to_string(bytes.size()));
  }
  if (get_le<std::uint16_t>(bytes.data() + 22) != kSelectionWireVersion) {
    throw ValidationError("selection message: unsupported wire version");
  }
  if (get_le<std::uint64_t>(bytes.data() + 24) != checksum(bytes.data(), 24)) {
    throw ValidationError("selection message: checksum mismatch");
  }
  SelectionMessage msg;
  msg.cluster_id = get_le<std::uint32_t>(bytes.data() + 0);
  msg.sat_id = get_le<std::uint32_t>(bytes.data() + 4);
  msg.mean_distance_km = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + 8));
  msg.visible_count = static_cast<int>(get_le<std::uint32_t>(bytes.data() + 16));
  msg.viewpoint_index = get_le<std::uint16_t>(bytes.data() + 20);
  return msg;
}

double SelectionResult::chosen_mean_km() const {
  for (const auto& s : scores) {
    if (s.viewpoint_index == chosen_index) return s.mean_distance_km;
  }
  throw Error("selection result: chosen viewpoint has no score");
}

double mean_visible_distance(const Observation& obs) {
  if (obs.entries.empty()) throw Error("no visible targets");
  double sum = 0.0;
  for (const auto& e : obs.entries) sum += e.distance_km;
  return sum / static_cast<double>(obs.entries.size());
}

namespace {

SelectionResult argmin_scores(ClusterId cluster_id, std::vector<ViewpointScore> scores) {
  if (scores.empty()) throw Error("cluster has no observer");
  std::sort(scores.begin(), scores.end(), [](const ViewpointScore& a, const ViewpointScore& b) {
    return a.viewpoint_index < b.viewpoint_index;
  });
  const auto best = std::min_element(
      scores.begin(), scores.end(), [](const ViewpointScore& a, const ViewpointScore& b) {
        return a.mean_distance_km < b.mean_distance_km;
      });
  SelectionResult result;
  result.cluster_id = cluster_id;
  result.chosen_index = best->viewpoint_index;
  result.chosen_sat_id = best->sat_id;
  result.scores = std::move(scores);
  return result;
}

}  // namespace

SelectionResult select_viewpoint(std::span<const Observation> cluster_obs) {
  std::vector<ViewpointScore> scores;
  ClusterId cluster_id = cluster_obs.empty() ? 0 : cluster_obs.front().cluster_id;
  for (const auto& obs : cluster_obs) {
    if (obs.entries.empty()) continue;
    scores.push_back({obs.viewpoint_index, obs.sat_id, mean_visible_distance(obs),
                      static_cast<int>(obs.entries.size())});
  }
  return argmin_scores(cluster_id, std::move(scores));
}

ProtocolRound protocol_round(std::span<const Observation> cluster_obs) {
  ProtocolRound round;
  std::vector<std::array<std::byte, kSelectionMessageBytes>> wire;
  for (const auto& obs : cluster_obs) {
    if (obs.entries.empty()) continue;
    SelectionMessage msg;
    msg.sat_id = obs.sat_id;
    msg.cluster_id = obs.cluster_id;
    msg.viewpoint_index = obs.viewpoint_index;
    msg.mean_distance_km = mean_visible_distance(obs);
    msg.visible_count = static_cast<int>(obs.entries.size());
    wire.push_back(msg.encode());
    round.messages.push_back(msg);
    round.total_bytes += msg.payload_bytes();
  }

  // Receiver side works only from what came over the link.
  std::vector<ViewpointScore> scores;
  for (const auto& bytes : wire) {
    const SelectionMessage msg = SelectionMessage::decode(bytes);
    scores.push_back({msg.viewpoint_index, msg.sat_id, msg.mean_distance_km, msg.visible_count});
  }
  const ClusterId cluster_id = cluster_obs.empty() ? 0 : cluster_obs.front().cluster_id;
  round.result = argmin_scores(cluster_id, std::move(scores));
  return round;
}

Partition fixed_viewpoint(const Dataset& dataset, int j) {
  if (j < 1 || j > dataset.config.k()) {
    throw ValidationError("viewpoint index " + std::to_string(j) + " outside [1, " +
                          std::to_string(dataset.config.k()) + "]");
  }
  Partition part;
  part.label = "V" + std::to_string(j);
  part.images.reserve(dataset.scenes.size());
  for (const auto& scene : dataset.scenes) {
    if (j > static_cast<int>(scene.views.size())) {
      throw ValidationError("cluster " + std::to_string(scene.cluster.cluster_id) +
                            " has no viewpoint " + std::to_string(j));
    }
    part.images.push_back(&scene.views[j - 1]);
  }
  return part;
}

std::vector<SelectionResult> select_all(const Dataset& dataset) {
  std::vector<SelectionResult> out;
  out.reserve(dataset.scenes.size());
  for (const auto& scene : dataset.scenes) out.push_back(select_viewpoint(scene.views));
  return out;
}

Partition selected_viewpoint(const Dataset& dataset, std::span<const SelectionResult> selections) {
  if (selections.size() != dataset.scenes.size()) {
    throw ValidationError("selection results do not cover every cluster");
  }
  Partition part;
  part.label = "Vd";
  part.images.reserve(dataset.scenes.size());
  for (std::size_t i = 0; i < dataset.scenes.size(); ++i) {
    const auto& scene = dataset.scenes[i];
    const auto& sel = selections[i];
    if (sel.cluster_id != scene.cluster.cluster_id || sel.chosen_index < 1 ||
        sel.chosen_index > static_cast<int>(scene.views.size())) {
      throw ValidationError("selection result does not match cluster " +
                            std::to_string(scene.cluster.cluster_id));
    }
    part.images.push_back(&scene.views[sel.chosen_index - 1]);
  }
  return part;
}

Partition selected_viewpoint(const Dataset& dataset) {
  const auto selections = select_all(dataset);
  return selected_viewpoint(dataset, selections);
}

std::vector<Partition> standard_partitions(const Dataset& dataset) {
  std::vector<Partition> parts;
  for (int j = 1; j <= dataset.config.k(); ++j) parts.push_back(fixed_viewpoint(dataset, j));
  parts.push_back(selected_viewpoint(dataset));
  return parts;
}

}  // namespace scs

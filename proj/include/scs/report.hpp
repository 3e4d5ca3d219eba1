#pragma once

#include <string>

#include "scs/cluster.hpp"
#include "scs/dataset_io.hpp"
#include "scs/fusion.hpp"
#include "scs/stats.hpp"

namespace scs {

// Distance-table layout: Cluster | V1 .. Vk | Vd.
std::string format_distance_table(const DistanceTable& table);

std::string format_comm_report(const CommCostReport& r);

// Everything the `report` command derives from a dataset: distance table,
// pairwise spacing, cap asymmetry for each class radius, comm costs and the
// reaction budget. cap_samples = 0 skips the Monte Carlo part.
std::string dataset_report_json(const Dataset& dataset, const PipelineConfig& cfg,
                                std::uint64_t cap_samples = 1'000'000);

}  // namespace scs

#include "scs/report.hpp"

#include <cstdio>

#include "json.hpp"

#include "scs/viewpoint.hpp"

namespace scs {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kRowNames[] = {"Close", "Mid", "Far", "Overall"};

}  // namespace

std::string format_distance_table(const DistanceTable& table) {
  std::string out;
  char buf[64];
  out += "Cluster ";
  for (int j = 1; j <= table.k(); ++j) {
    std::snprintf(buf, sizeof(buf), " | %7s", ("V" + std::to_string(j)).c_str());
    out += buf;
  }
  out += " | " + std::string(7 - 2, ' ') + "Vd\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%-8s", kRowNames[r]);
    out += buf;
    for (double v : table.rows[r].fixed) {
      std::snprintf(buf, sizeof(buf), " | %7.3f", v);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " | %7.3f\n", table.rows[r].selected);
    out += buf;
  }
  return out;
}

std::string format_comm_report(const CommCostReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-13s %12llu B/cluster  %10.5f ms @ %.3g Gbps  budget %.1f ms  %s",
                std::string(to_string(r.strategy)).c_str(),
                static_cast<unsigned long long>(r.bytes_per_cluster), r.transfer_ms, r.link_gbps, r.budget_ms,
                r.within_budget ? "within budget" : "EXCEEDS budget");
  return buf;
}

namespace {

Json comm_json(const CommCostReport& r) {
  Json j;
  j["strategy"] = std::string(to_string(r.strategy));
  j["bytes_per_cluster"] = r.bytes_per_cluster;
  j["link_gbps"] = r.link_gbps;
  j["transfer_ms"] = r.transfer_ms;
  j["budget_ms"] = r.budget_ms;
  j["within_budget"] = r.within_budget;
  return j;
}

}  // namespace

std::string dataset_report_json(const Dataset& dataset, const PipelineConfig& cfg, std::uint64_t cap_samples) {
  Json j;
  j["config_digest"] = config_digest(cfg);
  j["images"] = dataset.image_count();

  const auto table = distance_stats(dataset);
  Json dt;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Json row;
    for (std::size_t c = 0; c < table.rows[r].fixed.size(); ++c) {
      row["V" + std::to_string(c + 1)] = table.rows[r].fixed[c];
    }
    row["Vd"] = table.rows[r].selected;
    row["clusters"] = table.rows[r].clusters;
    std::string name = kRowNames[r];
    name[0] = static_cast<char>(name[0] - 'A' + 'a');
    dt[name] = row;
  }
  j["distance_table_km"] = dt;
  j["vd_dominance"] = check_vd_dominance(table);

  const auto pw = pairwise_stats(dataset);
  Json pj;
  for (auto cls : kRadiusClasses) {
    Json pairs = Json::array();
    for (const auto& s : pw.by_class[static_cast<std::size_t>(cls)]) {
      Json sj;
      sj["pair"] = "s" + std::to_string(s.a) + "-s" + std::to_string(s.b);
      sj["min_km"] = s.min_km;
      sj["mean_km"] = s.mean_km;
      sj["max_km"] = s.max_km;
      sj["count"] = s.count;
      pairs.push_back(sj);
    }
    pj[std::string(to_string(cls))] = pairs;
  }
  j["pairwise_distances"] = pj;

  if (cap_samples > 0) {
    Json caps = Json::array();
    for (const auto& c : dataset.config.classes) {
      // Worst case of the generator: central at the far end of the nearest range.
      const double D = c.nearest_target_range_km.hi;
      if (!(c.radius_km < D)) continue;
      Rng rng(derive_seed(dataset.config.master_seed, "cap_asymmetry/" + std::string(to_string(c.radius_class))));
      const auto res = cap_asymmetry(D, c.radius_km, cap_samples, rng);
      Json cj;
      cj["class"] = std::string(to_string(c.radius_class));
      cj["D_km"] = res.D_km;
      cj["r_km"] = res.r_km;
      cj["analytic_fraction"] = res.analytic_fraction;
      cj["empirical_fraction"] = res.empirical_fraction;
      cj["samples"] = res.samples;
      caps.push_back(cj);
    }
    j["cap_asymmetry"] = caps;
  }

  const int k = dataset.config.k();
  Json comm = Json::array();
  for (auto s : {CommStrategy::Selection, CommStrategy::EarlyFusion}) {
    comm.push_back(comm_json(comm_cost(s, k, cfg.image_bytes(), cfg.comm.message_bytes, cfg.comm.link_gbps,
                                       cfg.comm.budget_ms)));
  }
  j["comm_cost"] = comm;
  Json rb;
  rb["distance_km"] = cfg.comm.reaction_distance_km;
  rb["speed_km_s"] = cfg.comm.closing_speed_km_s;
  rb["budget_ms"] = reaction_budget_ms(cfg.comm.reaction_distance_km, cfg.comm.closing_speed_km_s);
  j["reaction_budget"] = rb;
  return j.dump(2) + "\n";
}

}  // namespace scs

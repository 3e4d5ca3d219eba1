#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "scs/cli.hpp"
#include "scs/cluster.hpp"
#include "scs/dataset_io.hpp"
#include "scs/detector.hpp"
#include "scs/error.hpp"
#include "scs/eval.hpp"
#include "scs/fusion.hpp"
#include "scs/orbital.hpp"
#include "scs/stats.hpp"
#include "scs/viewpoint.hpp"

namespace py = pybind11;
using namespace scs;

namespace {

py::tuple vec(const Vec3& v) { return py::make_tuple(v.x, v.y, v.z); }

Vec3 to_vec(const std::vector<double>& v) {
  if (v.size() != 3) throw py::value_error("expected 3 components");
  return {v[0], v[1], v[2]};
}

EvalReport eval_partitions(const Dataset& ds, const std::vector<DetectionSet>& sets) { return evaluate(ds, sets); }

}  // namespace

PYBIND11_MODULE(_scs, m) {
  m.doc() = "Satellite-cluster viewpoint selection simulator";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());

  py::enum_<RadiusClass>(m, "RadiusClass")
      .value("Close", RadiusClass::Close)
      .value("Mid", RadiusClass::Mid)
      .value("Far", RadiusClass::Far);

  py::class_<OrbitalElements>(m, "OrbitalElements")
      .def(py::init<>())
      .def(py::init([](double alt, double inc, double raan, double phase) {
             return OrbitalElements{alt, inc, raan, phase};
           }),
           py::arg("altitude_km"), py::arg("inclination_deg"), py::arg("raan_deg"), py::arg("phase_deg"))
      .def_readwrite("altitude_km", &OrbitalElements::altitude_km)
      .def_readwrite("inclination_deg", &OrbitalElements::inclination_deg)
      .def_readwrite("raan_deg", &OrbitalElements::raan_deg)
      .def_readwrite("phase_deg", &OrbitalElements::phase_deg);

  py::class_<GeodeticCoord>(m, "GeodeticCoord")
      .def_readonly("lat_deg", &GeodeticCoord::lat_deg)
      .def_readonly("lon_deg", &GeodeticCoord::lon_deg)
      .def_readonly("alt_km", &GeodeticCoord::alt_km);

  m.def("orbit_position", [](const OrbitalElements& e) { return vec(orbit_position(e)); });
  m.def("eci_to_geodetic", [](const std::vector<double>& p) { return eci_to_geodetic(to_vec(p)); });

  py::class_<GroundTruthBox>(m, "GroundTruthBox")
      .def_readonly("class_id", &GroundTruthBox::class_id)
      .def_readonly("cx", &GroundTruthBox::cx)
      .def_readonly("cy", &GroundTruthBox::cy)
      .def_readonly("w", &GroundTruthBox::w)
      .def_readonly("h", &GroundTruthBox::h);

  py::class_<ObservationEntry>(m, "ObservationEntry")
      .def_readonly("object_id", &ObservationEntry::object_id)
      .def_readonly("box", &ObservationEntry::box)
      .def_readonly("distance_km", &ObservationEntry::distance_km);

  py::class_<Observation>(m, "Observation")
      .def_readonly("image_id", &Observation::image_id)
      .def_readonly("sat_id", &Observation::sat_id)
      .def_readonly("cluster_id", &Observation::cluster_id)
      .def_readonly("viewpoint_index", &Observation::viewpoint_index)
      .def_readonly("radius_class", &Observation::radius_class)
      .def_readonly("entries", &Observation::entries);

  py::class_<SatelliteState>(m, "SatelliteState")
      .def_readonly("sat_id", &SatelliteState::sat_id)
      .def_property_readonly("position", [](const SatelliteState& s) { return vec(s.position); })
      .def_readonly("geodetic", &SatelliteState::geodetic)
      .def_readonly("elements", &SatelliteState::elements);

  py::class_<TargetObject>(m, "TargetObject")
      .def_readonly("object_id", &TargetObject::object_id)
      .def_property_readonly("position", [](const TargetObject& t) { return vec(t.position); })
      .def_readonly("bounding_radius_m", &TargetObject::bounding_radius_m);

  py::class_<Cluster>(m, "Cluster")
      .def_readonly("cluster_id", &Cluster::cluster_id)
      .def_readonly("radius_class", &Cluster::radius_class)
      .def_readonly("radius_km", &Cluster::radius_km)
      .def_readonly("central", &Cluster::central)
      .def_readonly("secondaries", &Cluster::secondaries)
      .def_readonly("targets", &Cluster::targets);

  py::class_<Scene>(m, "Scene").def_readonly("cluster", &Scene::cluster).def_readonly("views", &Scene::views);

  py::class_<DatasetConfig>(m, "DatasetConfig")
      .def(py::init<>())
      .def_readwrite("master_seed", &DatasetConfig::master_seed)
      .def_readwrite("scenes_per_class", &DatasetConfig::scenes_per_class);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("config", &Dataset::config)
      .def_readonly("scenes", &Dataset::scenes)
      .def("image_count", &Dataset::image_count)
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def(
      "generate_dataset",
      [](int scenes_per_class, std::uint64_t master_seed) {
        DatasetConfig cfg;
        cfg.scenes_per_class = scenes_per_class;
        cfg.master_seed = master_seed;
        return generate_dataset(cfg);
      },
      py::arg("scenes_per_class") = 20, py::arg("master_seed") = 42);

  py::class_<DistanceTable::Row>(m, "DistanceRow")
      .def_readonly("fixed", &DistanceTable::Row::fixed)
      .def_readonly("selected", &DistanceTable::Row::selected)
      .def_readonly("clusters", &DistanceTable::Row::clusters);
  py::class_<DistanceTable>(m, "DistanceTable").def_readonly("rows", &DistanceTable::rows);
  m.def("distance_stats", &distance_stats);
  m.def("check_vd_dominance", &check_vd_dominance);

  py::class_<ViewpointScore>(m, "ViewpointScore")
      .def_readonly("viewpoint_index", &ViewpointScore::viewpoint_index)
      .def_readonly("mean_distance_km", &ViewpointScore::mean_distance_km)
      .def_readonly("visible_count", &ViewpointScore::visible_count);
  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("cluster_id", &SelectionResult::cluster_id)
      .def_readonly("chosen_index", &SelectionResult::chosen_index)
      .def_readonly("scores", &SelectionResult::scores)
      .def("chosen_mean_km", &SelectionResult::chosen_mean_km);
  m.def("select_viewpoint", [](const std::vector<Observation>& views) { return select_viewpoint(views); });
  m.def("select_all", &select_all);

  py::class_<DetectorModel>(m, "DetectorModel")
      .def(py::init<>())
      .def_readwrite("p_max", &DetectorModel::p_max)
      .def_readwrite("area_half_px2", &DetectorModel::area_half_px2)
      .def_readwrite("area_slope", &DetectorModel::area_slope)
      .def_readwrite("center_jitter_frac", &DetectorModel::center_jitter_frac)
      .def_readwrite("size_jitter_frac", &DetectorModel::size_jitter_frac)
      .def_readwrite("fp_rate_per_image", &DetectorModel::fp_rate_per_image)
      .def_readwrite("conf_noise_sigma", &DetectorModel::conf_noise_sigma)
      .def_readwrite("seed", &DetectorModel::seed)
      .def_readwrite("tag", &DetectorModel::tag);
  m.def("noiseless_detector_model", &noiseless_detector_model);

  py::class_<DetectionBox>(m, "DetectionBox")
      .def_readonly("class_id", &DetectionBox::class_id)
      .def_readonly("cx", &DetectionBox::cx)
      .def_readonly("cy", &DetectionBox::cy)
      .def_readonly("w", &DetectionBox::w)
      .def_readonly("h", &DetectionBox::h)
      .def_readonly("confidence", &DetectionBox::confidence);
  py::class_<DetectionSet>(m, "DetectionSet")
      .def_readonly("image_id", &DetectionSet::image_id)
      .def_readonly("boxes", &DetectionSet::boxes)
      .def_readonly("model_tag", &DetectionSet::model_tag);
  m.def("synth_detect_all", &synth_detect_all);

  py::class_<CellScore>(m, "CellScore")
      .def_readonly("map50", &CellScore::map50)
      .def_readonly("map50_95", &CellScore::map50_95)
      .def_readonly("images", &CellScore::images)
      .def_readonly("gt_boxes", &CellScore::gt_boxes);
  py::class_<EvalRow>(m, "EvalRow").def_readonly("label", &EvalRow::label).def_readonly("cells", &EvalRow::cells);
  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("rows", &EvalReport::rows)
      .def("row", &EvalReport::row, py::return_value_policy::reference_internal)
      .def("table", [](const EvalReport& r) { return format_report_table(r); })
      .def("to_json", [](const EvalReport& r) { return report_to_json(r); });
  m.def("evaluate", &eval_partitions);

  py::enum_<FusionMode>(m, "FusionMode").value("Merge", FusionMode::Merge).value("Vote", FusionMode::Vote);
  m.def(
      "fuse_dataset",
      [](const Dataset& ds, const std::vector<DetectionSet>& sets, FusionMode mode) {
        return fuse_dataset(ds, sets, mode, FusionConfig{});
      },
      py::arg("dataset"), py::arg("detections"), py::arg("mode") = FusionMode::Merge);

  py::enum_<CommStrategy>(m, "CommStrategy")
      .value("Selection", CommStrategy::Selection)
      .value("EarlyFusion", CommStrategy::EarlyFusion);
  py::class_<CommCostReport>(m, "CommCostReport")
      .def_readonly("bytes_per_cluster", &CommCostReport::bytes_per_cluster)
      .def_readonly("transfer_ms", &CommCostReport::transfer_ms)
      .def_readonly("within_budget", &CommCostReport::within_budget);
  m.def("comm_cost", &comm_cost, py::arg("strategy"), py::arg("k"), py::arg("image_bytes"),
        py::arg("message_bytes") = kSelectionMessageBytes, py::arg("link_gbps") = 1.0,
        py::arg("budget_ms") = kDefaultReactionBudgetMs);
  m.def("reaction_budget_ms", &reaction_budget_ms);

  m.def("lens_fraction", &lens_fraction);
  py::class_<CapAsymmetryResult>(m, "CapAsymmetryResult")
      .def_readonly("analytic_fraction", &CapAsymmetryResult::analytic_fraction)
      .def_readonly("empirical_fraction", &CapAsymmetryResult::empirical_fraction)
      .def_readonly("samples", &CapAsymmetryResult::samples);
  m.def(
      "cap_asymmetry",
      [](double D, double r, std::uint64_t samples, std::uint64_t seed) {
        Rng rng(seed);
        return cap_asymmetry(D, r, samples, rng);
      },
      py::arg("D_km"), py::arg("r_km"), py::arg("samples") = 1'000'000, py::arg("seed") = 42);

  m.def(
      "export_dataset",
      [](const Dataset& ds, const std::filesystem::path& dir, bool stub_images) {
        return export_dataset(ds, dir, ExportOptions{stub_images}).config_digest;
      },
      py::arg("dataset"), py::arg("directory"), py::arg("stub_images") = false);
  m.def("import_dataset", [](const std::filesystem::path& dir) { return import_dataset(dir).dataset; });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"scs"};
        full.insert(full.end(), args.begin(), args.end());
        std::ostringstream out, err;
        const int code = run_cli(full, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs a CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "indoorlidar/capi.h"

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int default_workers() {
    if (const char* env = std::getenv("ILIDAR_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 1;
}

int check(il_status status) {
    if (status == IL_OK) return 0;
    std::cerr << "error: " << il_last_error() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic indoor LiDAR dataset generator and detection benchmark"};
    app.set_version_flag("--version", il_version());
    app.require_subcommand(1);
    int workers = default_workers();
    app.add_option("-j,--workers", workers,
                   "worker count (env ILIDAR_WORKERS)");

    // generate-scene
    auto* gen = app.add_subcommand("generate-scene",
                                   "Generate a procedural indoor scene file");
    std::string gen_config, gen_out = "scene.json";
    std::uint64_t gen_seed = 0;
    gen->add_option("--config", gen_config, "scene config JSON file");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("-o,--out", gen_out, "output scene file")->required();

    // scan
    auto* scan = app.add_subcommand("scan", "Simulate one frame from a scene file");
    std::string scan_scene, scan_sensor, scan_out, scan_frame_id = "000000";
    std::vector<double> scan_pose;
    std::uint64_t scan_seed = 0, scan_timestamp = 0;
    int scan_min_points = 1;
    scan->add_option("--scene", scan_scene, "scene file")->required();
    scan->add_option("--pose", scan_pose,
                     "sensor pose: x y z yaw_deg")->expected(4)->required();
    scan->add_option("--sensor", scan_sensor, "sensor config JSON file");
    scan->add_option("--seed", scan_seed, "noise seed");
    scan->add_option("-o,--out", scan_out, "output sequence directory")->required();
    scan->add_option("--frame-id", scan_frame_id, "frame id");
    scan->add_option("--timestamp", scan_timestamp, "timestamp, nanoseconds");
    scan->add_option("--min-points", scan_min_points,
                     "minimum hits for an object to be labeled");

    // dataset
    auto* dataset = app.add_subcommand("dataset",
                                       "Generate a full KITTI-layout dataset");
    std::string ds_config;
    std::optional<std::string> ds_out;
    std::optional<std::uint64_t> ds_seed;
    std::optional<int> ds_scenes, ds_frames;
    dataset->add_option("--config", ds_config, "run config JSON file");
    dataset->add_option("-o,--out", ds_out, "output root (overrides config)");
    dataset->add_option("--seed", ds_seed, "seed (overrides config)");
    dataset->add_option("--scenes", ds_scenes, "scene count (overrides config)");
    dataset->add_option("--frames", ds_frames,
                        "frames per scene (overrides config)");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate detections against ground truth");
    std::string eval_gt, eval_det, eval_out;
    double eval_threshold = 0.25;
    eval->add_option("--gt", eval_gt, "ground-truth label directory")->required();
    eval->add_option("--det", eval_det, "detection label directory")->required();
    eval->add_option("-o,--out", eval_out, "report output directory")->required();
    eval->add_option("--threshold", eval_threshold, "matching IoU threshold");

    // bev
    auto* bev = app.add_subcommand("bev", "Rasterize a point cloud to a BEV grid");
    std::string bev_cloud, bev_out;
    double bev_cell = 0.1;
    std::vector<double> bev_extent;
    bev->add_option("--cloud", bev_cloud, "point cloud .bin file")->required();
    bev->add_option("--cell", bev_cell, "cell size, meters");
    bev->add_option("--extent", bev_extent,
                    "x_min x_max y_min y_max (default: cloud bounds)")->expected(4);
    bev->add_option("-o,--out", bev_out, "output prefix")->required();

    // info
    auto* info = app.add_subcommand("info", "Dataset statistics");
    std::string info_root;
    info->add_option("root", info_root, "dataset root")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            const std::string config =
                gen_config.empty() ? "" : read_file(gen_config);
            il_scene* scene = nullptr;
            if (int rc = check(il_scene_generate(
                    config.empty() ? nullptr : config.c_str(), gen_seed,
                    &scene))) {
                return rc;
            }
            const int rc = check(il_scene_save(scene, gen_out.c_str()));
            if (rc == 0) {
                std::cout << "wrote " << gen_out << " ("
                          << il_scene_object_count(scene) << " objects)\n";
            }
            il_scene_free(scene);
            return rc;
        }
        if (scan->parsed()) {
            il_scene* scene = nullptr;
            if (int rc = check(il_scene_load(scan_scene.c_str(), &scene))) {
                return rc;
            }
            const std::string sensor =
                scan_sensor.empty() ? "" : read_file(scan_sensor);
            const double pose[4] = {scan_pose[0], scan_pose[1], scan_pose[2],
                                    scan_pose[3] * kDegToRad};
            const int rc = check(il_scan_frame(
                scene, pose, sensor.empty() ? nullptr : sensor.c_str(),
                scan_seed, workers, scan_out.c_str(), scan_frame_id.c_str(),
                scan_timestamp, scan_min_points));
            il_scene_free(scene);
            if (rc == 0) {
                std::cout << "wrote frame " << scan_frame_id << " under "
                          << scan_out << "\n";
            }
            return rc;
        }
        if (dataset->parsed()) {
            nlohmann::json config = ds_config.empty()
                                        ? nlohmann::json::object()
                                        : nlohmann::json::parse(read_file(ds_config));
            if (ds_out) config["output_root"] = *ds_out;
            if (ds_seed) config["seed"] = *ds_seed;
            if (ds_scenes) config["num_scenes"] = *ds_scenes;
            if (ds_frames) config["frames_per_scene"] = *ds_frames;
            const std::string text = config.dump();
            const int rc = check(il_run_dataset(text.c_str(), workers));
            if (rc == 0) {
                std::cout << "dataset written to "
                          << config.value("output_root", std::string("?"))
                          << "\n";
            }
            return rc;
        }
        if (eval->parsed()) {
            const int rc = check(il_evaluate(eval_gt.c_str(), eval_det.c_str(),
                                             eval_out.c_str(), eval_threshold));
            if (rc == 0) {
                std::cout << read_file(eval_out + "/report.txt");
            }
            return rc;
        }
        if (bev->parsed()) {
            const double* extent =
                bev_extent.empty() ? nullptr : bev_extent.data();
            const int rc = check(il_bev_rasterize(bev_cloud.c_str(), bev_cell,
                                                  extent, bev_out.c_str()));
            if (rc == 0) std::cout << "wrote " << bev_out << ".*\n";
            return rc;
        }
        if (info->parsed()) {
            char* out_json = nullptr;
            const int rc =
                check(il_dataset_info(info_root.c_str(), &out_json));
            if (rc == 0) {
                std::cout << out_json;
                il_string_free(out_json);
            }
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

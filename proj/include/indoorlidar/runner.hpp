#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "indoorlidar/eval.hpp"
#include "indoorlidar/scene.hpp"
#include "indoorlidar/sensor.hpp"

namespace ilidar {

inline constexpr const char* kToolVersion = "0.1.0";

struct Waypoint {
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
};

// Either an explicit waypoint path (linear position interpolation,
// shortest-arc yaw) or "spin": room center, one full yaw revolution over
// the frames of a sequence.
struct Trajectory {
    enum class Mode { Spin, Waypoints };
    Mode mode = Mode::Spin;
    double spin_height = 0.5;
    std::vector<Waypoint> waypoints;
};

Pose trajectory_pose(const Trajectory& trajectory, const RoomShell& room,
                     std::uint64_t frame_index, std::uint64_t frame_count);

struct RunConfig {
    std::uint64_t seed = 0;
    std::string output_root;
    int num_scenes = 1;
    int frames_per_scene = 1;
    std::uint64_t frame_period_ns = 100'000'000;
    std::uint64_t start_timestamp_ns = 0;
    int min_points = 1;
    SceneConfig scene;
    SensorConfig sensor;
    Trajectory trajectory;
};

// JSON codecs for the config documents. Parsers accept partial
// documents and fill the remaining fields with defaults; angles are in
// degrees on disk.
SensorConfig sensor_config_from_json(const std::string& text);
std::string sensor_config_to_json(const SensorConfig& config);
SceneConfig scene_config_from_json(const std::string& text);
std::string scene_config_to_json(const SceneConfig& config);
RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& config);

// Generates num_scenes sequences under output_root in the KITTI-style
// layout, plus manifest and provenance. Deterministic in the config;
// workers affects wall time only.
void run_dataset(const RunConfig& config, int workers);

// Frame/class/point statistics of a dataset tree, as JSON.
std::string dataset_info(const std::filesystem::path& dataset_root);

// Label files in det_dir evaluated against same-stem files in gt_dir.
EvalReport evaluate_dirs(const std::filesystem::path& gt_dir,
                         const std::filesystem::path& det_dir,
                         double match_threshold = 0.25);

}  // namespace ilidar

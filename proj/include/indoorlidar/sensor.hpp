#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "indoorlidar/rng.hpp"
#include "indoorlidar/scene.hpp"

namespace ilidar {

struct SensorConfig {
    int channels = 32;
    double vertical_fov_min = -22.5 * M_PI / 180.0;
    double vertical_fov_max = 22.5 * M_PI / 180.0;
    double azimuth_step = 0.1 * M_PI / 180.0;
    double max_range = 50.0;
    double range_noise_sigma = 0.01;
    double dropout_probability = 0.0;
    double intensity_falloff_alpha = 0.01;  // 1/m^2

    int azimuth_count() const;
    std::size_t rays_per_frame() const;
};

void validate_sensor_config(const SensorConfig& config);

// (azimuth, elevation) pairs, elevation-major: channel 0 sweeps all
// azimuths first.
using ScanPattern = std::vector<std::pair<double, double>>;

ScanPattern build_scan_pattern(const SensorConfig& config);

struct ScanPoint {
    float x;
    float y;
    float z;
    float intensity;
};

struct PointCloud {
    std::vector<ScanPoint> points;        // sensor frame
    std::vector<std::int32_t> ray_indices;  // source pattern index per point
    std::uint64_t timestamp_ns = 0;
};

struct ScanResult {
    PointCloud cloud;
    // Points that made it into the cloud, per object.
    std::map<std::int64_t, int> hits_per_object;
    // Nearest-hit counts before dropout, per object (includes kRoomObjectId).
    std::map<std::int64_t, int> raw_hits_per_object;
    int room_hits = 0;  // in-cloud points attributed to the room shell
    Pose sensor_pose;
    std::uint64_t seed = 0;
};

// intensity = clamp(reflectivity * max(0, -n.d) / (1 + alpha * t^2), 0, 1)
double shade_intensity(const Hit& hit, const Ray& ray, double reflectivity,
                       const SensorConfig& config);

// Dropout first, then Gaussian range noise; absent on dropout.
std::optional<double> apply_noise(double clean_range,
                                  const SensorConfig& config, CounterRng& rng);

// One full revolution. Deterministic in all arguments; `workers` affects
// wall time only. Ray i uses the random stream (seed, frame_index, i).
ScanResult simulate_scan(const Scene& scene, const Pose& sensor_pose,
                         const ScanPattern& pattern, const SensorConfig& config,
                         std::uint64_t seed, int workers = 1,
                         std::uint64_t frame_index = 0);

}  // namespace ilidar

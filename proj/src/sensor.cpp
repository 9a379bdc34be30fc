#include "indoorlidar/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ilidar {

int SensorConfig::azimuth_count() const {
    return static_cast<int>(std::ceil(2.0 * M_PI / azimuth_step));
}

std::size_t SensorConfig::rays_per_frame() const {
    return static_cast<std::size_t>(channels) *
           static_cast<std::size_t>(azimuth_count());
}

void validate_sensor_config(const SensorConfig& config) {
    if (config.channels < 1) {
        throw std::invalid_argument("sensor config: channels must be >= 1");
    }
    if (config.channels > 1 &&
        !(config.vertical_fov_min < config.vertical_fov_max)) {
        throw std::invalid_argument("sensor config: degenerate vertical FOV");
    }
    if (!(config.azimuth_step > 0.0) || config.azimuth_step >= 2.0 * M_PI) {
        throw std::invalid_argument(
            "sensor config: azimuth_step must be in (0, 2*pi)");
    }
    if (!(config.max_range > 0.0)) {
        throw std::invalid_argument("sensor config: max_range must be > 0");
    }
    if (config.range_noise_sigma < 0.0) {
        throw std::invalid_argument("sensor config: negative noise sigma");
    }
    if (config.dropout_probability < 0.0 || config.dropout_probability >= 1.0) {
        throw std::invalid_argument(
            "sensor config: dropout_probability must be in [0, 1)");
    }
}

ScanPattern build_scan_pattern(const SensorConfig& config) {
    validate_sensor_config(config);
    const int n_az = config.azimuth_count();
    ScanPattern pattern;
    pattern.reserve(config.rays_per_frame());
    for (int ch = 0; ch < config.channels; ++ch) {
        const double elevation =
            config.channels == 1
                ? 0.5 * (config.vertical_fov_min + config.vertical_fov_max)
                : config.vertical_fov_min +
                      ch * (config.vertical_fov_max - config.vertical_fov_min) /
                          (config.channels - 1);
        for (int k = 0; k < n_az; ++k) {
            pattern.emplace_back(k * config.azimuth_step, elevation);
        }
    }
    return pattern;
}

double shade_intensity(const Hit& hit, const Ray& ray, double reflectivity,
                       const SensorConfig& config) {
    const double cosine = std::max(0.0, -hit.surface_normal.dot(ray.direction));
    const double falloff =
        1.0 + config.intensity_falloff_alpha * hit.range_t * hit.range_t;
    return std::clamp(reflectivity * cosine / falloff, 0.0, 1.0);
}

std::optional<double> apply_noise(double clean_range,
                                  const SensorConfig& config, CounterRng& rng) {
    if (!(clean_range > 0.0)) {
        throw std::invalid_argument("apply_noise: clean_range must be > 0");
    }
    // Dropout draw comes first so the stream layout does not depend on
    // the noise settings.
    const double u = rng.next_double();
    if (u < config.dropout_probability) return std::nullopt;
    double range = clean_range;
    if (config.range_noise_sigma > 0.0) {
        range = rng.gaussian(clean_range, config.range_noise_sigma);
        range = std::max(range, kRayTMin);
    }
    return range;
}

namespace {

// Per-object data reused across all rays of a frame: cached inverse
// rotation and a world AABB for early rejection.
struct SceneEntry {
    const ObjectInstance* obj;
    Mat3 rot_t;
    Vec3 aabb_min;
    Vec3 aabb_max;
};

}  // namespace

ScanResult simulate_scan(const Scene& scene, const Pose& sensor_pose,
                         const ScanPattern& pattern, const SensorConfig& config,
                         std::uint64_t seed, int workers,
                         std::uint64_t frame_index) {
    validate_sensor_config(config);
    if (!sensor_pose.is_rigid(1e-9)) {
        throw std::invalid_argument("simulate_scan: sensor pose not rigid");
    }
    if (pattern.size() != config.rays_per_frame()) {
        throw std::invalid_argument(
            "simulate_scan: pattern does not match sensor config");
    }
    if (!validate_scene(scene).empty()) {
        throw std::invalid_argument("simulate_scan: scene fails validation");
    }

    std::vector<SceneEntry> entries;
    entries.reserve(scene.objects.size());
    for (const auto& obj : scene.objects) {
        SceneEntry e;
        e.obj = &obj;
        e.rot_t = obj.pose.rotation.transpose();
        object_world_aabb(obj, e.aabb_min, e.aabb_max);
        entries.push_back(e);
    }
    // An all-zero room means no shell (validated above); real dimensions
    // are strictly positive.
    const bool has_room = scene.room.width > 0.0;
    const Vec3 room_half(scene.room.width / 2.0, scene.room.depth / 2.0,
                         scene.room.height / 2.0);
    const Primitive room_box =
        BoxPrim{has_room ? room_half : Vec3::Ones()};

    const std::size_t n = pattern.size();
    struct RaySlot {
        ScanPoint point;
        std::int64_t raw_hit = -1;  // nearest object pre-dropout, -1 = none
        bool has_point = false;
    };
    std::vector<RaySlot> slots(n);

    auto trace_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Vec3 local_dir =
                ray_direction(pattern[i].first, pattern[i].second);
            const Ray world_ray{sensor_pose.translation,
                                sensor_pose.rotation * local_dir};

            double best_t = config.max_range;
            Vec3 best_normal = Vec3::Zero();
            std::int64_t best_id = -1;
            double best_refl = 0.0;

            for (const auto& e : entries) {
                const auto span =
                    intersect_aabb(world_ray, e.aabb_min, e.aabb_max);
                if (!span || span->first > best_t || span->second < kRayTMin) {
                    continue;
                }
                const Ray local{
                    e.rot_t * (world_ray.origin - e.obj->pose.translation),
                    e.rot_t * world_ray.direction};
                const auto hit = intersect_primitive_full(local, e.obj->primitive);
                if (!hit || hit->t >= best_t) continue;
                best_t = hit->t;
                best_normal = e.obj->pose.rotation * hit->normal;
                best_id = e.obj->object_id;
                best_refl = e.obj->reflectivity;
            }
            if (has_room) {
                const Ray centered{world_ray.origin - room_half,
                                   world_ray.direction};
                const auto hit = intersect_primitive_full(centered, room_box);
                if (hit && hit->t < best_t) {
                    best_t = hit->t;
                    best_normal = hit->normal;
                    best_id = kRoomObjectId;
                    best_refl = scene.room.reflectivity;
                }
            }
            if (best_id < 0) continue;
            if (best_normal.dot(world_ray.direction) > 0.0) {
                best_normal = -best_normal;
            }

            slots[i].raw_hit = best_id;

            CounterRng rng(derive_stream(seed, frame_index, i));
            const auto range = apply_noise(best_t, config, rng);
            if (!range) continue;

            const Hit hit{best_t, best_id, best_normal, world_ray.at(best_t)};
            const double intensity =
                shade_intensity(hit, world_ray, best_refl, config);
            const Vec3 p = *range * local_dir;
            slots[i].point = {static_cast<float>(p.x()),
                              static_cast<float>(p.y()),
                              static_cast<float>(p.z()),
                              static_cast<float>(intensity)};
            slots[i].has_point = true;
        }
    };

    workers = std::max(1, workers);
    if (workers == 1 || n < 2) {
        trace_range(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(n, w * chunk);
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(trace_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    ScanResult result;
    result.sensor_pose = sensor_pose;
    result.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& slot = slots[i];
        if (slot.raw_hit >= 0) ++result.raw_hits_per_object[slot.raw_hit];
        if (!slot.has_point) continue;
        result.cloud.points.push_back(slot.point);
        result.cloud.ray_indices.push_back(static_cast<std::int32_t>(i));
        if (slot.raw_hit == kRoomObjectId) {
            ++result.room_hits;
        } else {
            ++result.hits_per_object[slot.raw_hit];
        }
    }
    return result;
}

}  // namespace ilidar

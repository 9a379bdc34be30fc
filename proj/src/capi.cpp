#include "indoorlidar/capi.h"

#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "indoorlidar/annotate.hpp"
#include "indoorlidar/bev.hpp"
#include "indoorlidar/runner.hpp"
#include "indoorlidar/storage.hpp"

namespace {

thread_local std::string g_last_error;

il_status fail(il_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
il_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ilidar::KittiParseError& e) {
        return fail(IL_ERROR_PARSE, e.what());
    } catch (const ilidar::StorageError& e) {
        return fail(IL_ERROR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(IL_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(IL_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(IL_ERROR_INTERNAL, "unknown error");
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct il_scene {
    ilidar::Scene scene;
};

extern "C" {

const char* il_version(void) { return ilidar::kToolVersion; }

const char* il_last_error(void) { return g_last_error.c_str(); }

il_status il_scene_generate(const char* scene_config_json, uint64_t seed,
                            il_scene** out_scene) {
    return guarded([&]() {
        if (!out_scene) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "out_scene is NULL");
        }
        const ilidar::SceneConfig config =
            scene_config_json
                ? ilidar::scene_config_from_json(scene_config_json)
                : ilidar::default_scene_config();
        *out_scene = new il_scene{ilidar::generate_scene(config, seed).scene};
        return IL_OK;
    });
}

il_status il_scene_load(const char* path, il_scene** out_scene) {
    return guarded([&]() {
        if (!path || !out_scene) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "NULL argument");
        }
        *out_scene = new il_scene{ilidar::read_scene(path)};
        return IL_OK;
    });
}

il_status il_scene_save(const il_scene* scene, const char* path) {
    return guarded([&]() {
        if (!scene || !path) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "NULL argument");
        }
        ilidar::write_scene(scene->scene, path);
        return IL_OK;
    });
}

il_status il_scene_validate(const il_scene* scene, int* violation_count,
                            char** report_json) {
    return guarded([&]() {
        if (!scene) return fail(IL_ERROR_INVALID_ARGUMENT, "scene is NULL");
        const auto violations = ilidar::validate_scene(scene->scene);
        if (violation_count) {
            *violation_count = static_cast<int>(violations.size());
        }
        if (report_json) {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& v : violations) {
                j.push_back({{"object_a", v.object_a},
                             {"object_b", v.object_b},
                             {"message", v.message}});
            }
            *report_json = copy_string(j.dump(2));
        }
        return IL_OK;
    });
}

int il_scene_object_count(const il_scene* scene) {
    return scene ? static_cast<int>(scene->scene.objects.size()) : -1;
}

void il_scene_free(il_scene* scene) { delete scene; }

il_status il_scan_frame(const il_scene* scene, const double pose_xyzyaw[4],
                        const char* sensor_config_json, uint64_t seed,
                        int workers, const char* out_dir, const char* frame_id,
                        uint64_t timestamp_ns, int min_points) {
    return guarded([&]() {
        if (!scene || !pose_xyzyaw || !out_dir || !frame_id) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "NULL argument");
        }
        const ilidar::SensorConfig config =
            sensor_config_json
                ? ilidar::sensor_config_from_json(sensor_config_json)
                : ilidar::SensorConfig{};
        const ilidar::Pose pose = ilidar::Pose::from_yaw(
            pose_xyzyaw[3],
            ilidar::Vec3(pose_xyzyaw[0], pose_xyzyaw[1], pose_xyzyaw[2]));
        const ilidar::ScanPattern pattern = ilidar::build_scan_pattern(config);
        const ilidar::ScanResult result = ilidar::simulate_scan(
            scene->scene, pose, pattern, config, seed, workers);
        ilidar::FrameRecord record;
        record.frame_id = frame_id;
        record.cloud = result.cloud;
        record.labels =
            ilidar::extract_annotations(scene->scene, result, min_points);
        record.timestamp_ns = timestamp_ns;
        record.sensor_pose = pose;
        ilidar::write_frame(record, out_dir);
        return IL_OK;
    });
}

il_status il_run_dataset(const char* run_config_json, int workers) {
    return guarded([&]() {
        if (!run_config_json) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "run_config_json is NULL");
        }
        const ilidar::RunConfig config =
            ilidar::run_config_from_json(run_config_json);
        ilidar::run_dataset(config, workers);
        return IL_OK;
    });
}

il_status il_evaluate(const char* gt_dir, const char* det_dir,
                      const char* out_dir, double match_threshold) {
    return guarded([&]() {
        if (!gt_dir || !det_dir) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "NULL directory");
        }
        const ilidar::EvalReport report =
            ilidar::evaluate_dirs(gt_dir, det_dir, match_threshold);
        if (out_dir) {
            std::filesystem::create_directories(out_dir);
            std::ofstream txt(std::filesystem::path(out_dir) / "report.txt");
            txt << ilidar::render_report_table(report);
            std::ofstream js(std::filesystem::path(out_dir) / "report.json");
            js << ilidar::report_to_json(report);
            if (!txt || !js) {
                return fail(IL_ERROR_IO, std::string("cannot write report to ") +
                                             out_dir);
            }
        }
        return IL_OK;
    });
}

il_status il_bev_rasterize(const char* cloud_path, double cell_size,
                           const double* extent, const char* out_prefix) {
    return guarded([&]() {
        if (!cloud_path || !out_prefix) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "NULL argument");
        }
        const ilidar::PointCloud cloud = ilidar::read_cloud(cloud_path);
        ilidar::BevExtent e;
        if (extent) {
            e = {extent[0], extent[1], extent[2], extent[3]};
        } else {
            double lo_x = -1.0, hi_x = 1.0, lo_y = -1.0, hi_y = 1.0;
            for (const auto& p : cloud.points) {
                lo_x = std::min(lo_x, static_cast<double>(p.x));
                hi_x = std::max(hi_x, static_cast<double>(p.x));
                lo_y = std::min(lo_y, static_cast<double>(p.y));
                hi_y = std::max(hi_y, static_cast<double>(p.y));
            }
            // Nudge the max edge out so boundary points stay in extent.
            e = {std::floor(lo_x), std::ceil(hi_x) + 1e-6, std::floor(lo_y),
                 std::ceil(hi_y) + 1e-6};
        }
        const ilidar::BevGrid grid = ilidar::rasterize_bev(cloud, cell_size, e);
        ilidar::write_bev_grid(grid, out_prefix);
        return IL_OK;
    });
}

il_status il_dataset_info(const char* dataset_root, char** out_json) {
    return guarded([&]() {
        if (!dataset_root || !out_json) {
            return fail(IL_ERROR_INVALID_ARGUMENT, "NULL argument");
        }
        *out_json = copy_string(ilidar::dataset_info(dataset_root));
        return IL_OK;
    });
}

void il_string_free(char* s) { delete[] s; }

}  // extern "C"

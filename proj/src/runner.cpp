#include "indoorlidar/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "indoorlidar/annotate.hpp"
#include "indoorlidar/rng.hpp"
#include "indoorlidar/storage.hpp"

namespace ilidar {

namespace {

using json = nlohmann::ordered_json;

constexpr double kDegToRad = M_PI / 180.0;

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string(what) + ": " + e.what());
    }
}

Vec3 vec3_from(const json& j) {
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
                j.at(2).get<double>());
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const char* shape_name(ShapeKind shape) {
    switch (shape) {
        case ShapeKind::Box: return "box";
        case ShapeKind::Sphere: return "sphere";
        case ShapeKind::Cylinder: return "cylinder";
        case ShapeKind::StairsMesh: return "stairs";
    }
    return "box";
}

ShapeKind shape_from_name(const std::string& name) {
    if (name == "box") return ShapeKind::Box;
    if (name == "sphere") return ShapeKind::Sphere;
    if (name == "cylinder") return ShapeKind::Cylinder;
    if (name == "stairs") return ShapeKind::StairsMesh;
    throw std::runtime_error("unknown shape: " + name);
}

SensorConfig sensor_config_from(const json& j) {
    SensorConfig cfg;
    cfg.channels = j.value("channels", cfg.channels);
    if (j.contains("vertical_fov_deg")) {
        cfg.vertical_fov_min = j["vertical_fov_deg"].at(0).get<double>() * kDegToRad;
        cfg.vertical_fov_max = j["vertical_fov_deg"].at(1).get<double>() * kDegToRad;
    }
    if (j.contains("azimuth_step_deg")) {
        cfg.azimuth_step = j["azimuth_step_deg"].get<double>() * kDegToRad;
    }
    cfg.max_range = j.value("max_range", cfg.max_range);
    cfg.range_noise_sigma = j.value("range_noise_sigma", cfg.range_noise_sigma);
    cfg.dropout_probability =
        j.value("dropout_probability", cfg.dropout_probability);
    cfg.intensity_falloff_alpha =
        j.value("intensity_falloff_alpha", cfg.intensity_falloff_alpha);
    validate_sensor_config(cfg);
    return cfg;
}

json sensor_config_to(const SensorConfig& cfg) {
    json j;
    j["channels"] = cfg.channels;
    j["vertical_fov_deg"] = {cfg.vertical_fov_min / kDegToRad,
                             cfg.vertical_fov_max / kDegToRad};
    j["azimuth_step_deg"] = cfg.azimuth_step / kDegToRad;
    j["max_range"] = cfg.max_range;
    j["range_noise_sigma"] = cfg.range_noise_sigma;
    j["dropout_probability"] = cfg.dropout_probability;
    j["intensity_falloff_alpha"] = cfg.intensity_falloff_alpha;
    return j;
}

SceneConfig scene_config_from(const json& j) {
    SceneConfig cfg = default_scene_config();
    if (j.contains("room_min")) cfg.room_min = vec3_from(j["room_min"]);
    if (j.contains("room_max")) cfg.room_max = vec3_from(j["room_max"]);
    cfg.placement_tolerance =
        j.value("placement_tolerance", cfg.placement_tolerance);
    if (j.contains("classes")) {
        cfg.classes.clear();
        for (const auto& c : j["classes"]) {
            ClassConfig cc;
            cc.class_label = c.at("class").get<std::string>();
            cc.shape = shape_from_name(c.value("shape", "box"));
            cc.mount = c.value("mount", "floor") == std::string("wall")
                           ? MountKind::Wall
                           : MountKind::Floor;
            cc.count_min = c.at("count").at(0).get<int>();
            cc.count_max = c.at("count").at(1).get<int>();
            cc.size_min = vec3_from(c.at("size_min"));
            cc.size_max = vec3_from(c.at("size_max"));
            if (c.contains("reflectivity")) {
                cc.reflectivity_min = c["reflectivity"].at(0).get<double>();
                cc.reflectivity_max = c["reflectivity"].at(1).get<double>();
            }
            cfg.classes.push_back(std::move(cc));
        }
    }
    validate_scene_config(cfg);
    return cfg;
}

json scene_config_to(const SceneConfig& cfg) {
    json j;
    j["room_min"] = vec3_to(cfg.room_min);
    j["room_max"] = vec3_to(cfg.room_max);
    j["placement_tolerance"] = cfg.placement_tolerance;
    json classes = json::array();
    for (const auto& c : cfg.classes) {
        json cj;
        cj["class"] = c.class_label;
        cj["shape"] = shape_name(c.shape);
        cj["mount"] = c.mount == MountKind::Wall ? "wall" : "floor";
        cj["count"] = {c.count_min, c.count_max};
        cj["size_min"] = vec3_to(c.size_min);
        cj["size_max"] = vec3_to(c.size_max);
        cj["reflectivity"] = {c.reflectivity_min, c.reflectivity_max};
        classes.push_back(std::move(cj));
    }
    j["classes"] = std::move(classes);
    return j;
}

Trajectory trajectory_from(const json& j) {
    Trajectory t;
    const std::string mode = j.value("mode", "spin");
    if (mode == "spin") {
        t.mode = Trajectory::Mode::Spin;
        t.spin_height = j.value("height", t.spin_height);
    } else if (mode == "waypoints") {
        t.mode = Trajectory::Mode::Waypoints;
        for (const auto& w : j.at("waypoints")) {
            Waypoint wp;
            wp.position = Vec3(w.at(0), w.at(1), w.at(2));
            wp.yaw = w.at(3).get<double>() * kDegToRad;
            t.waypoints.push_back(wp);
        }
        if (t.waypoints.empty()) {
            throw std::runtime_error("trajectory: waypoints must be non-empty");
        }
    } else {
        throw std::runtime_error("trajectory: unknown mode " + mode);
    }
    return t;
}

json trajectory_to(const Trajectory& t) {
    json j;
    if (t.mode == Trajectory::Mode::Spin) {
        j["mode"] = "spin";
        j["height"] = t.spin_height;
    } else {
        j["mode"] = "waypoints";
        json wps = json::array();
        for (const auto& w : t.waypoints) {
            wps.push_back({w.position.x(), w.position.y(), w.position.z(),
                           w.yaw / kDegToRad});
        }
        j["waypoints"] = std::move(wps);
    }
    return j;
}

}  // namespace

SensorConfig sensor_config_from_json(const std::string& text) {
    return sensor_config_from(parse(text, "sensor config"));
}

std::string sensor_config_to_json(const SensorConfig& config) {
    return sensor_config_to(config).dump(2) + "\n";
}

SceneConfig scene_config_from_json(const std::string& text) {
    return scene_config_from(parse(text, "scene config"));
}

std::string scene_config_to_json(const SceneConfig& config) {
    return scene_config_to(config).dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
    const json j = parse(text, "run config");
    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_root = j.value("output_root", cfg.output_root);
    cfg.num_scenes = j.value("num_scenes", cfg.num_scenes);
    cfg.frames_per_scene = j.value("frames_per_scene", cfg.frames_per_scene);
    cfg.frame_period_ns = j.value("frame_period_ns", cfg.frame_period_ns);
    cfg.start_timestamp_ns =
        j.value("start_timestamp_ns", cfg.start_timestamp_ns);
    cfg.min_points = j.value("min_points", cfg.min_points);
    cfg.scene = scene_config_from(j.value("scene", json::object()));
    cfg.sensor = sensor_config_from(j.value("sensor", json::object()));
    if (j.contains("trajectory")) {
        cfg.trajectory = trajectory_from(j["trajectory"]);
    }
    if (cfg.num_scenes < 1 || cfg.frames_per_scene < 1 ||
        cfg.frame_period_ns == 0 || cfg.min_points < 1) {
        throw std::runtime_error("run config: counts and period must be >= 1");
    }
    return cfg;
}

std::string run_config_to_json(const RunConfig& config) {
    json j;
    j["tool_version"] = kToolVersion;
    j["seed"] = config.seed;
    j["output_root"] = config.output_root;
    j["num_scenes"] = config.num_scenes;
    j["frames_per_scene"] = config.frames_per_scene;
    j["frame_period_ns"] = config.frame_period_ns;
    j["start_timestamp_ns"] = config.start_timestamp_ns;
    j["min_points"] = config.min_points;
    j["scene"] = scene_config_to(config.scene);
    j["sensor"] = sensor_config_to(config.sensor);
    j["trajectory"] = trajectory_to(config.trajectory);
    return j.dump(2) + "\n";
}

Pose trajectory_pose(const Trajectory& trajectory, const RoomShell& room,
                     std::uint64_t frame_index, std::uint64_t frame_count) {
    if (trajectory.mode == Trajectory::Mode::Spin) {
        const double z = std::min(trajectory.spin_height, room.height / 2.0);
        const double yaw =
            frame_count > 0
                ? 2.0 * M_PI * static_cast<double>(frame_index) / frame_count
                : 0.0;
        return Pose::from_yaw(
            yaw, Vec3(room.width / 2.0, room.depth / 2.0, z));
    }
    const auto& wps = trajectory.waypoints;
    if (wps.size() == 1 || frame_count <= 1) {
        return Pose::from_yaw(wps.front().yaw, wps.front().position);
    }
    const double s = static_cast<double>(frame_index) / (frame_count - 1) *
                     (wps.size() - 1);
    const std::size_t seg =
        std::min(static_cast<std::size_t>(s), wps.size() - 2);
    const double u = s - seg;
    const Waypoint& a = wps[seg];
    const Waypoint& b = wps[seg + 1];
    const Vec3 position = (1.0 - u) * a.position + u * b.position;
    // Shortest-arc yaw interpolation.
    const double delta = normalize_yaw(b.yaw - a.yaw);
    return Pose::from_yaw(normalize_yaw(a.yaw + u * delta), position);
}

namespace {

void run_sequence(const RunConfig& config, int scene_index,
                  const ScanPattern& pattern,
                  const std::filesystem::path& root) {
    const std::uint64_t scene_seed =
        derive_stream(config.seed, static_cast<std::uint64_t>(scene_index));
    const GeneratedScene generated = generate_scene(config.scene, scene_seed);
    const Scene& scene = generated.scene;

    char seq_name[16];
    std::snprintf(seq_name, sizeof(seq_name), "%04d", scene_index);
    const std::filesystem::path seq_dir = root / seq_name;
    std::filesystem::create_directories(seq_dir);
    write_scene(scene, seq_dir / "scene.json");
    if (!generated.drops.empty()) {
        json drops = json::array();
        for (const auto& d : generated.drops) {
            drops.push_back({{"class", d.class_label},
                             {"reason", d.reason},
                             {"attempts", d.attempts}});
        }
        std::ofstream out(seq_dir / "generation_log.json");
        out << drops.dump(2) << "\n";
    }

    for (int f = 0; f < config.frames_per_scene; ++f) {
        const Pose pose = trajectory_pose(config.trajectory, scene.room, f,
                                          config.frames_per_scene);
        const ScanResult result =
            simulate_scan(scene, pose, pattern, config.sensor, scene_seed,
                          /*workers=*/1, static_cast<std::uint64_t>(f));
        FrameRecord record;
        record.frame_id = make_frame_id(f);
        record.cloud = result.cloud;
        record.labels = extract_annotations(scene, result, config.min_points);
        record.timestamp_ns =
            config.start_timestamp_ns + f * config.frame_period_ns;
        record.sensor_pose = pose;
        write_frame(record, seq_dir);
    }
}

}  // namespace

void run_dataset(const RunConfig& config, int workers) {
    if (config.output_root.empty()) {
        throw std::runtime_error("run config: output_root is required");
    }
    const std::filesystem::path root = config.output_root;
    std::filesystem::create_directories(root);
    if (std::filesystem::exists(root / "manifest.json")) {
        throw std::runtime_error("output root already holds a dataset: " +
                                 root.string());
    }
    {
        std::ofstream out(root / "run_config.json");
        if (!out) {
            throw std::runtime_error("cannot write run_config.json in " +
                                     root.string());
        }
        out << run_config_to_json(config);
    }

    const ScanPattern pattern = build_scan_pattern(config.sensor);

    workers = std::max(1, workers);
    std::atomic<int> next_scene{0};
    std::vector<std::exception_ptr> errors(workers);
    auto worker_loop = [&](int widx) {
        try {
            for (;;) {
                const int scene_index = next_scene.fetch_add(1);
                if (scene_index >= config.num_scenes) return;
                run_sequence(config, scene_index, pattern, root);
            }
        } catch (...) {
            errors[widx] = std::current_exception();
        }
    };
    if (workers == 1 || config.num_scenes == 1) {
        worker_loop(0);
    } else {
        std::vector<std::thread> pool;
        const int n = std::min(workers, config.num_scenes);
        for (int w = 0; w < n; ++w) pool.emplace_back(worker_loop, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    DatasetManifest manifest;
    manifest.taxonomy = config.scene.taxonomy();
    for (int s = 0; s < config.num_scenes; ++s) {
        char seq_name[16];
        std::snprintf(seq_name, sizeof(seq_name), "%04d", s);
        manifest.sequences.emplace_back(seq_name);
        for (int f = 0; f < config.frames_per_scene; ++f) {
            const std::string frame_id = make_frame_id(f);
            manifest.frames.push_back(
                {seq_name, frame_id, assign_split(seq_name, frame_id)});
        }
    }
    write_manifest(manifest, root);
}

std::string dataset_info(const std::filesystem::path& dataset_root) {
    const DatasetManifest manifest = read_manifest(dataset_root);
    std::uint64_t total_points = 0;
    std::uint64_t frames = 0;
    double extent_m2 = 0.0;
    std::set<std::string> classes_seen;
    bool intensity_ok = true;
    std::uint64_t frames_full_coverage = 0;

    for (const auto& seq : manifest.sequences) {
        const std::filesystem::path seq_dir = dataset_root / seq;
        if (std::filesystem::exists(seq_dir / "scene.json")) {
            const Scene scene = read_scene(seq_dir / "scene.json");
            extent_m2 += scene.room.width * scene.room.depth;
        }
        for (const auto& entry : std::filesystem::directory_iterator(
                 seq_dir / "velodyne")) {
            if (entry.path().extension() != ".bin") continue;
            ++frames;
            const PointCloud cloud = read_cloud(entry.path());
            total_points += cloud.points.size();
            bool octant[8] = {};
            for (const auto& p : cloud.points) {
                if (p.intensity < 0.0f || p.intensity > 1.0f) {
                    intensity_ok = false;
                }
                const double az = std::atan2(p.y, p.x);
                int o = static_cast<int>(std::floor((az + M_PI) / (M_PI / 4.0)));
                o = std::clamp(o, 0, 7);
                octant[o] = true;
            }
            if (std::all_of(std::begin(octant), std::end(octant),
                            [](bool b) { return b; })) {
                ++frames_full_coverage;
            }
            const std::filesystem::path label =
                seq_dir / "label_2" / (entry.path().stem().string() + ".txt");
            if (std::filesystem::exists(label)) {
                for (const auto& box : parse_kitti_file(label.string())) {
                    classes_seen.insert(box.class_label);
                }
            }
        }
    }

    json j;
    j["sequences"] = manifest.sequences.size();
    j["frames"] = frames;
    j["classes"] = manifest.taxonomy.size();
    j["classes_observed"] = classes_seen.size();
    j["extent_m2"] = extent_m2;
    j["points"] = total_points;
    j["points_million"] = static_cast<double>(total_points) / 1e6;
    j["full_360_coverage"] =
        frames > 0 && frames_full_coverage == frames;
    j["frames_with_full_360"] = frames_full_coverage;
    j["intensity"] = intensity_ok;
    return j.dump(2) + "\n";
}

EvalReport evaluate_dirs(const std::filesystem::path& gt_dir,
                         const std::filesystem::path& det_dir,
                         double match_threshold) {
    std::vector<std::filesystem::path> gt_files;
    for (const auto& entry : std::filesystem::directory_iterator(gt_dir)) {
        if (entry.path().extension() == ".txt") {
            gt_files.push_back(entry.path());
        }
    }
    std::sort(gt_files.begin(), gt_files.end());
    if (gt_files.empty()) {
        throw std::runtime_error("no ground-truth label files in " +
                                 gt_dir.string());
    }
    std::vector<EvalFrame> frames;
    for (const auto& gt_path : gt_files) {
        EvalFrame frame;
        frame.gts = parse_kitti_file(gt_path.string());
        const std::filesystem::path det_path = det_dir / gt_path.filename();
        if (std::filesystem::exists(det_path)) {
            frame.dets = parse_kitti_file(det_path.string());
        }
        frames.push_back(std::move(frame));
    }
    return compute_report(frames, match_threshold);
}

}  // namespace ilidar

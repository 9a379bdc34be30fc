#include "indoorlidar/storage.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ilidar {

static_assert(std::endian::native == std::endian::little,
              "point cloud serialization assumes a little-endian host");
static_assert(sizeof(ScanPoint) == 16);

using json = nlohmann::ordered_json;

std::string make_frame_id(std::uint64_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06llu",
                  static_cast<unsigned long long>(index));
    return buf;
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open for writing: " + path.string());
    if (!cloud.points.empty()) {
        out.write(reinterpret_cast<const char*>(cloud.points.data()),
                  static_cast<std::streamsize>(cloud.points.size() *
                                               sizeof(ScanPoint)));
    }
    if (!out) throw StorageError("write failed: " + path.string());
}

PointCloud read_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw StorageError("cannot open: " + path.string());
    const auto size = static_cast<std::size_t>(in.tellg());
    if (size % sizeof(ScanPoint) != 0) {
        throw StorageError("corrupt point cloud (size " + std::to_string(size) +
                           " not a multiple of 16): " + path.string());
    }
    PointCloud cloud;
    cloud.points.resize(size / sizeof(ScanPoint));
    in.seekg(0);
    if (!cloud.points.empty()) {
        in.read(reinterpret_cast<char*>(cloud.points.data()),
                static_cast<std::streamsize>(size));
        if (!in) throw StorageError("read failed: " + path.string());
    }
    std::string bad;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const auto& p = cloud.points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
            !std::isfinite(p.intensity)) {
            if (!bad.empty()) bad += ", ";
            bad += std::to_string(i);
        }
    }
    if (!bad.empty()) {
        throw StorageError("non-finite points at indices [" + bad +
                           "]: " + path.string());
    }
    return cloud;
}

namespace {

std::string format_pose_line(const Pose& pose) {
    char buf[512];
    int n = 0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 4; ++c) {
            const double v =
                c < 3 ? pose.rotation(r, c) : pose.translation(r);
            n += std::snprintf(buf + n, sizeof(buf) - n, "%s%.12e",
                               (r == 0 && c == 0) ? "" : " ", v);
        }
    }
    return std::string(buf, n);
}

std::uint64_t read_last_timestamp(const std::filesystem::path& times_path) {
    std::ifstream in(times_path);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    if (last.empty()) return 0;
    std::istringstream iss(last);
    std::string id;
    std::uint64_t ts = 0;
    iss >> id >> ts;
    return ts;
}

}  // namespace

void write_frame(const FrameRecord& record,
                 const std::filesystem::path& sequence_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(sequence_dir / "velodyne");
    fs::create_directories(sequence_dir / "label_2");

    const fs::path bin_path =
        sequence_dir / "velodyne" / (record.frame_id + ".bin");
    if (fs::exists(bin_path)) {
        throw StorageError("frame id already written: " + bin_path.string());
    }
    const fs::path times_path = sequence_dir / "times.txt";
    if (fs::exists(times_path) &&
        record.timestamp_ns <= read_last_timestamp(times_path)) {
        throw StorageError("timestamps must be strictly increasing in " +
                           times_path.string());
    }

    write_cloud(record.cloud, bin_path);
    write_kitti_file(record.labels,
                     (sequence_dir / "label_2" / (record.frame_id + ".txt"))
                         .string());

    std::ofstream times(times_path, std::ios::app);
    times << record.frame_id << " " << record.timestamp_ns << "\n";
    std::ofstream poses(sequence_dir / "poses.txt", std::ios::app);
    poses << format_pose_line(record.sensor_pose) << "\n";
    if (!times || !poses) {
        throw StorageError("append failed in " + sequence_dir.string());
    }
}

std::vector<std::pair<std::string, std::uint64_t>> read_times(
    const std::filesystem::path& sequence_dir) {
    std::ifstream in(sequence_dir / "times.txt");
    if (!in) {
        throw StorageError("cannot open " +
                           (sequence_dir / "times.txt").string());
    }
    std::vector<std::pair<std::string, std::uint64_t>> out;
    std::string id;
    std::uint64_t ts;
    while (in >> id >> ts) out.emplace_back(id, ts);
    return out;
}

std::vector<Pose> read_poses(const std::filesystem::path& sequence_dir) {
    std::ifstream in(sequence_dir / "poses.txt");
    if (!in) {
        throw StorageError("cannot open " +
                           (sequence_dir / "poses.txt").string());
    }
    std::vector<Pose> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream iss(line);
        Pose pose;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                double v;
                if (!(iss >> v)) {
                    throw StorageError("bad pose line: " + line);
                }
                if (c < 3) {
                    pose.rotation(r, c) = v;
                } else {
                    pose.translation(r) = v;
                }
            }
        }
        out.push_back(pose);
    }
    return out;
}

namespace {

json primitive_to_json(const Primitive& prim) {
    json j;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BoxPrim>) {
                j["type"] = "box";
                j["half_extents"] = {p.half_extents.x(), p.half_extents.y(),
                                     p.half_extents.z()};
            } else if constexpr (std::is_same_v<T, SpherePrim>) {
                j["type"] = "sphere";
                j["radius"] = p.radius;
            } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                j["type"] = "cylinder";
                j["radius"] = p.radius;
                j["half_height"] = p.half_height;
            } else {
                j["type"] = "mesh";
                json verts = json::array();
                for (const auto& v : p.vertices) {
                    verts.push_back({v.x(), v.y(), v.z()});
                }
                json tris = json::array();
                for (const auto& t : p.triangles) {
                    tris.push_back({t[0], t[1], t[2]});
                }
                j["vertices"] = std::move(verts);
                j["triangles"] = std::move(tris);
            }
        },
        prim);
    return j;
}

Primitive primitive_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "box") {
        const auto he = j.at("half_extents");
        return BoxPrim{Vec3(he.at(0), he.at(1), he.at(2))};
    }
    if (type == "sphere") {
        return SpherePrim{j.at("radius").get<double>()};
    }
    if (type == "cylinder") {
        return CylinderPrim{j.at("radius").get<double>(),
                            j.at("half_height").get<double>()};
    }
    if (type == "mesh") {
        std::vector<Vec3> verts;
        for (const auto& v : j.at("vertices")) {
            verts.emplace_back(v.at(0), v.at(1), v.at(2));
        }
        std::vector<std::array<std::int32_t, 3>> tris;
        for (const auto& t : j.at("triangles")) {
            tris.push_back({t.at(0).get<std::int32_t>(),
                            t.at(1).get<std::int32_t>(),
                            t.at(2).get<std::int32_t>()});
        }
        return make_mesh(std::move(verts), std::move(tris));
    }
    throw StorageError("unknown primitive type: " + type);
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
    json j;
    j["room"] = {{"width", scene.room.width},
                 {"depth", scene.room.depth},
                 {"height", scene.room.height},
                 {"reflectivity", scene.room.reflectivity}};
    j["seed"] = scene.seed;
    j["taxonomy"] = scene.taxonomy;
    json objs = json::array();
    for (const auto& obj : scene.objects) {
        json o;
        o["id"] = obj.object_id;
        o["class"] = obj.class_label;
        o["position"] = {obj.pose.translation.x(), obj.pose.translation.y(),
                         obj.pose.translation.z()};
        o["yaw"] = obj.pose.yaw();
        o["reflectivity"] = obj.reflectivity;
        o["primitive"] = primitive_to_json(obj.primitive);
        objs.push_back(std::move(o));
    }
    j["objects"] = std::move(objs);
    return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw StorageError(std::string("scene parse error: ") + e.what());
    }
    try {
        Scene scene;
        const auto& room = j.at("room");
        scene.room.width = room.at("width").get<double>();
        scene.room.depth = room.at("depth").get<double>();
        scene.room.height = room.at("height").get<double>();
        scene.room.reflectivity = room.value("reflectivity", 0.6);
        scene.seed = j.at("seed").get<std::uint64_t>();
        scene.taxonomy = j.at("taxonomy").get<std::vector<std::string>>();
        for (const auto& o : j.at("objects")) {
            ObjectInstance obj;
            obj.object_id = o.at("id").get<std::int64_t>();
            obj.class_label = o.at("class").get<std::string>();
            if (std::find(scene.taxonomy.begin(), scene.taxonomy.end(),
                          obj.class_label) == scene.taxonomy.end()) {
                throw StorageError("scene object class not in taxonomy: " +
                                   obj.class_label);
            }
            const auto& pos = o.at("position");
            obj.pose = Pose::from_yaw(
                o.at("yaw").get<double>(),
                Vec3(pos.at(0), pos.at(1), pos.at(2)));
            obj.reflectivity = o.at("reflectivity").get<double>();
            obj.primitive = primitive_from_json(o.at("primitive"));
            scene.objects.push_back(std::move(obj));
        }
        return scene;
    } catch (const json::exception& e) {
        throw StorageError(std::string("scene schema error: ") + e.what());
    }
}

void write_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw StorageError("cannot write scene: " + path.string());
    out << scene_to_json(scene);
}

Scene read_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open scene: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return scene_from_json(ss.str());
}

std::string assign_split(const std::string& sequence,
                         const std::string& frame_id) {
    // FNV-1a over "<sequence>/<frame_id>".
    const std::string key = sequence + "/" + frame_id;
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char ch : key) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ULL;
    }
    const std::uint64_t bucket = h % 100;
    if (bucket < 70) return "train";
    if (bucket < 85) return "val";
    return "test";
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& dataset_root) {
    json j;
    j["format_version"] = manifest.format_version;
    j["taxonomy"] = manifest.taxonomy;
    j["sequences"] = manifest.sequences;
    json frames = json::array();
    for (const auto& f : manifest.frames) {
        frames.push_back({{"sequence", f.sequence},
                          {"frame", f.frame_id},
                          {"split", f.split}});
    }
    j["frames"] = std::move(frames);
    std::ofstream out(dataset_root / "manifest.json");
    if (!out) {
        throw StorageError("cannot write manifest in " + dataset_root.string());
    }
    out << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::filesystem::path& dataset_root) {
    std::ifstream in(dataset_root / "manifest.json");
    if (!in) {
        throw StorageError("cannot open manifest in " + dataset_root.string());
    }
    json j;
    try {
        in >> j;
        DatasetManifest m;
        m.format_version = j.at("format_version").get<std::string>();
        m.taxonomy = j.at("taxonomy").get<std::vector<std::string>>();
        m.sequences = j.at("sequences").get<std::vector<std::string>>();
        for (const auto& f : j.at("frames")) {
            m.frames.push_back({f.at("sequence").get<std::string>(),
                                f.at("frame").get<std::string>(),
                                f.at("split").get<std::string>()});
        }
        return m;
    } catch (const json::exception& e) {
        throw StorageError(std::string("manifest parse error: ") + e.what());
    }
}

}  // namespace ilidar

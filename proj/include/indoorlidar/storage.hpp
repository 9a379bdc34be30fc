#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "indoorlidar/annotate.hpp"
#include "indoorlidar/scene.hpp"
#include "indoorlidar/sensor.hpp"

namespace ilidar {

struct StorageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FrameRecord {
    std::string frame_id;  // zero-padded decimal, unique within a sequence
    PointCloud cloud;
    std::vector<GtBox> labels;
    std::uint64_t timestamp_ns = 0;
    Pose sensor_pose;
};

struct ManifestFrame {
    std::string sequence;
    std::string frame_id;
    std::string split;  // train / val / test
};

struct DatasetManifest {
    std::string format_version = "1";
    std::vector<std::string> taxonomy;
    std::vector<std::string> sequences;
    std::vector<ManifestFrame> frames;
};

std::string make_frame_id(std::uint64_t index);  // 6-digit zero-padded

// N records of 4 little-endian float32 (x, y, z, intensity), no header.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud(const std::filesystem::path& path);

// Writes velodyne/<id>.bin, label_2/<id>.txt, and appends to times.txt
// ("<id> <timestamp>") and poses.txt (row-major 3x4 pose).
void write_frame(const FrameRecord& record,
                 const std::filesystem::path& sequence_dir);

void write_scene(const Scene& scene, const std::filesystem::path& path);
Scene read_scene(const std::filesystem::path& path);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& dataset_root);
DatasetManifest read_manifest(const std::filesystem::path& dataset_root);

// Deterministic 70/15/15 split from a hash of "<sequence>/<frame_id>".
std::string assign_split(const std::string& sequence,
                         const std::string& frame_id);

std::vector<std::pair<std::string, std::uint64_t>> read_times(
    const std::filesystem::path& sequence_dir);
std::vector<Pose> read_poses(const std::filesystem::path& sequence_dir);

}  // namespace ilidar

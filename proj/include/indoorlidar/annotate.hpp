#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "indoorlidar/sensor.hpp"

namespace ilidar {

// Oriented 3D box in the sensor frame. Dimensions are (length, width,
// height); yaw rotates about the vertical axis and is normalized to
// (-pi, pi].
struct GtBox {
    std::string class_label;
    Vec3 center = Vec3::Zero();
    Vec3 dimensions = Vec3::Ones();  // (l, w, h)
    double yaw = 0.0;
    int point_count = 0;
    std::int64_t object_id = 0;
};

struct LabeledBox {
    std::string class_label;
    Vec3 center = Vec3::Zero();
    Vec3 dimensions = Vec3::Ones();  // (l, w, h)
    double yaw = 0.0;
    std::optional<double> score;  // present for detections
};

inline LabeledBox to_labeled(const GtBox& box) {
    return {box.class_label, box.center, box.dimensions, box.yaw, std::nullopt};
}

double normalize_yaw(double yaw);

// The 8 corners of a yaw-rotated box.
std::array<Vec3, 8> box_corners(const Vec3& center, const Vec3& dimensions,
                                double yaw);

// One GtBox per object with at least min_points in-cloud hits, as a
// tight oriented box in the sensor frame, sorted by object_id.
std::vector<GtBox> extract_annotations(const Scene& scene,
                                       const ScanResult& result,
                                       int min_points = 1);

// KITTI label2 line. Camera-only fields are sentinels (truncated 0.00,
// occluded 0, alpha -10, 2D bbox -1 -1 -1 -1); on-disk dimension order
// is (height, width, length); location and rotation_y are in the sensor
// frame.
std::string format_kitti_line(const LabeledBox& box);
std::string format_kitti_line(const GtBox& box);

struct KittiParseError : std::runtime_error {
    KittiParseError(int line_number, int field_index, const std::string& what);
    int line_number;
    int field_index;  // -1 when the field count itself is wrong
};

// Accepts 15 fields (ground truth) or 16 (with trailing score).
LabeledBox parse_kitti_line(const std::string& line, int line_number = 1);

std::vector<LabeledBox> parse_kitti_file(const std::string& path);
void write_kitti_file(const std::vector<GtBox>& boxes, const std::string& path);

}  // namespace ilidar

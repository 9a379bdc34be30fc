#include "indoorlidar/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ilidar {

double normalize_yaw(double yaw) {
    yaw = std::fmod(yaw, 2.0 * M_PI);
    if (yaw > M_PI) yaw -= 2.0 * M_PI;
    if (yaw <= -M_PI) yaw += 2.0 * M_PI;
    return yaw;
}

std::array<Vec3, 8> box_corners(const Vec3& center, const Vec3& dimensions,
                                double yaw) {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    std::array<Vec3, 8> corners;
    int n = 0;
    for (const double sx : {-0.5, 0.5}) {
        for (const double sy : {-0.5, 0.5}) {
            for (const double sz : {-0.5, 0.5}) {
                const double lx = sx * dimensions.x();
                const double ly = sy * dimensions.y();
                corners[n++] = center + Vec3(c * lx - s * ly, s * lx + c * ly,
                                             sz * dimensions.z());
            }
        }
    }
    return corners;
}

namespace {

// Tight oriented box of a primitive in its own frame: center offset and
// (l, w, h) extents.
void primitive_obb(const Primitive& prim, Vec3& center, Vec3& dims) {
    Vec3 lo, hi;
    primitive_aabb(prim, lo, hi);
    center = 0.5 * (lo + hi);
    dims = hi - lo;
}

}  // namespace

std::vector<GtBox> extract_annotations(const Scene& scene,
                                       const ScanResult& result,
                                       int min_points) {
    if (min_points < 1) {
        throw std::invalid_argument("extract_annotations: min_points must be >= 1");
    }
    for (const auto& [id, count] : result.hits_per_object) {
        const bool known = std::any_of(
            scene.objects.begin(), scene.objects.end(),
            [id = id](const ObjectInstance& o) { return o.object_id == id; });
        if (!known) {
            throw std::runtime_error(
                "extract_annotations: scan references unknown object id " +
                std::to_string(id));
        }
    }

    const Pose sensor_inv = result.sensor_pose.inverse();
    std::vector<GtBox> boxes;
    for (const auto& obj : scene.objects) {
        const auto it = result.hits_per_object.find(obj.object_id);
        if (it == result.hits_per_object.end() || it->second < min_points) {
            continue;
        }
        Vec3 local_center, dims;
        primitive_obb(obj.primitive, local_center, dims);
        const Pose rel = sensor_inv * obj.pose;
        GtBox box;
        box.class_label = obj.class_label;
        box.center = rel.apply_point(local_center);
        box.dimensions = dims;
        box.yaw = normalize_yaw(rel.yaw());
        box.point_count = it->second;
        box.object_id = obj.object_id;
        boxes.push_back(std::move(box));
    }
    std::sort(boxes.begin(), boxes.end(),
              [](const GtBox& a, const GtBox& b) {
                  return a.object_id < b.object_id;
              });
    return boxes;
}

namespace {

std::string format_line(const std::string& class_label, const Vec3& center,
                        const Vec3& dims, double yaw,
                        const std::optional<double>& score) {
    if (class_label.empty() ||
        class_label.find_first_of(" \t\r\n") != std::string::npos) {
        throw std::invalid_argument("kitti label: class contains whitespace");
    }
    char buf[384];
    int n = std::snprintf(
        buf, sizeof(buf),
        "%s 0.00 0 -10.000000 -1 -1 -1 -1 %.6f %.6f %.6f %.6f %.6f %.6f %.6f",
        class_label.c_str(), dims.z(), dims.y(), dims.x(), center.x(),
        center.y(), center.z(), yaw);
    std::string line(buf, n);
    if (score) {
        n = std::snprintf(buf, sizeof(buf), " %.6f", *score);
        line.append(buf, n);
    }
    return line;
}

}  // namespace

std::string format_kitti_line(const LabeledBox& box) {
    return format_line(box.class_label, box.center, box.dimensions, box.yaw,
                       box.score);
}

std::string format_kitti_line(const GtBox& box) {
    return format_line(box.class_label, box.center, box.dimensions, box.yaw,
                       std::nullopt);
}

KittiParseError::KittiParseError(int line_number_, int field_index_,
                                 const std::string& what)
    : std::runtime_error("label line " + std::to_string(line_number_) +
                         (field_index_ >= 0
                              ? ", field " + std::to_string(field_index_)
                              : "") +
                         ": " + what),
      line_number(line_number_),
      field_index(field_index_) {}

LabeledBox parse_kitti_line(const std::string& line, int line_number) {
    std::istringstream iss(line);
    std::vector<std::string> fields;
    std::string tok;
    while (iss >> tok) fields.push_back(tok);
    if (fields.size() != 15 && fields.size() != 16) {
        throw KittiParseError(line_number, -1,
                              "expected 15 or 16 fields, got " +
                                  std::to_string(fields.size()));
    }
    auto num = [&](int idx) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(fields[idx], &pos);
        } catch (const std::exception&) {
            throw KittiParseError(line_number, idx, "non-numeric field");
        }
        if (pos != fields[idx].size()) {
            throw KittiParseError(line_number, idx, "non-numeric field");
        }
        if (!std::isfinite(v)) {
            throw KittiParseError(line_number, idx, "non-finite field");
        }
        return v;
    };
    LabeledBox box;
    box.class_label = fields[0];
    const double h = num(8);
    const double w = num(9);
    const double l = num(10);
    box.dimensions = Vec3(l, w, h);
    box.center = Vec3(num(11), num(12), num(13));
    box.yaw = num(14);
    if (fields.size() == 16) box.score = num(15);
    return box;
}

std::vector<LabeledBox> parse_kitti_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label file: " + path);
    std::vector<LabeledBox> boxes;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        boxes.push_back(parse_kitti_line(line, line_number));
    }
    return boxes;
}

void write_kitti_file(const std::vector<GtBox>& boxes,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write label file: " + path);
    for (const auto& box : boxes) out << format_kitti_line(box) << "\n";
}

}  // namespace ilidar

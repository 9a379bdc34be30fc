#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indoorlidar/geometry.hpp"

namespace ilidar {

// object_id of the room shell in Hit records; real objects start at 1.
constexpr std::int64_t kRoomObjectId = 0;

enum class ShapeKind { Box, Sphere, Cylinder, StairsMesh };

enum class MountKind { Floor, Wall };

struct ObjectInstance {
    std::int64_t object_id = 0;
    std::string class_label;
    Pose pose;  // yaw-only rotation by construction
    Primitive primitive;
    double reflectivity = 0.5;
};

struct RoomShell {
    double width = 0.0;   // x extent
    double depth = 0.0;   // y extent
    double height = 0.0;  // z extent
    double reflectivity = 0.6;
};

struct Scene {
    RoomShell room;
    std::vector<ObjectInstance> objects;
    std::uint64_t seed = 0;
    std::vector<std::string> taxonomy;
};

struct ClassConfig {
    std::string class_label;
    ShapeKind shape = ShapeKind::Box;
    MountKind mount = MountKind::Floor;
    int count_min = 0;
    int count_max = 0;
    // Object extent ranges along local x/y/z, meters.
    Vec3 size_min = Vec3(0.5, 0.5, 0.5);
    Vec3 size_max = Vec3(1.0, 1.0, 1.0);
    double reflectivity_min = 0.3;
    double reflectivity_max = 0.9;
};

struct SceneConfig {
    Vec3 room_min = Vec3(6.0, 6.0, 2.5);
    Vec3 room_max = Vec3(14.0, 14.0, 3.5);
    double placement_tolerance = 0.0;  // max allowed AABB overlap, meters
    std::vector<ClassConfig> classes;

    std::vector<std::string> taxonomy() const;
};

struct DropRecord {
    std::string class_label;
    std::string reason;
    int attempts = 0;
};

struct GeneratedScene {
    Scene scene;
    std::vector<DropRecord> drops;
};

struct SceneViolation {
    enum class Kind { DuplicateId, Overlap, OutOfRoom, BadReflectivity, UnknownClass };
    Kind kind;
    std::int64_t object_a = 0;
    std::int64_t object_b = 0;
    std::string message;
};

// The default 20-class indoor taxonomy and per-class shape/size ranges.
SceneConfig default_scene_config();

// Throws std::invalid_argument on a malformed config.
void validate_scene_config(const SceneConfig& config);

// Deterministic in (config, seed). Objects that cannot be placed without
// overlap within 1000 attempts are dropped and logged.
GeneratedScene generate_scene(const SceneConfig& config, std::uint64_t seed);

std::vector<SceneViolation> validate_scene(const Scene& scene);

// World-frame AABB of a posed object.
void object_world_aabb(const ObjectInstance& obj, Vec3& aabb_min,
                       Vec3& aabb_max);

struct Hit {
    double range_t = 0.0;
    std::int64_t object_id = 0;
    Vec3 surface_normal = Vec3::Zero();  // unit, world frame, faces the sensor
    Vec3 hit_point = Vec3::Zero();       // world frame
};

// Nearest positive intersection over all objects and the room shell,
// limited to max_range.
std::optional<Hit> nearest_hit(const Ray& world_ray, const Scene& scene,
                               double max_range);

// Stair-step mesh with the given overall extent, AABB centered at the
// local origin. Steps ascend along +x.
MeshPrim make_stairs_mesh(double run, double width, double rise, int steps = 4);

}  // namespace ilidar

#include "indoorlidar/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "indoorlidar/rng.hpp"

namespace ilidar {

namespace {

constexpr int kMaxPlacementAttempts = 1000;
constexpr double kWallMountMin = 0.8;
constexpr double kWallMountMax = 2.0;

ClassConfig make_class(std::string label, ShapeKind shape, MountKind mount,
                       int cmin, int cmax, Vec3 smin, Vec3 smax) {
    ClassConfig c;
    c.class_label = std::move(label);
    c.shape = shape;
    c.mount = mount;
    c.count_min = cmin;
    c.count_max = cmax;
    c.size_min = smin;
    c.size_max = smax;
    return c;
}

void local_bounds(const ObjectInstance& obj, Vec3& center, Vec3& half) {
    Vec3 lo, hi;
    primitive_aabb(obj.primitive, lo, hi);
    center = 0.5 * (lo + hi);
    half = 0.5 * (hi - lo);
}

bool aabb_overlap_exceeds(const Vec3& min_a, const Vec3& max_a,
                          const Vec3& min_b, const Vec3& max_b, double tol) {
    for (int k = 0; k < 3; ++k) {
        const double overlap =
            std::min(max_a[k], max_b[k]) - std::max(min_a[k], min_b[k]);
        if (overlap <= tol) return false;
    }
    return true;
}

void append_box_mesh(std::vector<Vec3>& verts,
                     std::vector<std::array<std::int32_t, 3>>& tris,
                     const Vec3& lo, const Vec3& hi) {
    const std::int32_t base = static_cast<std::int32_t>(verts.size());
    for (int i = 0; i < 8; ++i) {
        verts.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(),
                           i & 4 ? hi.z() : lo.z());
    }
    static const std::int32_t faces[12][3] = {
        {0, 2, 1}, {1, 2, 3},  // z = lo
        {4, 5, 6}, {5, 7, 6},  // z = hi
        {0, 1, 4}, {1, 5, 4},  // y = lo
        {2, 6, 3}, {3, 6, 7},  // y = hi
        {0, 4, 2}, {2, 4, 6},  // x = lo
        {1, 3, 5}, {3, 7, 5},  // x = hi
    };
    for (const auto& f : faces) {
        tris.push_back({base + f[0], base + f[1], base + f[2]});
    }
}

}  // namespace

MeshPrim make_stairs_mesh(double run, double width, double rise, int steps) {
    if (!(run > 0.0) || !(width > 0.0) || !(rise > 0.0) || steps < 1) {
        throw std::invalid_argument("make_stairs_mesh: sizes must be > 0");
    }
    std::vector<Vec3> verts;
    std::vector<std::array<std::int32_t, 3>> tris;
    const Vec3 shift(-run / 2.0, -width / 2.0, -rise / 2.0);
    for (int i = 0; i < steps; ++i) {
        const Vec3 lo = Vec3(i * run / steps, 0.0, 0.0) + shift;
        const Vec3 hi =
            Vec3((i + 1) * run / steps, width, (i + 1) * rise / steps) + shift;
        append_box_mesh(verts, tris, lo, hi);
    }
    return make_mesh(std::move(verts), std::move(tris));
}

SceneConfig default_scene_config() {
    SceneConfig cfg;
    using SK = ShapeKind;
    using MK = MountKind;
    cfg.classes = {
        make_class("Bed", SK::Box, MK::Floor, 0, 1, {1.9, 1.4, 0.5}, {2.1, 1.8, 0.7}),
        make_class("Sofa", SK::Box, MK::Floor, 0, 1, {1.8, 0.8, 0.7}, {2.2, 1.0, 0.9}),
        make_class("Couch", SK::Box, MK::Floor, 0, 1, {1.5, 0.8, 0.7}, {2.0, 1.0, 0.9}),
        make_class("Table", SK::Box, MK::Floor, 1, 3, {1.2, 0.7, 0.7}, {1.8, 1.0, 0.8}),
        make_class("Chair", SK::Box, MK::Floor, 2, 6, {0.45, 0.45, 0.8}, {0.55, 0.55, 1.0}),
        make_class("Stairs", SK::StairsMesh, MK::Floor, 0, 1, {1.6, 0.9, 1.0}, {2.4, 1.2, 1.6}),
        make_class("Cabinet", SK::Box, MK::Floor, 0, 2, {0.8, 0.4, 1.5}, {1.2, 0.6, 2.0}),
        make_class("Shelf", SK::Box, MK::Wall, 0, 2, {0.8, 0.25, 0.3}, {1.2, 0.35, 0.5}),
        make_class("Box", SK::Box, MK::Floor, 0, 4, {0.3, 0.3, 0.3}, {0.6, 0.6, 0.6}),
        make_class("Oven", SK::Box, MK::Floor, 0, 1, {0.6, 0.6, 0.85}, {0.65, 0.65, 0.95}),
        make_class("Microwave_oven", SK::Box, MK::Floor, 0, 1, {0.45, 0.3, 0.25}, {0.55, 0.4, 0.35}),
        make_class("Dishwasher", SK::Box, MK::Floor, 0, 1, {0.6, 0.6, 0.8}, {0.65, 0.65, 0.9}),
        make_class("Sink", SK::Box, MK::Floor, 0, 1, {0.5, 0.4, 0.2}, {0.7, 0.55, 0.3}),
        make_class("Person", SK::Cylinder, MK::Floor, 0, 2, {0.4, 0.4, 1.5}, {0.6, 0.6, 1.9}),
        make_class("Door", SK::Box, MK::Floor, 0, 2, {0.9, 0.05, 2.0}, {1.0, 0.08, 2.1}),
        make_class("Window", SK::Box, MK::Wall, 0, 2, {0.8, 0.05, 0.8}, {1.4, 0.08, 1.2}),
        make_class("Lamp", SK::Sphere, MK::Floor, 0, 2, {0.3, 0.3, 0.3}, {0.5, 0.5, 0.5}),
        make_class("Desk", SK::Box, MK::Floor, 0, 2, {1.2, 0.6, 0.72}, {1.6, 0.8, 0.78}),
        make_class("Monitor", SK::Box, MK::Wall, 0, 2, {0.5, 0.05, 0.3}, {0.7, 0.1, 0.45}),
        make_class("Trashcan", SK::Cylinder, MK::Floor, 1, 2, {0.3, 0.3, 0.4}, {0.4, 0.4, 0.6}),
    };
    return cfg;
}

std::vector<std::string> SceneConfig::taxonomy() const {
    std::vector<std::string> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(c.class_label);
    return out;
}

void validate_scene_config(const SceneConfig& config) {
    if (!(config.room_min.minCoeff() > 0.0) ||
        (config.room_max - config.room_min).minCoeff() < 0.0) {
        throw std::invalid_argument("scene config: bad room dimension ranges");
    }
    if (config.placement_tolerance < 0.0) {
        throw std::invalid_argument("scene config: negative tolerance");
    }
    std::set<std::string> seen;
    for (const auto& c : config.classes) {
        if (c.class_label.empty() ||
            c.class_label.find_first_of(" \t\n") != std::string::npos) {
            throw std::invalid_argument("scene config: bad class label");
        }
        if (!seen.insert(c.class_label).second) {
            throw std::invalid_argument("scene config: duplicate class " +
                                        c.class_label);
        }
        if (c.count_min < 0 || c.count_max < c.count_min) {
            throw std::invalid_argument("scene config: bad count range for " +
                                        c.class_label);
        }
        if (!(c.size_min.minCoeff() > 0.0) ||
            (c.size_max - c.size_min).minCoeff() < 0.0) {
            throw std::invalid_argument("scene config: bad size range for " +
                                        c.class_label);
        }
        if (c.reflectivity_min < 0.05 || c.reflectivity_max > 1.0 ||
            c.reflectivity_max < c.reflectivity_min) {
            throw std::invalid_argument(
                "scene config: reflectivity range outside [0.05, 1.0] for " +
                c.class_label);
        }
    }
}

void object_world_aabb(const ObjectInstance& obj, Vec3& aabb_min,
                       Vec3& aabb_max) {
    Vec3 center, half;
    local_bounds(obj, center, half);
    const Vec3 world_center = obj.pose.apply_point(center);
    const Vec3 world_half = obj.pose.rotation.cwiseAbs() * half;
    aabb_min = world_center - world_half;
    aabb_max = world_center + world_half;
}

GeneratedScene generate_scene(const SceneConfig& config, std::uint64_t seed) {
    validate_scene_config(config);
    CounterRng rng(derive_stream(seed, 0x5CE11E));

    GeneratedScene out;
    Scene& scene = out.scene;
    scene.seed = seed;
    scene.taxonomy = config.taxonomy();
    scene.room.width = rng.uniform(config.room_min.x(), config.room_max.x());
    scene.room.depth = rng.uniform(config.room_min.y(), config.room_max.y());
    scene.room.height = rng.uniform(config.room_min.z(), config.room_max.z());

    std::vector<std::pair<Vec3, Vec3>> placed_aabbs;
    std::int64_t next_id = 1;

    for (const auto& cls : config.classes) {
        const int count =
            static_cast<int>(rng.uniform_int(cls.count_min, cls.count_max));
        for (int n = 0; n < count; ++n) {
            bool placed = false;
            int attempt = 0;
            for (; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
                Vec3 size;
                for (int k = 0; k < 3; ++k) {
                    size[k] = rng.uniform(cls.size_min[k], cls.size_max[k]);
                }
                ObjectInstance obj;
                obj.class_label = cls.class_label;
                switch (cls.shape) {
                    case ShapeKind::Box:
                        obj.primitive = BoxPrim{size / 2.0};
                        break;
                    case ShapeKind::Sphere:
                        obj.primitive = SpherePrim{size.x() / 2.0};
                        break;
                    case ShapeKind::Cylinder:
                        obj.primitive =
                            CylinderPrim{size.x() / 2.0, size.z() / 2.0};
                        break;
                    case ShapeKind::StairsMesh:
                        obj.primitive =
                            make_stairs_mesh(size.x(), size.y(), size.z());
                        break;
                }
                const double yaw = rng.uniform(0.0, 2.0 * M_PI);
                const double x = rng.uniform(0.0, scene.room.width);
                const double y = rng.uniform(0.0, scene.room.depth);
                const double bottom = cls.mount == MountKind::Wall
                                          ? rng.uniform(kWallMountMin, kWallMountMax)
                                          : 0.0;
                // z so the world AABB bottom sits at the mount height.
                obj.pose = Pose::from_yaw(yaw, Vec3(x, y, 0.0));
                Vec3 lo, hi;
                object_world_aabb(obj, lo, hi);
                obj.pose.translation.z() = bottom - lo.z();
                lo.z() += obj.pose.translation.z();
                hi.z() += obj.pose.translation.z();

                if (lo.x() < 0.0 || lo.y() < 0.0 || lo.z() < 0.0 ||
                    hi.x() > scene.room.width || hi.y() > scene.room.depth ||
                    hi.z() > scene.room.height) {
                    continue;
                }
                bool collides = false;
                for (const auto& [plo, phi] : placed_aabbs) {
                    if (aabb_overlap_exceeds(lo, hi, plo, phi,
                                             config.placement_tolerance)) {
                        collides = true;
                        break;
                    }
                }
                if (collides) continue;

                obj.object_id = next_id++;
                obj.reflectivity =
                    rng.uniform(cls.reflectivity_min, cls.reflectivity_max);
                placed_aabbs.emplace_back(lo, hi);
                scene.objects.push_back(std::move(obj));
                placed = true;
            }
            if (!placed) {
                out.drops.push_back(
                    {cls.class_label, "no non-overlapping placement", attempt});
            }
        }
    }
    return out;
}

std::vector<SceneViolation> validate_scene(const Scene& scene) {
    std::vector<SceneViolation> violations;
    // All-zero room means "no shell" (open space); otherwise every
    // dimension must be strictly positive.
    const bool has_room = scene.room.width != 0.0 ||
                          scene.room.depth != 0.0 ||
                          scene.room.height != 0.0;
    if (has_room && (!(scene.room.width > 0.0) || !(scene.room.depth > 0.0) ||
                     !(scene.room.height > 0.0))) {
        violations.push_back({SceneViolation::Kind::OutOfRoom, 0, 0,
                              "room dimensions must be > 0"});
    }
    const std::set<std::string> taxonomy(scene.taxonomy.begin(),
                                         scene.taxonomy.end());

    std::set<std::int64_t> ids;
    std::vector<std::pair<Vec3, Vec3>> aabbs(scene.objects.size());
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& obj = scene.objects[i];
        if (!ids.insert(obj.object_id).second) {
            violations.push_back({SceneViolation::Kind::DuplicateId,
                                  obj.object_id, 0,
                                  "duplicate object id"});
        }
        if (!taxonomy.count(obj.class_label)) {
            violations.push_back({SceneViolation::Kind::UnknownClass,
                                  obj.object_id, 0,
                                  "class not in taxonomy: " + obj.class_label});
        }
        if (obj.reflectivity < 0.05 || obj.reflectivity > 1.0) {
            violations.push_back({SceneViolation::Kind::BadReflectivity,
                                  obj.object_id, 0,
                                  "reflectivity outside [0.05, 1.0]"});
        }
        object_world_aabb(obj, aabbs[i].first, aabbs[i].second);
        const Vec3& lo = aabbs[i].first;
        const Vec3& hi = aabbs[i].second;
        if (has_room &&
            (lo.x() < -1e-9 || lo.y() < -1e-9 || lo.z() < -1e-9 ||
             hi.x() > scene.room.width + 1e-9 ||
             hi.y() > scene.room.depth + 1e-9 ||
             hi.z() > scene.room.height + 1e-9)) {
            violations.push_back({SceneViolation::Kind::OutOfRoom,
                                  obj.object_id, 0,
                                  "object bounding box outside room"});
        }
    }
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
            if (aabb_overlap_exceeds(aabbs[i].first, aabbs[i].second,
                                     aabbs[j].first, aabbs[j].second, 0.0)) {
                violations.push_back({SceneViolation::Kind::Overlap,
                                      scene.objects[i].object_id,
                                      scene.objects[j].object_id,
                                      "object bounding boxes overlap"});
            }
        }
    }
    return violations;
}

std::optional<Hit> nearest_hit(const Ray& world_ray, const Scene& scene,
                               double max_range) {
    std::optional<Hit> best;
    double best_t = max_range;

    for (const auto& obj : scene.objects) {
        const Ray local = to_local_frame(world_ray, obj.pose);
        const auto hit = intersect_primitive_full(local, obj.primitive);
        if (!hit || hit->t >= best_t) continue;
        Vec3 normal = obj.pose.rotation * hit->normal;
        if (normal.dot(world_ray.direction) > 0.0) normal = -normal;
        best_t = hit->t;
        best = Hit{hit->t, obj.object_id, normal, world_ray.at(hit->t)};
    }

    // Room shell: inside faces of the room AABB.
    if (scene.room.width > 0.0) {
        const Vec3 half(scene.room.width / 2.0, scene.room.depth / 2.0,
                        scene.room.height / 2.0);
        const Ray centered{world_ray.origin - half, world_ray.direction};
        const auto hit =
            intersect_primitive_full(centered, Primitive(BoxPrim{half}));
        if (hit && hit->t < best_t) {
            Vec3 normal = hit->normal;
            if (normal.dot(world_ray.direction) > 0.0) normal = -normal;
            best_t = hit->t;
            best = Hit{hit->t, kRoomObjectId, normal, world_ray.at(hit->t)};
        }
    }
    return best;
}

}  // namespace ilidar

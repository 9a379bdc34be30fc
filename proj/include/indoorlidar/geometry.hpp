#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace ilidar {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Hits closer than this along the ray are rejected to avoid
// self-intersection at grazing origins.
constexpr double kRayTMin = 1e-6;

struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }
    static Pose from_yaw(double yaw, const Vec3& translation);

    Pose inverse() const;
    Pose operator*(const Pose& rhs) const;

    Vec3 apply_point(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_dir(const Vec3& d) const { return rotation * d; }

    // Orthonormal with determinant +1, within tol.
    bool is_rigid(double tol = 1e-9) const;
    // Yaw about +z extracted from the rotation.
    double yaw() const;
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitX();

    Vec3 at(double t) const { return origin + t * direction; }
};

struct BoxPrim {
    Vec3 half_extents;
};

struct SpherePrim {
    double radius;
};

// Axis along local z.
struct CylinderPrim {
    double radius;
    double half_height;
};

struct BvhNode {
    Vec3 aabb_min;
    Vec3 aabb_max;
    // Internal: children indices. Leaf: first triangle, count (right < 0).
    std::int32_t left;
    std::int32_t right;
    std::int32_t first_tri;
    std::int32_t tri_count;
};

struct MeshPrim {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;
    std::vector<BvhNode> bvh_nodes;
    std::vector<std::int32_t> bvh_tri_order;
    Vec3 aabb_min;
    Vec3 aabb_max;
};

using Primitive = std::variant<BoxPrim, SpherePrim, CylinderPrim, MeshPrim>;

// Validates sizes/indices and builds the BVH (median split, <= 4 tris
// per leaf).
MeshPrim make_mesh(std::vector<Vec3> vertices,
                   std::vector<std::array<std::int32_t, 3>> triangles);

// Throws std::invalid_argument on degenerate sizes or bad mesh indices.
void validate_primitive(const Primitive& prim);

// Local axis-aligned bounds of a primitive.
void primitive_aabb(const Primitive& prim, Vec3& aabb_min, Vec3& aabb_max);

struct SurfaceHit {
    double t;
    Vec3 normal;  // unit, outward, local frame
};

// Direction d(theta, phi) = [cos(phi)cos(theta), cos(phi)sin(theta), sin(phi)].
Vec3 ray_direction(double azimuth, double elevation);

// Ray re-expressed in the frame whose world pose is object_pose.
Ray to_local_frame(const Ray& ray, const Pose& object_pose);

// Smallest t > kRayTMin at which the local-frame ray meets the surface.
std::optional<double> intersect_primitive(const Ray& local_ray,
                                          const Primitive& prim);

// Same, but with the surface normal at the hit.
std::optional<SurfaceHit> intersect_primitive_full(const Ray& local_ray,
                                                   const Primitive& prim);

// Slab intersection with a local AABB; entry/exit interval on success.
std::optional<std::pair<double, double>> intersect_aabb(const Ray& ray,
                                                        const Vec3& aabb_min,
                                                        const Vec3& aabb_max);

}  // namespace ilidar

#include "indoorlidar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ilidar {

Pose Pose::from_yaw(double yaw, const Vec3& translation) {
    Pose p;
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    p.rotation << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
    p.translation = translation;
    return p;
}

Pose Pose::inverse() const {
    Pose p;
    p.rotation = rotation.transpose();
    p.translation = -(rotation.transpose() * translation);
    return p;
}

Pose Pose::operator*(const Pose& rhs) const {
    Pose p;
    p.rotation = rotation * rhs.rotation;
    p.translation = rotation * rhs.translation + translation;
    return p;
}

bool Pose::is_rigid(double tol) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const Mat3 rtr = rotation.transpose() * rotation;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
}

double Pose::yaw() const {
    return std::atan2(rotation(1, 0), rotation(0, 0));
}

Vec3 ray_direction(double azimuth, double elevation) {
    if (!std::isfinite(azimuth) || !std::isfinite(elevation)) {
        throw std::invalid_argument("ray_direction: non-finite angle");
    }
    const double ce = std::cos(elevation);
    return {ce * std::cos(azimuth), ce * std::sin(azimuth),
            std::sin(elevation)};
}

Ray to_local_frame(const Ray& ray, const Pose& object_pose) {
    const Mat3 rt = object_pose.rotation.transpose();
    return Ray{rt * (ray.origin - object_pose.translation),
               rt * ray.direction};
}

std::optional<std::pair<double, double>> intersect_aabb(const Ray& ray,
                                                        const Vec3& aabb_min,
                                                        const Vec3& aabb_max) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        const double inv = 1.0 / ray.direction[a];
        double ta = (aabb_min[a] - ray.origin[a]) * inv;
        double tb = (aabb_max[a] - ray.origin[a]) * inv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

namespace {

std::optional<SurfaceHit> intersect_box(const Ray& ray, const BoxPrim& box) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    int axis0 = -1;
    int axis1 = -1;
    for (int a = 0; a < 3; ++a) {
        const double inv = 1.0 / ray.direction[a];
        double ta = (-box.half_extents[a] - ray.origin[a]) * inv;
        double tb = (box.half_extents[a] - ray.origin[a]) * inv;
        if (ta > tb) std::swap(ta, tb);
        // Strict comparison keeps the first axis on ties (axis order x,y,z).
        if (ta > t0) {
            t0 = ta;
            axis0 = a;
        }
        if (tb < t1) {
            t1 = tb;
            axis1 = a;
        }
        if (t0 > t1) return std::nullopt;
    }
    double t;
    int axis;
    if (t0 > kRayTMin) {
        t = t0;
        axis = axis0;
    } else if (t1 > kRayTMin) {
        t = t1;
        axis = axis1;
    } else {
        return std::nullopt;
    }
    Vec3 n = Vec3::Zero();
    const double side = ray.at(t)[axis] >= 0.0 ? 1.0 : -1.0;
    n[axis] = side;
    return SurfaceHit{t, n};
}

std::optional<SurfaceHit> intersect_sphere(const Ray& ray,
                                           const SpherePrim& sphere) {
    const double b = ray.origin.dot(ray.direction);
    const double c = ray.origin.squaredNorm() - sphere.radius * sphere.radius;
    double disc = b * b - c;
    if (disc < -1e-12) return std::nullopt;
    disc = std::max(disc, 0.0);  // tangential counts as a hit
    const double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t <= kRayTMin) t = -b + sq;
    if (t <= kRayTMin) return std::nullopt;
    return SurfaceHit{t, ray.at(t).normalized()};
}

std::optional<SurfaceHit> intersect_cylinder(const Ray& ray,
                                             const CylinderPrim& cyl) {
    double best_t = std::numeric_limits<double>::infinity();
    Vec3 best_n = Vec3::Zero();

    // Infinite tube in xy.
    const double a =
        ray.direction.x() * ray.direction.x() + ray.direction.y() * ray.direction.y();
    if (a > 0.0) {
        const double b =
            ray.origin.x() * ray.direction.x() + ray.origin.y() * ray.direction.y();
        const double c = ray.origin.x() * ray.origin.x() +
                         ray.origin.y() * ray.origin.y() -
                         cyl.radius * cyl.radius;
        double disc = b * b - a * c;
        if (disc >= -1e-12) {
            disc = std::max(disc, 0.0);
            const double sq = std::sqrt(disc);
            for (const double t : {(-b - sq) / a, (-b + sq) / a}) {
                if (t > kRayTMin && t < best_t) {
                    const Vec3 p = ray.at(t);
                    if (std::abs(p.z()) <= cyl.half_height) {
                        best_t = t;
                        best_n = Vec3(p.x(), p.y(), 0.0) / cyl.radius;
                    }
                }
            }
        }
    }

    // End caps.
    if (ray.direction.z() != 0.0) {
        for (const double zcap : {-cyl.half_height, cyl.half_height}) {
            const double t = (zcap - ray.origin.z()) / ray.direction.z();
            if (t > kRayTMin && t < best_t) {
                const Vec3 p = ray.at(t);
                if (p.x() * p.x() + p.y() * p.y() <= cyl.radius * cyl.radius) {
                    best_t = t;
                    best_n = Vec3(0.0, 0.0, zcap > 0.0 ? 1.0 : -1.0);
                }
            }
        }
    }

    if (!std::isfinite(best_t)) return std::nullopt;
    return SurfaceHit{best_t, best_n};
}

// Moller-Trumbore.
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0,
                                         const Vec3& v1, const Vec3& v2) {
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 pvec = ray.direction.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-14) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = ray.origin - v0;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qvec = tvec.cross(e1);
    const double v = ray.direction.dot(qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = e2.dot(qvec) * inv_det;
    if (t <= kRayTMin) return std::nullopt;
    return t;
}

std::optional<SurfaceHit> intersect_mesh(const Ray& ray, const MeshPrim& mesh) {
    double best_t = std::numeric_limits<double>::infinity();
    std::int32_t best_tri = -1;

    std::int32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const BvhNode& node = mesh.bvh_nodes[stack[--sp]];
        const auto span = intersect_aabb(ray, node.aabb_min, node.aabb_max);
        if (!span || span->first > best_t || span->second < kRayTMin) continue;
        if (node.tri_count > 0) {
            for (std::int32_t i = 0; i < node.tri_count; ++i) {
                const std::int32_t ti = mesh.bvh_tri_order[node.first_tri + i];
                const auto& tri = mesh.triangles[ti];
                const auto t = intersect_triangle(ray, mesh.vertices[tri[0]],
                                                  mesh.vertices[tri[1]],
                                                  mesh.vertices[tri[2]]);
                if (t && *t < best_t) {
                    best_t = *t;
                    best_tri = ti;
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }

    if (best_tri < 0) return std::nullopt;
    const auto& tri = mesh.triangles[best_tri];
    Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                 .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]])
                 .normalized();
    if (n.dot(ray.direction) > 0.0) n = -n;
    return SurfaceHit{best_t, n};
}

std::int32_t build_bvh_node(MeshPrim& mesh, std::vector<Vec3>& centroids,
                            std::int32_t first, std::int32_t count) {
    BvhNode node{};
    node.aabb_min = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.aabb_max = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (std::int32_t i = 0; i < count; ++i) {
        const auto& tri = mesh.triangles[mesh.bvh_tri_order[first + i]];
        for (int k = 0; k < 3; ++k) {
            node.aabb_min = node.aabb_min.cwiseMin(mesh.vertices[tri[k]]);
            node.aabb_max = node.aabb_max.cwiseMax(mesh.vertices[tri[k]]);
        }
    }
    const std::int32_t index = static_cast<std::int32_t>(mesh.bvh_nodes.size());
    mesh.bvh_nodes.push_back(node);

    if (count <= 4) {
        mesh.bvh_nodes[index].first_tri = first;
        mesh.bvh_nodes[index].tri_count = count;
        return index;
    }

    int axis = 0;
    const Vec3 extent = node.aabb_max - node.aabb_min;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;

    auto begin = mesh.bvh_tri_order.begin() + first;
    std::nth_element(begin, begin + count / 2, begin + count,
                     [&](std::int32_t lhs, std::int32_t rhs) {
                         return centroids[lhs][axis] < centroids[rhs][axis];
                     });
    const std::int32_t mid = count / 2;
    const std::int32_t left = build_bvh_node(mesh, centroids, first, mid);
    const std::int32_t right =
        build_bvh_node(mesh, centroids, first + mid, count - mid);
    mesh.bvh_nodes[index].left = left;
    mesh.bvh_nodes[index].right = right;
    mesh.bvh_nodes[index].tri_count = 0;
    return index;
}

}  // namespace

MeshPrim make_mesh(std::vector<Vec3> vertices,
                   std::vector<std::array<std::int32_t, 3>> triangles) {
    if (triangles.empty()) {
        throw std::invalid_argument("make_mesh: mesh has no triangles");
    }
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 ||
                tri[k] >= static_cast<std::int32_t>(vertices.size())) {
                throw std::invalid_argument(
                    "make_mesh: triangle index out of range");
            }
        }
    }
    MeshPrim mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);

    mesh.aabb_min = Vec3::Constant(std::numeric_limits<double>::infinity());
    mesh.aabb_max = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (const auto& v : mesh.vertices) {
        mesh.aabb_min = mesh.aabb_min.cwiseMin(v);
        mesh.aabb_max = mesh.aabb_max.cwiseMax(v);
    }

    std::vector<Vec3> centroids(mesh.triangles.size());
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& tri = mesh.triangles[i];
        centroids[i] = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] +
                        mesh.vertices[tri[2]]) /
                       3.0;
    }
    mesh.bvh_tri_order.resize(mesh.triangles.size());
    std::iota(mesh.bvh_tri_order.begin(), mesh.bvh_tri_order.end(), 0);
    build_bvh_node(mesh, centroids, 0,
                   static_cast<std::int32_t>(mesh.triangles.size()));
    return mesh;
}

void validate_primitive(const Primitive& prim) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BoxPrim>) {
                if (!(p.half_extents.minCoeff() > 0.0)) {
                    throw std::invalid_argument("box half-extents must be > 0");
                }
            } else if constexpr (std::is_same_v<T, SpherePrim>) {
                if (!(p.radius > 0.0)) {
                    throw std::invalid_argument("sphere radius must be > 0");
                }
            } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                if (!(p.radius > 0.0) || !(p.half_height > 0.0)) {
                    throw std::invalid_argument("cylinder sizes must be > 0");
                }
            } else {
                if (p.triangles.empty() || p.bvh_nodes.empty()) {
                    throw std::invalid_argument("mesh must have >= 1 triangle");
                }
            }
        },
        prim);
}

void primitive_aabb(const Primitive& prim, Vec3& aabb_min, Vec3& aabb_max) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BoxPrim>) {
                aabb_min = -p.half_extents;
                aabb_max = p.half_extents;
            } else if constexpr (std::is_same_v<T, SpherePrim>) {
                aabb_min = Vec3::Constant(-p.radius);
                aabb_max = Vec3::Constant(p.radius);
            } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                aabb_min = Vec3(-p.radius, -p.radius, -p.half_height);
                aabb_max = Vec3(p.radius, p.radius, p.half_height);
            } else {
                aabb_min = p.aabb_min;
                aabb_max = p.aabb_max;
            }
        },
        prim);
}

std::optional<SurfaceHit> intersect_primitive_full(const Ray& local_ray,
                                                   const Primitive& prim) {
    validate_primitive(prim);
    return std::visit(
        [&](const auto& p) -> std::optional<SurfaceHit> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BoxPrim>) {
                return intersect_box(local_ray, p);
            } else if constexpr (std::is_same_v<T, SpherePrim>) {
                return intersect_sphere(local_ray, p);
            } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                return intersect_cylinder(local_ray, p);
            } else {
                return intersect_mesh(local_ray, p);
            }
        },
        prim);
}

std::optional<double> intersect_primitive(const Ray& local_ray,
                                          const Primitive& prim) {
    const auto hit = intersect_primitive_full(local_ray, prim);
    if (!hit) return std::nullopt;
    return hit->t;
}

}  // namespace ilidar

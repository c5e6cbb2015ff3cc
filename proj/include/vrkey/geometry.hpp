#pragma once

// Shared 3D math: vectors, unit quaternions, rigid transforms, ray-quad tests.
// Conventions: right-handed, y-up, meters. Forward is -z.

#include <array>
#include <cmath>
#include <optional>

namespace vrkey {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit quaternion, canonical sign w >= 0 (q and -q are the same rotation).
struct UnitQuat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static UnitQuat identity() { return {}; }
    // Normalizes and canonicalizes arbitrary components.
    static UnitQuat from_components(double w, double x, double y, double z);
    static UnitQuat from_axis_angle(const Vec3& axis, double radians);
    // Minimal rotation taking unit vector `from` onto unit vector `to`.
    static UnitQuat rotation_between(const Vec3& from, const Vec3& to);

    UnitQuat operator*(const UnitQuat& o) const;  // this applied after o
    UnitQuat conjugate() const { return canonical(w, -x, -y, -z); }
    Vec3 rotate(const Vec3& v) const;

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    // Angle of the relative rotation to `o`, in radians.
    double angle_to(const UnitQuat& o) const;

private:
    static UnitQuat canonical(double w, double x, double y, double z);
};

// Rigid pose: rotation then translation. apply(v) = rotation*v + position.
struct Transform {
    Vec3 position;
    UnitQuat rotation;

    static Transform identity() { return {}; }

    Vec3 apply(const Vec3& v) const { return rotation.rotate(v) + position; }
    Vec3 apply_direction(const Vec3& v) const { return rotation.rotate(v); }
};

// compose(a, b): apply b first, then a.
Transform compose(const Transform& a, const Transform& b);
Transform inverse(const Transform& t);

// Keeps position and yaw, drops pitch/roll. Used as the "player pose" that
// anchors keyboard placement.
Transform yaw_flatten(const Transform& t);

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

// Planar quad, corners counterclockwise as seen from the front (normal side).
struct Quad {
    std::array<Vec3, 4> corners;

    Vec3 center() const;
    Vec3 normal() const;
    double area() const;
    double coplanarity_residual() const;
    bool contains_planar(const Vec3& p) const;
};

struct RayHit {
    Vec3 point;
    double distance = 0.0;
};

// Hit point on the quad's plane if inside the bounds and in front of the ray.
std::optional<RayHit> ray_quad_intersect(const Ray& r, const Quad& q);

// Intersection with an unbounded plane (point, unit normal); distance > 0 only.
std::optional<RayHit> ray_plane_intersect(const Ray& r, const Vec3& plane_point,
                                          const Vec3& plane_normal);

// In-plane Euclidean distance from p (already on the quad's plane) to `center`.
double point_to_quad_plane_projection_distance(const Vec3& p, const Quad& q,
                                               const Vec3& center);

constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace vrkey

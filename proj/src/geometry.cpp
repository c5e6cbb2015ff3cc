#include "vrkey/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vrkey {

Vec3 Vec3::normalized() const {
    double n = norm();
    if (n <= 0.0) return {0.0, 0.0, 0.0};
    return {x / n, y / n, z / n};
}

UnitQuat UnitQuat::canonical(double w, double x, double y, double z) {
    double n = std::sqrt(w * w + x * x + y * y + z * z);
    UnitQuat q;
    q.w = w / n;
    q.x = x / n;
    q.y = y / n;
    q.z = z / n;
    if (q.w < 0.0) {
        q.w = -q.w;
        q.x = -q.x;
        q.y = -q.y;
        q.z = -q.z;
    }
    return q;
}

UnitQuat UnitQuat::from_components(double w, double x, double y, double z) {
    return canonical(w, x, y, z);
}

UnitQuat UnitQuat::from_axis_angle(const Vec3& axis, double radians) {
    Vec3 a = axis.normalized();
    double h = radians * 0.5;
    double s = std::sin(h);
    return canonical(std::cos(h), a.x * s, a.y * s, a.z * s);
}

UnitQuat UnitQuat::rotation_between(const Vec3& from, const Vec3& to) {
    Vec3 f = from.normalized();
    Vec3 t = to.normalized();
    double c = f.dot(t);
    if (c < -1.0 + 1e-12) {
        // Opposite directions: pick any axis orthogonal to f.
        Vec3 axis = std::abs(f.x) < 0.9 ? f.cross(Vec3{1, 0, 0}) : f.cross(Vec3{0, 1, 0});
        return from_axis_angle(axis, kPi);
    }
    Vec3 axis = f.cross(t);
    // q = [1 + f.t, f x t] normalized is the half-angle rotation.
    return canonical(1.0 + c, axis.x, axis.y, axis.z);
}

UnitQuat UnitQuat::operator*(const UnitQuat& o) const {
    return canonical(w * o.w - x * o.x - y * o.y - z * o.z,
                     w * o.x + x * o.w + y * o.z - z * o.y,
                     w * o.y - x * o.z + y * o.w + z * o.x,
                     w * o.z + x * o.y - y * o.x + z * o.w);
}

Vec3 UnitQuat::rotate(const Vec3& v) const {
    // v' = v + 2*u x (u x v + w*v), u = (x,y,z)
    Vec3 u{x, y, z};
    Vec3 t = u.cross(v) * 2.0;
    return v + t * w + u.cross(t);
}

double UnitQuat::angle_to(const UnitQuat& o) const {
    double d = std::abs(w * o.w + x * o.x + y * o.y + z * o.z);
    d = std::min(1.0, d);
    return 2.0 * std::acos(d);
}

Transform compose(const Transform& a, const Transform& b) {
    Transform r;
    r.rotation = a.rotation * b.rotation;
    r.position = a.rotation.rotate(b.position) + a.position;
    return r;
}

Transform inverse(const Transform& t) {
    Transform r;
    r.rotation = t.rotation.conjugate();
    r.position = -r.rotation.rotate(t.position);
    return r;
}

Transform yaw_flatten(const Transform& t) {
    Vec3 fwd = t.rotation.rotate(Vec3{0, 0, -1});
    fwd.y = 0.0;
    if (fwd.norm() < 1e-9) fwd = {0, 0, -1};  // looking straight up/down
    Transform r;
    r.position = t.position;
    r.rotation = UnitQuat::rotation_between(Vec3{0, 0, -1}, fwd.normalized());
    return r;
}

Vec3 Quad::center() const {
    return (corners[0] + corners[1] + corners[2] + corners[3]) * 0.25;
}

Vec3 Quad::normal() const {
    return (corners[1] - corners[0]).cross(corners[2] - corners[0]).normalized();
}

double Quad::area() const {
    Vec3 d1 = corners[2] - corners[0];
    Vec3 d2 = corners[3] - corners[1];
    return 0.5 * d1.cross(d2).norm();
}

double Quad::coplanarity_residual() const {
    Vec3 n = normal();
    return std::abs(n.dot(corners[3] - corners[0]));
}

bool Quad::contains_planar(const Vec3& p) const {
    // Inside all four edges (corners counterclockwise around the normal).
    Vec3 n = normal();
    for (int i = 0; i < 4; ++i) {
        Vec3 e = corners[(i + 1) % 4] - corners[i];
        if (n.cross(e).dot(p - corners[i]) < -1e-12) return false;
    }
    return true;
}

std::optional<RayHit> ray_plane_intersect(const Ray& r, const Vec3& plane_point,
                                          const Vec3& plane_normal) {
    double denom = r.direction.dot(plane_normal);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    double t = (plane_point - r.origin).dot(plane_normal) / denom;
    if (t <= 0.0) return std::nullopt;
    return RayHit{r.origin + r.direction * t, t};
}

std::optional<RayHit> ray_quad_intersect(const Ray& r, const Quad& q) {
    auto hit = ray_plane_intersect(r, q.corners[0], q.normal());
    if (!hit) return std::nullopt;
    if (!q.contains_planar(hit->point)) return std::nullopt;
    return hit;
}

double point_to_quad_plane_projection_distance(const Vec3& p, const Quad& q,
                                               const Vec3& center) {
    // Project both onto the quad's plane, then measure in-plane.
    Vec3 n = q.normal();
    Vec3 dp = p - center;
    Vec3 in_plane = dp - n * dp.dot(n);
    return in_plane.norm();
}

}  // namespace vrkey

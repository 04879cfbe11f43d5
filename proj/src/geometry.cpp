#include "zerocone/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace zerocone {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kAngularSlack = 1e-9;
constexpr double kUnitTol = 1e-10;
} // namespace

Cone::Cone(Vec apex_, Vec axis_, double theta_)
    : apex(std::move(apex_)), axis(std::move(axis_)), theta(theta_) {
    if (apex.size() != axis.size()) throw InvalidInputError("Cone: apex/axis dimension mismatch");
    if (!apex.allFinite() || !axis.allFinite()) throw InvalidInputError("Cone: non-finite fields");
    if (std::abs(axis.norm() - 1.0) > kUnitTol) throw InvalidInputError("Cone: axis must be a unit vector");
    if (!(theta > 0.0 && theta <= kPi)) throw InvalidInputError("Cone: aperture must lie in (0, pi]");
}

Hyperplane::Hyperplane(Vec point_, Vec normal_)
    : point(std::move(point_)), normal(std::move(normal_)) {
    if (point.size() != normal.size()) throw InvalidInputError("Hyperplane: dimension mismatch");
    if (std::abs(normal.norm() - 1.0) > kUnitTol) throw InvalidInputError("Hyperplane: normal must be a unit vector");
}

double angle_between(const Vec& u, const Vec& v) {
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw InvalidInputError("angle_between: zero vector");
    return std::acos(std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0));
}

double theta_n(Index n) {
    if (n < 2) throw InvalidInputError("theta_n: n must be >= 2");
    const double nd = static_cast<double>(n);
    return 2.0 * std::acos(std::sqrt(nd - 1.0) / std::sqrt(nd));
}

double lambda_shrink(double theta, Index n) {
    if (!(theta > 0.0 && theta < kPi)) {
        throw InvalidInputError("lambda_shrink: theta must lie in (0, pi)");
    }
    const double tn = theta_n(n);
    if (theta <= tn) return 1.0;
    return std::tan(tn / 2.0) / std::tan(theta / 2.0);
}

Mat w_theta(double theta, Index n) {
    const double lambda = lambda_shrink(theta, n);
    Vec diag_dir = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    Vec e1 = Vec::Unit(n, 0);
    Mat r_tilde = rotation_to(e1, diag_dir);
    Vec d = Vec::Constant(n, lambda);
    d(0) = 1.0;
    return r_tilde * d.asDiagonal() * r_tilde.transpose();
}

bool cone_contains(const Cone& c, const Vec& x) {
    if (x.size() != c.apex.size()) throw InvalidInputError("cone_contains: dimension mismatch");
    Vec rel = x - c.apex;
    const double dist = rel.norm();
    if (dist == 0.0) return true;
    const double ang = std::acos(std::clamp(rel.dot(c.axis) / dist, -1.0, 1.0));
    return ang <= c.theta / 2.0 + kAngularSlack;
}

double min_enclosing_aperture(const Vec& apex, const Vec& axis,
                              const Mat& points, double radius) {
    if (radius < 0.0) throw InvalidInputError("min_enclosing_aperture: negative radius");
    if (points.cols() == 0) return 0.0;
    if (points.rows() != apex.size()) throw InvalidInputError("min_enclosing_aperture: dimension mismatch");
    double half = 0.0;
    for (Index i = 0; i < points.cols(); ++i) {
        Vec rel = points.col(i) - apex;
        const double dist = rel.norm();
        if (dist <= radius) {
            throw InvalidInputError("min_enclosing_aperture: a ball touches the apex");
        }
        const double ang = std::acos(std::clamp(rel.dot(axis) / dist, -1.0, 1.0));
        half = std::max(half, ang + std::asin(radius / dist));
    }
    return 2.0 * half;
}

bool ball_in_cone(const Vec& center, double radius, const Cone& c) {
    if (radius < 0.0) throw InvalidInputError("ball_in_cone: negative radius");
    Vec rel = center - c.apex;
    const double dist = rel.norm();
    if (dist <= radius) return radius == 0.0 && dist == 0.0; // apex point only
    const double ang = std::acos(std::clamp(rel.dot(c.axis) / dist, -1.0, 1.0));
    return ang + std::asin(radius / dist) <= c.theta / 2.0 + kAngularSlack;
}

} // namespace zerocone

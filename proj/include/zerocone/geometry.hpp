#pragma once

#include "zerocone/linalg.hpp"

namespace zerocone {

// Cone of aperture theta around a unit axis, based at an apex:
// { apex + x : angle(x, axis) <= theta/2 }. The backward cone is the same
// object with the axis negated.
struct Cone {
    Vec apex;
    Vec axis;
    double theta = 0.0;

    Cone() = default;
    Cone(Vec apex_, Vec axis_, double theta_);

    Cone backward() const { return Cone(apex, -axis, theta); }
};

struct Hyperplane {
    Vec point;
    Vec normal;

    Hyperplane() = default;
    Hyperplane(Vec point_, Vec normal_);

    // Signed distance <x - point, normal>.
    double side(const Vec& x) const { return normal.dot(x - point); }
};

// Angle between two nonzero vectors, cosine clamped to [-1, 1].
double angle_between(const Vec& u, const Vec& v);

// Aperture of the largest cone around the diagonal u_n contained in the
// positive sector: 2 * arccos(sqrt(n-1)/sqrt(n)). Requires n >= 2.
double theta_n(Index n);

// Shrink factor applied orthogonally to the axis so an aperture-theta cone
// fits inside the theta_n cone: tan(theta_n/2)/tan(theta/2) when
// theta > theta_n, else 1. Requires 0 < theta < pi.
double lambda_shrink(double theta, Index n);

// Symmetric positive-definite matrix fixing the diagonal direction and
// scaling its orthogonal complement by lambda_shrink(theta, n).
Mat w_theta(double theta, Index n);

// Membership with a 1e-9 angular slack at the boundary; the apex itself
// counts as contained.
bool cone_contains(const Cone& c, const Vec& x);

// Smallest aperture such that every ball B_radius(point) lies in the cone
// at the given apex/axis: 2 * max_i [angle(p_i - apex, axis) +
// arcsin(radius / |p_i - apex|)]. Points are the columns of `points`.
// Returns 0 for no points; the result may exceed pi. Throws when some ball
// touches the apex (|p_i - apex| <= radius).
double min_enclosing_aperture(const Vec& apex, const Vec& axis,
                              const Mat& points, double radius);

// True iff |center - apex| > radius and
// angle(center - apex, axis) + arcsin(radius / |center - apex|) <= theta/2.
bool ball_in_cone(const Vec& center, double radius, const Cone& c);

} // namespace zerocone

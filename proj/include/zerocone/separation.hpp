#pragma once

#include "zerocone/linalg.hpp"

namespace zerocone {

// Maximum-margin linear separation through a fixed base point.
//
// Finding the unit normal nu maximizing min_i <a_i, nu> over a finite set
// {a_i} is dual to finding the minimum-norm point of conv{a_i}: the optimal
// value equals the distance from the origin to the hull and nu is the
// direction of the nearest point. The separator is solved that way and the
// caller re-verifies the resulting inequalities directly, so solver accuracy
// never decides correctness.

struct SeparationResult {
    Vec normal;    // unit; zero when the hull contains the origin
    double margin; // min_i <a_i, normal>, recomputed from the inequalities
};

// Minimum-norm point of the convex hull of the columns of `points`
// (Wolfe's algorithm; exact up to floating point).
Vec min_norm_point(const Mat& points);

// Max-margin direction for the homogeneous constraints <a_i, nu> >= m,
// columns of `points` being the a_i.
SeparationResult max_margin_direction(const Mat& points);

// Hyperplane through `base` separating the columns of `negative_side`
// (<x - base, nu> <= -m) from the columns of `positive_side`
// (<x - base, nu> >= m), with m maximal.
SeparationResult separate_through_point(const Vec& base, const Mat& negative_side,
                                        const Mat& positive_side);

} // namespace zerocone

#include "zerocone/separation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace zerocone {

namespace {

// Minimum-norm point in the affine hull of the selected columns:
// minimize |P alpha|^2 subject to sum(alpha) = 1, solved via the KKT system.
Vec affine_min_norm_coeffs(const Mat& p) {
    const Index k = p.cols();
    Mat kkt(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = p.transpose() * p;
    kkt.topRightCorner(k, 1).setOnes();
    kkt.bottomLeftCorner(1, k).setOnes();
    kkt(k, k) = 0.0;
    Vec rhs = Vec::Zero(k + 1);
    rhs(k) = 1.0;
    Vec sol = kkt.fullPivLu().solve(rhs);
    return sol.head(k);
}

} // namespace

Vec min_norm_point(const Mat& points) {
    if (points.cols() == 0 || points.rows() == 0) {
        throw InvalidInputError("min_norm_point: empty point set");
    }
    if (!points.allFinite()) throw InvalidInputError("min_norm_point: non-finite input");

    const Index n = points.cols();
    const double scale2 = std::max(1.0, points.colwise().squaredNorm().maxCoeff());
    const double tol = 1e-12 * scale2;

    // Corral of column indices with convex coefficients.
    Index start = 0;
    points.colwise().squaredNorm().minCoeff(&start);
    std::vector<Index> corral{start};
    Vec lambda = Vec::Ones(1);
    Vec x = points.col(start);

    const int max_major = 16 * static_cast<int>(n) + 64;
    for (int major = 0; major < max_major; ++major) {
        // Most violating vertex for the current iterate.
        Index best = 0;
        double best_dot = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < n; ++j) {
            const double d = x.dot(points.col(j));
            if (d < best_dot) {
                best_dot = d;
                best = j;
            }
        }
        if (best_dot >= x.squaredNorm() - tol) break; // optimality
        if (std::find(corral.begin(), corral.end(), best) != corral.end()) break;

        corral.push_back(best);
        Vec lam_ext(corral.size());
        lam_ext.head(lambda.size()) = lambda;
        lam_ext(lambda.size()) = 0.0;
        lambda = lam_ext;

        // Minor cycle: pull the iterate to the min-norm point of the affine
        // hull, dropping vertices whose coefficient would turn negative.
        for (int minor = 0; minor < 2 * static_cast<int>(n) + 16; ++minor) {
            Mat p(points.rows(), static_cast<Index>(corral.size()));
            for (size_t i = 0; i < corral.size(); ++i) p.col(static_cast<Index>(i)) = points.col(corral[i]);
            Vec alpha = affine_min_norm_coeffs(p);
            if (alpha.minCoeff() > -1e-12) {
                lambda = alpha.cwiseMax(0.0);
                lambda /= lambda.sum();
                x = p * lambda;
                break;
            }
            double theta = 1.0;
            for (Index i = 0; i < alpha.size(); ++i) {
                if (alpha(i) < 1e-12) {
                    const double denom = lambda(i) - alpha(i);
                    if (denom > 0.0) theta = std::min(theta, lambda(i) / denom);
                }
            }
            lambda = (1.0 - theta) * lambda + theta * alpha;
            std::vector<Index> kept;
            std::vector<double> kept_lam;
            for (size_t i = 0; i < corral.size(); ++i) {
                if (lambda(static_cast<Index>(i)) > 1e-12) {
                    kept.push_back(corral[i]);
                    kept_lam.push_back(lambda(static_cast<Index>(i)));
                }
            }
            if (kept.empty()) { // numerical fallback, keep the largest
                Index imax = 0;
                lambda.maxCoeff(&imax);
                kept.push_back(corral[static_cast<size_t>(imax)]);
                kept_lam.push_back(1.0);
            }
            corral = kept;
            lambda = Eigen::Map<Vec>(kept_lam.data(), static_cast<Index>(kept_lam.size()));
            lambda /= lambda.sum();
            Mat pk(points.rows(), static_cast<Index>(corral.size()));
            for (size_t i = 0; i < corral.size(); ++i) pk.col(static_cast<Index>(i)) = points.col(corral[i]);
            x = pk * lambda;
        }
    }
    return x;
}

SeparationResult max_margin_direction(const Mat& points) {
    SeparationResult res;
    Vec z = min_norm_point(points);
    const double zn = z.norm();
    if (zn < 1e-12 * std::max(1.0, points.norm())) {
        res.normal = Vec::Zero(points.rows());
        res.margin = 0.0;
        return res;
    }
    res.normal = z / zn;
    res.margin = (points.transpose() * res.normal).minCoeff();
    return res;
}

SeparationResult separate_through_point(const Vec& base, const Mat& negative_side,
                                        const Mat& positive_side) {
    if (negative_side.cols() == 0 || positive_side.cols() == 0) {
        throw InvalidInputError("separate_through_point: both sides need points");
    }
    Mat a(base.size(), negative_side.cols() + positive_side.cols());
    a.leftCols(negative_side.cols()) = (-negative_side).colwise() + base; // base - x
    a.rightCols(positive_side.cols()) = positive_side.colwise() - base;  // x - base
    return max_margin_direction(a);
}

} // namespace zerocone

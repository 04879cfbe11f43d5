#pragma once

#include <utility>
#include <vector>

#include "zerocone/dataset.hpp"
#include "zerocone/geometry.hpp"
#include "zerocone/network.hpp"

namespace zerocone {

// Thrown when the clustering precondition fails; carries the report.
class NotClusteredError : public std::runtime_error {
public:
    explicit NotClusteredError(ClusterReport rep)
        : std::runtime_error("dataset does not satisfy the clustering conditions"),
          report(std::move(rep)) {}
    ClusterReport report;
};

struct ClusteredOptions {
    // d_0 .. d_Q (the final layer always has width Q). Empty: collapsed
    // schedule (M, Q, Q, ..., Q). Must be non-increasing and >= Q.
    std::vector<Index> width_schedule;
    // Per-layer mu/delta ratios, each strictly inside (2, 3). Empty: all 2.5.
    std::vector<double> mu_fractions;
    double c0 = 0.125;
    // Position of theta_star inside [max(pi/2, max_j theta_star_j), pi).
    double theta_star_fraction = 0.5;
    double certify_tol = -1.0; // < 0: 1e-8 * max(1, data diameter)
};

struct SLSOptions {
    // Per-step fractions alpha in (0,1): theta_l = theta_min + alpha (pi - theta_min).
    // Empty: all 0.5. A single entry is broadcast.
    std::vector<double> theta_alphas;
    double certify_tol = -1.0;
};

struct TraceStep {
    Cone cone;             // cone driving the layer, in raw data coordinates
    Index collapsed_class; // class sent to the apex image at this step
    Mat cumulative_weight; // W^(l), raw coordinates
    Vec cumulative_bias;
    Mat snapshot;               // (X_0)^(tau, l)
    std::vector<bool> collapsed; // per class, collapsed at or before this step
};

struct ConstructionTrace {
    std::vector<TraceStep> steps;
    double theta_star = 0.0; // clustered construction only
};

// Lemma-form truncation layer for a cone in R^n with output width m <= n:
// W = P^n_m W_theta R with R h = diag/|diag|, b = -W apex. The induced
// truncation map is the identity (up to pinv(W) W) on the forward cone and
// collapses the backward cone to the apex image.
std::pair<Mat, Vec> build_truncation_layer(const Cone& cone, Index in_dim, Index out_dim);

// Prop.-style constructor for clustered data with a non-increasing width
// schedule; Q+1 layers, zero loss certified internally.
std::pair<LayerNet, ConstructionTrace> build_clustered(const LabeledDataset& ds,
                                                       const ClusteredOptions& opts = {});

// Theorem-style constructor for sequentially linearly separable data with
// constant hidden width M; Q+1 layers, zero loss certified internally.
std::pair<LayerNet, ConstructionTrace> build_sls(const LabeledDataset& ds,
                                                 const SLSCertificate& cert,
                                                 const SLSOptions& opts = {});

// Last affine layer: W = Y pinv(collapsed_means), b = 0. Requires the
// collapsed means to have full rank Q and the residual to vanish.
std::pair<Mat, Vec> solve_last_layer(const Mat& collapsed_means, const Mat& y,
                                     const Tolerance& tol = {});

} // namespace zerocone

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zerocone/geometry.hpp"
#include "zerocone/linalg.hpp"

namespace zerocone {

// Class-partitioned training data: columns of classes[j] are the points of
// class j, column j of labels is its target vector.
struct LabeledDataset {
    std::vector<Mat> classes; // X_{0,j}: M x N_j
    Mat labels;               // Y: Q x Q

    Index ambient_dim() const { return classes.empty() ? 0 : classes.front().rows(); }
    Index class_count() const { return static_cast<Index>(classes.size()); }
    Index points_in_class(Index j) const { return classes[static_cast<size_t>(j)].cols(); }
    Index total_points() const;

    Mat data_matrix() const;   // X_0: M x N, classes concatenated
    Mat labels_ext() const;    // Y^ext: Q x N
    double diameter() const;   // max pairwise distance over all points

    void validate(const Tolerance& tol = {}) const;
};

// Per-class means and deviations, the barycenter of the means, and the unit
// directions from each mean toward the barycenter.
struct ClassStats {
    std::vector<Vec> means;      // class means
    std::vector<Mat> deviations; // points minus their class mean
    double delta = 0.0;          // sup over all points of |deviation|
    Vec barycenter;              // mean of the class means
    std::vector<Vec> directions; // f_j, unit vectors mean_j -> barycenter
    std::vector<double> mean_dists; // |mean_j - barycenter|
};

// Linear change of basis whose first Q output coordinates are the
// coefficients of a point on the class means and whose remaining M-Q
// coordinates parameterize the orthogonal residual.
struct BarycentricFrame {
    Mat basis;      // B: M x Q, columns are the class means
    Mat complement; // orthonormal basis of span(B)^perp: M x (M-Q)
    Mat forward;    // T: coords = T * x
    Mat backward;   // T^{-1}: x = T^{-1} * coords

    Vec to_coords(const Vec& x) const { return forward * x; }
    Vec from_coords(const Vec& c) const { return backward * c; }
};

struct ClusterReport {
    double delta = 0.0;
    double c0 = 0.0;
    double min_mean_dist = 0.0;
    std::vector<double> theta_star_j;
    double theta_star = 0.0;
    bool passes = false;
    std::vector<std::string> failure_reasons;
};

// Witness of sequential linear separability. Entries are indexed by step;
// ordering[step] is the class collapsed at that step.
struct SLSCertificate {
    std::vector<Index> ordering;
    std::vector<Vec> base_points;   // p on the segment barycenter..mean
    std::vector<double> t_params;   // p = t*barycenter + (1-t)*mean
    std::vector<Vec> normals;       // unit h, class side is <x-p, h> <= -margin
    std::vector<double> margins;
    std::vector<double> theta_min;  // smallest usable cone aperture per step
};

struct SlsAttempt {
    std::vector<Index> prefix; // classes already placed when the step failed
    Index candidate = -1;      // class tried next
    double best_margin = 0.0;  // best margin over the t grid
};

struct SlsSearchOptions {
    double min_margin = -1.0; // < 0: defaults to 1e-6 * data diameter
    std::vector<double> t_grid; // empty: {0.05, 0.10, ..., 0.95}
    std::vector<Index> forced_ordering; // empty: search all orderings
};

struct SlsSearchResult {
    std::optional<SLSCertificate> certificate;
    std::vector<SlsAttempt> attempts; // failed steps, for the failure report
};

ClassStats class_stats(const LabeledDataset& ds);

// Dataset expressed in the frame coordinates, plus the frame itself.
std::pair<LabeledDataset, BarycentricFrame> to_barycentric(const LabeledDataset& ds,
                                                           const Tolerance& tol = {});

// Checks the clustering conditions: delta < c0 * min_j |mean_j - barycenter|
// with c0 in (0, 1/4), and every 4*delta-ball of the other means enclosed in
// a cone of aperture < pi at each mean. theta_star is placed at the midpoint
// of [max(pi/2, max_j theta_star_j), pi).
ClusterReport check_clustered(const LabeledDataset& ds, double c0);

// Greedy-with-backtracking search over class orderings and a grid of segment
// points; every accepted certificate is re-verified by direct inequality
// checks on all points.
SlsSearchResult find_sls_certificate(const LabeledDataset& ds,
                                     const SlsSearchOptions& opts = {});

// Direct re-verification of a certificate against the dataset.
bool certificate_valid(const LabeledDataset& ds, const SLSCertificate& cert,
                       std::string* why = nullptr);

// Q well-separated ball-shaped clusters at scaled random simplex vertices;
// passes check_clustered with c0 = 1/8 (re-verified before returning).
LabeledDataset gen_clustered(std::uint64_t seed, Index ambient_dim, Index class_count,
                             Index points_per_class, double spread);

// Interlocked crescents around a common center: sequentially linearly
// separable in exactly one ordering by construction, never clustered.
// Re-verified before returning (SLS search succeeds, cluster check fails).
LabeledDataset gen_sls(std::uint64_t seed, Index ambient_dim, Index class_count,
                       Index points_per_class);

} // namespace zerocone

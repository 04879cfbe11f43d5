#include "zerocone/construct.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace zerocone {

namespace {

constexpr double kPi = std::numbers::pi;

// Internal signal: a width-reduced layer cannot place its rows inside the
// dual cone of the data cone. Caught by the theta-star bump loop.
struct AngleInfeasible {
    double needed;
    double available;
};

Vec diag_direction(Index n) {
    return Vec::Ones(n) / std::sqrt(static_cast<double>(n));
}

Mat leading_projector(Index n, Index m) {
    Mat p = Mat::Zero(m, n);
    p.leftCols(m) = Mat::Identity(m, m);
    return p;
}

// Orthonormal basis of the column span (rank revealed by QR).
Mat orthonormal_span(const Mat& a, double rel_tol = 1e-10) {
    Eigen::ColPivHouseholderQR<Mat> qr(a);
    qr.setThreshold(rel_tol);
    const Index r = qr.rank();
    Mat q = qr.householderQ() * Mat::Identity(a.rows(), r);
    return q;
}

// Extends an orthonormal set to a full orthonormal basis, keeping the given
// columns exactly.
Mat orthonormal_completion(const Mat& a) {
    const Index n = a.rows();
    const Index k = a.cols();
    if (k == n) return a;
    Eigen::HouseholderQR<Mat> qr(a);
    Mat full(n, n);
    full.leftCols(k) = a;
    full.rightCols(n - k) = qr.householderQ() * Mat::Identity(n, n) .rightCols(n - k);
    return full;
}

double angle_to_subspace(const Vec& x, const Mat& basis) {
    Vec r = x - basis * (basis.transpose() * x);
    return std::asin(std::clamp(r.norm() / x.norm(), 0.0, 1.0));
}

// Rotation mapping one orthonormal frame onto another (det +1, acting as a
// frame-to-frame map; the completion absorbs the determinant sign).
Mat frame_rotation(const Mat& source, const Mat& target) {
    Mat s_full = orthonormal_completion(source);
    Mat t_full = orthonormal_completion(target);
    if ((s_full.determinant() > 0.0) != (t_full.determinant() > 0.0)) {
        t_full.col(t_full.cols() - 1) *= -1.0;
    }
    return t_full * s_full.transpose();
}

// Rotation R with R f1 = diag/|diag| steered so the whole subspace
// span(f_subspace) lands within a small angle of W_theta * span{e_k : k in
// kept}. That angle is what keeps width-reduced chains realizable.
Mat steered_rotation(const Vec& f1, const Mat& f_subspace, const Mat& wth,
                     const std::vector<Index>& kept, int variant) {
    const Index n = f1.size();
    const Index q = f_subspace.cols();
    Vec u_hat = diag_direction(n);

    Mat e_kept(n, static_cast<Index>(kept.size()));
    e_kept.setZero();
    for (size_t i = 0; i < kept.size(); ++i) e_kept(kept[i], static_cast<Index>(i)) = 1.0;
    Mat z_basis = orthonormal_span(wth * e_kept);

    Vec proj = z_basis * (z_basis.transpose() * u_hat);
    if (proj.norm() < 1e-12) {
        throw ConstructionError("steered_rotation: diagonal orthogonal to retained rows");
    }
    Vec z_hat = proj / proj.norm();

    // Orthonormal directions of Z orthogonal to z_hat (hence to the diagonal).
    Mat within = orthonormal_span(
        (Mat::Identity(n, n) - z_hat * z_hat.transpose()) * z_basis);
    if (within.cols() < q - 1) {
        throw ConstructionError("steered_rotation: retained row space too small");
    }

    Mat source(n, q);
    source.col(0) = f1;
    {
        // Complete f1 to an orthonormal basis of the f-subspace.
        Mat rest = (Mat::Identity(n, n) - f1 * f1.transpose()) * f_subspace;
        Mat rest_q = orthonormal_span(rest);
        if (rest_q.cols() < q - 1) {
            throw ConstructionError("steered_rotation: f-subspace degenerated");
        }
        source.rightCols(q - 1) = rest_q.leftCols(q - 1);
    }

    Mat target(n, q);
    target.col(0) = u_hat;
    for (Index i = 0; i + 1 < q; ++i) {
        target.col(i + 1) = within.col((i + variant) % within.cols());
    }
    return frame_rotation(source, target);
}

// d rows spanning the subspace `v_basis`, every row within the dual cone of
// the aperture-theta cone around f (angle < (pi - theta)/2 of f). The rows
// make W map the forward cone into the positive sector and the backward cone
// into the negative one while ker W = span(v_basis)^perp.
Mat dual_cone_rows(const Mat& v_basis, const Vec& f, double theta) {
    const Index n = v_basis.rows();
    const Index d = v_basis.cols();
    const double beta = (kPi - theta) / 2.0;
    Vec pf = v_basis * (v_basis.transpose() * f);
    if (pf.norm() < 1e-12) throw AngleInfeasible{kPi / 2.0, beta};
    const double alpha = angle_to_subspace(f, v_basis);
    if (alpha >= 0.85 * beta) throw AngleInfeasible{alpha, beta};
    Vec phi = pf / pf.norm();

    Mat within = orthonormal_span((Mat::Identity(n, n) - phi * phi.transpose()) * v_basis);
    if (within.cols() < d - 1) {
        throw ConstructionError("dual_cone_rows: degenerate row space");
    }
    const double spread = std::min(0.8 * (beta - alpha), 1.0);
    Mat w(d, n);
    w.row(0) = phi.transpose();
    for (Index i = 0; i + 1 < d; ++i) {
        w.row(i + 1) = (std::cos(spread) * phi + std::sin(spread) * within.col(i)).transpose();
    }
    return w;
}

std::vector<double> resolve_fractions(std::vector<double> fr, Index q, double lo, double hi,
                                      double fallback, const char* what) {
    if (fr.empty()) fr.assign(static_cast<size_t>(q), fallback);
    if (fr.size() == 1) fr.assign(static_cast<size_t>(q), fr[0]);
    if (fr.size() != static_cast<size_t>(q)) {
        throw InvalidInputError(std::string(what) + ": need one fraction per hidden layer");
    }
    for (double f : fr) {
        if (!(f > lo && f < hi)) {
            std::ostringstream os;
            os << what << ": fraction " << f << " outside (" << lo << ", " << hi << ")";
            throw InvalidInputError(os.str());
        }
    }
    return fr;
}

double block_collapse_error(const Mat& snapshot_block) {
    Vec mean = snapshot_block.rowwise().mean();
    double worst = 0.0;
    for (Index i = 0; i < snapshot_block.cols(); ++i) {
        worst = std::max(worst, (snapshot_block.col(i) - mean).norm());
    }
    return worst;
}

struct ClassSlices {
    std::vector<Index> offset;
    std::vector<Index> count;
};

ClassSlices class_slices(const LabeledDataset& ds) {
    ClassSlices s;
    Index at = 0;
    for (Index j = 0; j < ds.class_count(); ++j) {
        s.offset.push_back(at);
        s.count.push_back(ds.points_in_class(j));
        at += ds.points_in_class(j);
    }
    return s;
}

ConstructionTrace make_trace(const LabeledDataset& ds, const CumulativeNet& cnet,
                             const std::vector<Cone>& cones,
                             const std::vector<Index>& collapse_order, double theta_star) {
    ConstructionTrace trace;
    trace.theta_star = theta_star;
    const Mat x0 = ds.data_matrix();
    std::vector<Mat> chain = tau_chain(cnet, x0);
    std::vector<bool> collapsed(static_cast<size_t>(ds.class_count()), false);
    for (size_t l = 0; l < chain.size(); ++l) {
        collapsed[static_cast<size_t>(collapse_order[l])] = true;
        TraceStep step;
        step.cone = cones[l];
        step.collapsed_class = collapse_order[l];
        step.cumulative_weight = cnet.weights[l];
        step.cumulative_bias = cnet.biases[l];
        step.snapshot = chain[l];
        step.collapsed = collapsed;
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

void certify_interpolation(const LayerNet& net, const LabeledDataset& ds, double tol,
                           const char* who) {
    const double resid = (forward(net, ds.data_matrix()) - ds.labels_ext())
                             .cwiseAbs()
                             .maxCoeff();
    if (!(resid <= tol)) {
        std::ostringstream os;
        os << who << ": interpolation residual " << resid << " exceeds tolerance " << tol;
        throw ConstructionError(os.str());
    }
}

} // namespace

std::pair<Mat, Vec> build_truncation_layer(const Cone& cone, Index in_dim, Index out_dim) {
    if (cone.apex.size() != in_dim) throw InvalidInputError("build_truncation_layer: dimension mismatch");
    if (out_dim < 1 || out_dim > in_dim || in_dim < 2) {
        throw InvalidInputError("build_truncation_layer: need 1 <= m <= n, n >= 2");
    }
    if (!(cone.theta < kPi)) {
        throw InvalidInputError("build_truncation_layer: aperture pi is the hyperplane limit, not representable");
    }
    Mat r = rotation_to(cone.axis, diag_direction(in_dim));
    Mat w = w_theta(cone.theta, in_dim) * r;
    if (out_dim < in_dim) w = leading_projector(in_dim, out_dim) * w;
    Vec b = -w * cone.apex;
    return {std::move(w), std::move(b)};
}

std::pair<Mat, Vec> solve_last_layer(const Mat& collapsed_means, const Mat& y,
                                     const Tolerance& tol) {
    const Index q = y.rows();
    if (collapsed_means.cols() != q || y.cols() != q) {
        throw InvalidInputError("solve_last_layer: need M x Q means and Q x Q labels");
    }
    if (rank(collapsed_means, tol) < q) {
        throw RankError("solve_last_layer: collapsed means are rank-deficient");
    }
    Mat w = y * pinv(collapsed_means, tol);
    const double resid = (w * collapsed_means - y).norm();
    if (resid > 1e-9 * std::max(1.0, y.norm())) {
        throw RankError("solve_last_layer: residual too large, means nearly dependent");
    }
    return {std::move(w), Vec::Zero(q)};
}

// ---------------------------------------------------------------------------
// Clustered constructor
// ---------------------------------------------------------------------------

namespace {

struct ClusteredChain {
    std::vector<Mat> weights; // cumulative, barycentric coordinates
    std::vector<Vec> biases;
    std::vector<Cone> cones; // barycentric coordinates
};

// Builds the Q truncation layers in barycentric coordinates. Layers at full
// width keep the exact W_theta R form; the first width drop uses a steered
// rotation; later reduced layers place their rows in the dual cone
// intersected with the retained row space (see README for why).
ClusteredChain build_clustered_chain(const LabeledDataset& dsb, const ClassStats& st,
                                     const std::vector<Index>& schedule,
                                     const std::vector<double>& mu, double theta_star,
                                     int variant) {
    const Index m = dsb.ambient_dim();
    const Index q = dsb.class_count();
    Vec u_hat = diag_direction(m);
    Mat wth = w_theta(theta_star, m);

    // The means span the first Q coordinates in barycentric form; the final
    // rank argument needs that span preserved by the accumulated projector.
    Mat f_subspace = Mat::Identity(m, m).leftCols(q);

    ClusteredChain chain;
    Mat v_basis; // orthonormal basis of the current row space (empty = full)
    bool dropped = false;

    for (Index l = 1; l <= q; ++l) {
        const Index cls = l - 1;
        const Index dl = schedule[static_cast<size_t>(l)];
        const Index dprev = schedule[static_cast<size_t>(l - 1)];
        const Vec& f = st.directions[static_cast<size_t>(cls)];
        Vec apex = st.means[static_cast<size_t>(cls)] + mu[static_cast<size_t>(cls)] * f;

        Mat w;
        if (!dropped && dl == m) {
            w = wth * rotation_to(f, u_hat);
        } else if (!dropped) {
            std::vector<Index> kept(static_cast<size_t>(dl));
            for (Index i = 0; i < dl; ++i) kept[static_cast<size_t>(i)] = i;
            if (variant >= 4) {
                // Paper-style row permutation: bring rows whose leading block
                // is invertible against the mean span to the top.
                Mat probe = wth * rotation_to(f, u_hat) * f_subspace;
                Permutation perm = invertible_block_permutation(probe, q);
                for (Index i = 0; i < dl; ++i) kept[static_cast<size_t>(i)] = perm.images[static_cast<size_t>(i)];
                std::sort(kept.begin(), kept.end());
            }
            Mat r = steered_rotation(f, f_subspace, wth, kept, variant % 4);
            Mat sel = Mat::Zero(dl, m);
            for (Index i = 0; i < dl; ++i) sel(i, kept[static_cast<size_t>(i)]) = 1.0;
            w = sel * wth * r;
            // Feasibility of every later step against the new row space.
            v_basis = orthonormal_span(w.transpose());
            const double beta = (kPi - theta_star) / 2.0;
            for (Index j = 0; j < q; ++j) {
                const double ang = angle_to_subspace(st.directions[static_cast<size_t>(j)], v_basis);
                if (ang >= 0.85 * beta) throw AngleInfeasible{ang, beta};
            }
            dropped = true;
        } else {
            if (dl < dprev) {
                // Shrink the row space, keeping the projected mean span.
                Mat keep = orthonormal_span(v_basis * (v_basis.transpose() * f_subspace));
                Mat rest = orthonormal_span(
                    (Mat::Identity(m, m) - keep * keep.transpose()) * v_basis);
                Mat next(m, dl);
                next.leftCols(keep.cols()) = keep;
                for (Index i = 0; i < dl - keep.cols(); ++i) {
                    next.col(keep.cols() + i) = rest.col((i + variant) % rest.cols());
                }
                v_basis = next;
            }
            w = dual_cone_rows(v_basis, f, theta_star);
        }
        chain.weights.push_back(w);
        chain.biases.push_back(-w * apex);
        chain.cones.emplace_back(apex, f, theta_star);
    }
    return chain;
}

} // namespace

std::pair<LayerNet, ConstructionTrace> build_clustered(const LabeledDataset& ds,
                                                       const ClusteredOptions& opts) {
    ds.validate();
    const Index m = ds.ambient_dim();
    const Index q = ds.class_count();

    ClusterReport raw_report = check_clustered(ds, opts.c0);
    if (!raw_report.passes) throw NotClusteredError(raw_report);

    auto [dsb, frame] = to_barycentric(ds);
    ClusterReport rep = check_clustered(dsb, opts.c0);
    if (!rep.passes) {
        throw ConstructionError(
            "build_clustered: clustering conditions fail in barycentric coordinates "
            "(the change of basis distorts the cluster geometry too much)");
    }
    ClassStats st = class_stats(dsb);

    std::vector<Index> schedule = opts.width_schedule;
    if (schedule.empty()) {
        schedule.assign(static_cast<size_t>(q + 1), q);
        schedule[0] = m;
    }
    if (static_cast<Index>(schedule.size()) != q + 1 || schedule[0] != m) {
        throw InvalidInputError("build_clustered: width schedule must list d_0..d_Q with d_0 = M");
    }
    for (size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] < q) throw InvalidInputError("build_clustered: widths must stay >= Q");
        if (i > 0 && schedule[i] > schedule[i - 1]) {
            throw InvalidInputError("build_clustered: width schedule must be non-increasing");
        }
    }

    std::vector<double> fractions =
        resolve_fractions(opts.mu_fractions, q, 2.0, 3.0, 2.5, "mu_fractions");
    const double min_dist = *std::min_element(st.mean_dists.begin(), st.mean_dists.end());
    std::vector<double> mu(static_cast<size_t>(q));
    for (Index j = 0; j < q; ++j) {
        // delta = 0 leaves (2 delta, 3 delta) empty; any mu below the mean
        // distance collapses a singleton class, so scale the fraction down.
        mu[static_cast<size_t>(j)] = st.delta > 0.0
                                         ? fractions[static_cast<size_t>(j)] * st.delta
                                         : 0.04 * fractions[static_cast<size_t>(j)] * min_dist;
    }

    if (!(opts.theta_star_fraction > 0.0 && opts.theta_star_fraction < 1.0)) {
        throw InvalidInputError("build_clustered: theta_star_fraction must lie in (0, 1)");
    }
    double max_theta = *std::max_element(rep.theta_star_j.begin(), rep.theta_star_j.end());
    const double theta_lo = std::max(kPi / 2.0, max_theta);
    double theta_star = theta_lo + opts.theta_star_fraction * (kPi - theta_lo);

    const Tolerance tol;
    const double diam = ds.diameter();
    const double certify_tol = opts.certify_tol > 0.0 ? opts.certify_tol : 1e-8 * std::max(1.0, diam);
    const double collapse_tol = 1e-9 * std::max(1.0, diam);
    const std::vector<Index> order = [&] {
        std::vector<Index> o(static_cast<size_t>(q));
        for (Index j = 0; j < q; ++j) o[static_cast<size_t>(j)] = j;
        return o;
    }();

    std::string last_failure = "no attempt";
    for (int bump = 0; bump < 8; ++bump) {
        for (int variant = 0; variant < 8; ++variant) {
            ClusteredChain chain;
            try {
                chain = build_clustered_chain(dsb, st, schedule, mu, theta_star, variant);
            } catch (const AngleInfeasible& inf) {
                std::ostringstream os;
                os << "row-placement angle " << inf.needed << " exceeds dual-cone budget "
                   << inf.available << " at theta_star " << theta_star;
                last_failure = os.str();
                break; // bump theta_star
            }

            // Compose with the barycentric change of basis so the network
            // consumes raw inputs, then solve the last layer on the collapsed
            // class means.
            std::vector<Mat> cw;
            std::vector<Vec> cb;
            for (size_t l = 0; l < chain.weights.size(); ++l) {
                cw.push_back(chain.weights[l] * frame.forward);
                cb.push_back(chain.biases[l]);
            }
            CumulativeNet partial;
            try {
                partial = CumulativeNet::checked(cw, cb, tol);
            } catch (const RankError& e) {
                last_failure = e.what();
                continue;
            }

            const Mat x0 = ds.data_matrix();
            std::vector<Mat> snaps = tau_chain(partial, x0, tol);
            const Mat& deep = snaps.empty() ? x0 : snaps.back();
            ClassSlices slices = class_slices(ds);
            bool collapsed_ok = true;
            Mat collapsed_means(m, q);
            for (Index j = 0; j < q; ++j) {
                Mat block = deep.middleCols(slices.offset[static_cast<size_t>(j)],
                                            slices.count[static_cast<size_t>(j)]);
                if (block_collapse_error(block) > collapse_tol) collapsed_ok = false;
                collapsed_means.col(j) = block.rowwise().mean();
            }
            if (!collapsed_ok) {
                last_failure = "a class failed to collapse to a point";
                continue;
            }
            if (rank(collapsed_means, tol) < q) {
                last_failure = "collapsed class means are rank-deficient";
                continue;
            }

            auto [wl, bl] = solve_last_layer(collapsed_means, ds.labels, tol);
            cw.push_back(wl);
            cb.push_back(bl);
            CumulativeNet cnet = CumulativeNet::checked(cw, cb, tol);
            LayerNet net = layers_from_cumulative(cnet, tol);
            certify_interpolation(net, ds, certify_tol, "build_clustered");

            // Cones reported in raw coordinates (schematic axis direction).
            std::vector<Cone> raw_cones;
            for (const Cone& c : chain.cones) {
                Vec axis = frame.backward * c.axis;
                raw_cones.emplace_back(frame.from_coords(c.apex), axis / axis.norm(), c.theta);
            }
            ConstructionTrace trace = make_trace(ds, cnet, raw_cones, order, theta_star);
            return {std::move(net), std::move(trace)};
        }
        theta_star += 0.5 * (kPi - theta_star);
    }
    throw ConstructionError("build_clustered: construction failed after retries (" + last_failure + ")");
}

// ---------------------------------------------------------------------------
// SLS constructor
// ---------------------------------------------------------------------------

std::pair<LayerNet, ConstructionTrace> build_sls(const LabeledDataset& ds,
                                                 const SLSCertificate& cert,
                                                 const SLSOptions& opts) {
    ds.validate();
    const Index m = ds.ambient_dim();
    const Index q = ds.class_count();

    std::string why;
    if (!certificate_valid(ds, cert, &why)) {
        throw InvalidInputError("build_sls: certificate fails re-verification (" + why + ")");
    }
    std::vector<double> alphas =
        resolve_fractions(opts.theta_alphas, q, 0.0, 1.0, 0.5, "theta_alphas");

    const Tolerance tol;
    Vec u_hat = diag_direction(m);

    std::vector<Mat> cw;
    std::vector<Vec> cb;
    std::vector<Cone> cones;
    for (Index step = 0; step < q; ++step) {
        const Vec& p = cert.base_points[static_cast<size_t>(step)];
        const Vec& h = cert.normals[static_cast<size_t>(step)];
        const Index cls = cert.ordering[static_cast<size_t>(step)];

        // Forward set: later classes plus the earlier base points.
        Index cols = step;
        for (Index later = step + 1; later < q; ++later) {
            cols += ds.points_in_class(cert.ordering[static_cast<size_t>(later)]);
        }
        Mat fwd(m, cols);
        Index at = 0;
        for (Index earlier = 0; earlier < step; ++earlier) {
            fwd.col(at++) = cert.base_points[static_cast<size_t>(earlier)];
        }
        for (Index later = step + 1; later < q; ++later) {
            const Mat& c = ds.classes[static_cast<size_t>(cert.ordering[static_cast<size_t>(later)])];
            fwd.middleCols(at, c.cols()) = c;
            at += c.cols();
        }
        const double fwd_ap = cols > 0 ? min_enclosing_aperture(p, h, fwd, 0.0) : 0.0;
        const double bwd_ap =
            min_enclosing_aperture(p, -h, ds.classes[static_cast<size_t>(cls)], 0.0);
        const double theta_min = std::max(fwd_ap, bwd_ap);
        if (!(theta_min < kPi - 1e-12)) {
            throw ConstructionError(
                "build_sls: no aperture below pi encloses both sides at step " +
                std::to_string(step) + " (inconsistent certificate)");
        }
        const double theta = theta_min + alphas[static_cast<size_t>(step)] * (kPi - theta_min);

        Cone cone(p, h, theta);
        auto [w, b] = build_truncation_layer(cone, m, m);
        cw.push_back(std::move(w));
        cb.push_back(std::move(b));
        cones.push_back(std::move(cone));
    }

    CumulativeNet partial = CumulativeNet::checked(cw, cb, tol);
    const Mat x0 = ds.data_matrix();
    std::vector<Mat> snaps = tau_chain(partial, x0, tol);
    const Mat& deep = snaps.empty() ? x0 : snaps.back();
    ClassSlices slices = class_slices(ds);
    const double diam = ds.diameter();
    const double collapse_tol = 1e-9 * std::max(1.0, diam);

    Mat collapsed_means(m, q);
    for (Index step = 0; step < q; ++step) {
        const Index cls = cert.ordering[static_cast<size_t>(step)];
        Mat block = deep.middleCols(slices.offset[static_cast<size_t>(cls)],
                                    slices.count[static_cast<size_t>(cls)]);
        const double err = block_collapse_error(block);
        Vec mean = block.rowwise().mean();
        const double drift = (mean - cert.base_points[static_cast<size_t>(step)]).norm();
        if (err > collapse_tol || drift > collapse_tol) {
            throw ConstructionError("build_sls: class " + std::to_string(cls) +
                                    " did not collapse onto its base point");
        }
        collapsed_means.col(cls) = mean;
    }
    if (rank(collapsed_means, tol) < q) {
        throw RankError("build_sls: the base points {p_j} are linearly dependent");
    }

    auto [wl, bl] = solve_last_layer(collapsed_means, ds.labels, tol);
    cw.push_back(std::move(wl));
    cb.push_back(std::move(bl));
    CumulativeNet cnet = CumulativeNet::checked(cw, cb, tol);
    LayerNet net = layers_from_cumulative(cnet, tol);
    const double certify_tol = opts.certify_tol > 0.0 ? opts.certify_tol : 1e-8 * std::max(1.0, diam);
    certify_interpolation(net, ds, certify_tol, "build_sls");

    ConstructionTrace trace = make_trace(ds, cnet, cones, cert.ordering, 0.0);
    return {std::move(net), std::move(trace)};
}

} // namespace zerocone

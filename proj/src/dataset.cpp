#include "zerocone/dataset.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zerocone/rng.hpp"
#include "zerocone/separation.hpp"

namespace zerocone {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

Index LabeledDataset::total_points() const {
    Index n = 0;
    for (const Mat& c : classes) n += c.cols();
    return n;
}

Mat LabeledDataset::data_matrix() const {
    Mat x(ambient_dim(), total_points());
    Index at = 0;
    for (const Mat& c : classes) {
        x.middleCols(at, c.cols()) = c;
        at += c.cols();
    }
    return x;
}

Mat LabeledDataset::labels_ext() const {
    Mat y(labels.rows(), total_points());
    Index at = 0;
    for (Index j = 0; j < class_count(); ++j) {
        const Index nj = classes[static_cast<size_t>(j)].cols();
        y.middleCols(at, nj) = labels.col(j).replicate(1, nj);
        at += nj;
    }
    return y;
}

double LabeledDataset::diameter() const {
    Mat x = data_matrix();
    double best = 0.0;
    for (Index i = 0; i < x.cols(); ++i) {
        for (Index j = i + 1; j < x.cols(); ++j) {
            best = std::max(best, (x.col(i) - x.col(j)).norm());
        }
    }
    return best;
}

void LabeledDataset::validate(const Tolerance& tol) const {
    if (classes.empty()) throw InvalidInputError("dataset: no classes");
    const Index m = ambient_dim();
    const Index q = class_count();
    if (q > m) throw InvalidInputError("dataset: class count exceeds ambient dimension");
    for (const Mat& c : classes) {
        if (c.rows() != m) throw InvalidInputError("dataset: inconsistent ambient dimension");
        if (c.cols() < 1) throw InvalidInputError("dataset: empty class");
        if (!c.allFinite()) throw InvalidInputError("dataset: non-finite points");
    }
    if (labels.rows() != q || labels.cols() != q) {
        throw InvalidInputError("dataset: label matrix must be Q x Q");
    }
    if (!labels.allFinite()) throw InvalidInputError("dataset: non-finite labels");
    if (rank(labels, tol) < q) throw RankError("dataset: label matrix is rank-deficient");
}

namespace {

struct MeansInfo {
    std::vector<Vec> means;
    Vec barycenter;
};

MeansInfo means_and_barycenter(const LabeledDataset& ds) {
    MeansInfo info;
    info.means.reserve(static_cast<size_t>(ds.class_count()));
    info.barycenter = Vec::Zero(ds.ambient_dim());
    for (const Mat& c : ds.classes) {
        info.means.push_back(c.rowwise().mean());
        info.barycenter += info.means.back();
    }
    info.barycenter /= static_cast<double>(ds.class_count());
    return info;
}

Mat means_matrix(const std::vector<Vec>& means) {
    Mat b(means.front().size(), static_cast<Index>(means.size()));
    for (size_t j = 0; j < means.size(); ++j) b.col(static_cast<Index>(j)) = means[j];
    return b;
}

} // namespace

ClassStats class_stats(const LabeledDataset& ds) {
    ds.validate();
    ClassStats st;
    MeansInfo info = means_and_barycenter(ds);
    st.means = std::move(info.means);
    st.barycenter = std::move(info.barycenter);
    st.delta = 0.0;
    for (Index j = 0; j < ds.class_count(); ++j) {
        Mat dev = ds.classes[static_cast<size_t>(j)].colwise() - st.means[static_cast<size_t>(j)];
        for (Index i = 0; i < dev.cols(); ++i) st.delta = std::max(st.delta, dev.col(i).norm());
        st.deviations.push_back(std::move(dev));
    }
    const double scale = std::max(1.0, st.barycenter.norm());
    for (Index j = 0; j < ds.class_count(); ++j) {
        Vec d = st.barycenter - st.means[static_cast<size_t>(j)];
        const double dist = d.norm();
        st.mean_dists.push_back(dist);
        if (dist <= 1e-12 * scale) {
            throw InvalidInputError("class_stats: mean of class " + std::to_string(j) +
                                    " coincides with the barycenter (direction undefined)");
        }
        st.directions.push_back(d / dist);
    }
    return st;
}

std::pair<LabeledDataset, BarycentricFrame> to_barycentric(const LabeledDataset& ds,
                                                           const Tolerance& tol) {
    ds.validate(tol);
    MeansInfo info = means_and_barycenter(ds);
    Mat b = means_matrix(info.means);
    const Index m = ds.ambient_dim();
    const Index q = ds.class_count();
    if (rank(b, tol) < q) throw RankError("to_barycentric: class means are linearly dependent");

    BarycentricFrame frame;
    frame.basis = b;
    Eigen::JacobiSVD<Mat> svd(b, Eigen::ComputeFullU);
    frame.complement = svd.matrixU().rightCols(m - q);
    frame.forward = Mat(m, m);
    frame.forward.topRows(q) = pinv(b, tol);
    frame.forward.bottomRows(m - q) = frame.complement.transpose();
    frame.backward = Mat(m, m);
    frame.backward.leftCols(q) = b;
    frame.backward.rightCols(m - q) = frame.complement;

    LabeledDataset out;
    out.labels = ds.labels;
    out.classes.reserve(ds.classes.size());
    for (const Mat& c : ds.classes) out.classes.push_back(frame.forward * c);
    return {std::move(out), std::move(frame)};
}

ClusterReport check_clustered(const LabeledDataset& ds, double c0) {
    if (!(c0 > 0.0 && c0 < 0.25)) throw InvalidInputError("check_clustered: c0 must lie in (0, 1/4)");
    ClassStats st = class_stats(ds);

    ClusterReport rep;
    rep.delta = st.delta;
    rep.c0 = c0;
    rep.min_mean_dist = *std::min_element(st.mean_dists.begin(), st.mean_dists.end());

    if (!(st.delta < c0 * rep.min_mean_dist)) {
        std::ostringstream os;
        os << "clustercond1: delta " << st.delta << " >= c0 * min mean distance "
           << c0 * rep.min_mean_dist;
        rep.failure_reasons.push_back(os.str());
    }

    const Index q = ds.class_count();
    double max_theta = 0.0;
    bool aperture_ok = true;
    for (Index j = 0; j < q; ++j) {
        Mat others(ds.ambient_dim(), q - 1);
        Index at = 0;
        for (Index k = 0; k < q; ++k) {
            if (k != j) others.col(at++) = st.means[static_cast<size_t>(k)];
        }
        double theta;
        try {
            theta = min_enclosing_aperture(st.means[static_cast<size_t>(j)],
                                           st.directions[static_cast<size_t>(j)], others,
                                           4.0 * st.delta);
        } catch (const InvalidInputError&) {
            theta = std::numeric_limits<double>::infinity();
            rep.failure_reasons.push_back(
                "clustercond2: 4*delta ball around another mean touches mean " + std::to_string(j));
        }
        rep.theta_star_j.push_back(theta);
        max_theta = std::max(max_theta, theta);
        if (!(theta < kPi)) aperture_ok = false;
    }
    if (!aperture_ok && rep.failure_reasons.empty()) {
        rep.failure_reasons.push_back("clustercond2: max_j theta_star_j >= pi");
    } else if (!aperture_ok &&
               rep.failure_reasons.back().rfind("clustercond2", 0) != 0) {
        rep.failure_reasons.push_back("clustercond2: max_j theta_star_j >= pi");
    }

    if (aperture_ok) {
        const double lo = std::max(kPi / 2.0, max_theta);
        rep.theta_star = 0.5 * (lo + kPi);
    }
    rep.passes = rep.failure_reasons.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// Sequential linear separability search
// ---------------------------------------------------------------------------

namespace {

struct SlsStep {
    Index cls;
    double t;
    Vec p;
    Vec h;
    double margin;
};

struct SlsSearcher {
    const LabeledDataset& ds;
    const std::vector<Vec>& means;
    const Vec& barycenter;
    std::vector<double> t_grid;
    double min_margin;
    std::vector<Index> forced;
    std::vector<SlsStep> placed;
    std::vector<SlsAttempt>* attempts;
    long budget = 20000;

    bool search(std::vector<Index>& remaining) {
        if (remaining.empty()) return true;
        if (--budget < 0) return false;

        std::vector<Index> candidates;
        if (!forced.empty()) {
            candidates.push_back(forced[placed.size()]);
        } else {
            candidates = remaining; // already in heuristic order
        }
        for (Index c : candidates) {
            auto it = std::find(remaining.begin(), remaining.end(), c);
            if (it == remaining.end()) continue;

            SlsStep best{c, 0.0, Vec(), Vec(), -1.0};
            for (double t : t_grid) {
                Vec p = t * barycenter + (1.0 - t) * means[static_cast<size_t>(c)];
                Mat positive = positive_side(c, remaining, p.size());
                if (positive.cols() == 0) {
                    // Last class: any hyperplane through p works; pick the
                    // direction from the class mean toward the barycenter.
                    Vec h = barycenter - means[static_cast<size_t>(c)];
                    if (h.norm() < 1e-14) continue;
                    h.normalize();
                    const Mat& cls = ds.classes[static_cast<size_t>(c)];
                    double margin = ((-(cls.colwise() - p)).transpose() * h).minCoeff();
                    if (margin > best.margin) best = SlsStep{c, t, p, h, margin};
                    continue;
                }
                SeparationResult sep =
                    separate_through_point(p, ds.classes[static_cast<size_t>(c)], positive);
                if (sep.margin > best.margin) best = SlsStep{c, t, p, sep.normal, sep.margin};
            }
            if (best.margin >= min_margin) {
                placed.push_back(best);
                std::vector<Index> rest;
                for (Index r : remaining) {
                    if (r != c) rest.push_back(r);
                }
                if (search(rest)) return true;
                placed.pop_back();
            }
            if (attempts->size() < 64) {
                SlsAttempt att;
                for (const SlsStep& s : placed) att.prefix.push_back(s.cls);
                att.candidate = c;
                att.best_margin = std::max(0.0, best.margin);
                attempts->push_back(std::move(att));
            }
        }
        return false;
    }

    Mat positive_side(Index cls, const std::vector<Index>& remaining, Index dim) const {
        Index cols = static_cast<Index>(placed.size());
        for (Index r : remaining) {
            if (r != cls) cols += ds.classes[static_cast<size_t>(r)].cols();
        }
        Mat pos(dim, cols);
        Index at = 0;
        for (const SlsStep& s : placed) pos.col(at++) = s.p;
        for (Index r : remaining) {
            if (r == cls) continue;
            const Mat& c = ds.classes[static_cast<size_t>(r)];
            pos.middleCols(at, c.cols()) = c;
            at += c.cols();
        }
        return pos;
    }
};

} // namespace

bool certificate_valid(const LabeledDataset& ds, const SLSCertificate& cert, std::string* why) {
    const Index q = ds.class_count();
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<Index>(cert.ordering.size()) != q) return fail("ordering size mismatch");
    std::vector<bool> seen(static_cast<size_t>(q), false);
    for (Index c : cert.ordering) {
        if (c < 0 || c >= q || seen[static_cast<size_t>(c)]) return fail("ordering is not a permutation");
        seen[static_cast<size_t>(c)] = true;
    }
    const double slack = 1e-12 * std::max(1.0, ds.diameter());
    for (size_t step = 0; step < cert.ordering.size(); ++step) {
        const Index cls = cert.ordering[step];
        const Vec& p = cert.base_points[step];
        const Vec& h = cert.normals[step];
        const double m = cert.margins[step];
        if (m <= 0.0) return fail("non-positive margin at step " + std::to_string(step));
        if (std::abs(h.norm() - 1.0) > 1e-8) return fail("normal is not unit at step " + std::to_string(step));
        const Mat& own = ds.classes[static_cast<size_t>(cls)];
        for (Index i = 0; i < own.cols(); ++i) {
            if (h.dot(own.col(i) - p) > -m + slack) {
                return fail("class-side inequality fails at step " + std::to_string(step));
            }
        }
        for (size_t later = step + 1; later < cert.ordering.size(); ++later) {
            const Mat& other = ds.classes[static_cast<size_t>(cert.ordering[later])];
            for (Index i = 0; i < other.cols(); ++i) {
                if (h.dot(other.col(i) - p) < m - slack) {
                    return fail("far-side inequality fails at step " + std::to_string(step));
                }
            }
        }
        for (size_t earlier = 0; earlier < step; ++earlier) {
            if (h.dot(cert.base_points[earlier] - p) < m - slack) {
                return fail("earlier base point fails at step " + std::to_string(step));
            }
        }
        if (!(cert.theta_min[step] < kPi)) return fail("theta_min >= pi at step " + std::to_string(step));
    }
    return true;
}

SlsSearchResult find_sls_certificate(const LabeledDataset& ds, const SlsSearchOptions& opts) {
    ds.validate();
    MeansInfo info = means_and_barycenter(ds);
    {
        Mat b = means_matrix(info.means);
        if (rank(b) < ds.class_count()) {
            throw RankError("find_sls_certificate: class means are linearly dependent");
        }
    }

    SlsSearchResult result;
    SlsSearcher searcher{ds, info.means, info.barycenter, {}, 0.0, {}, {}, &result.attempts};

    searcher.t_grid = opts.t_grid;
    if (searcher.t_grid.empty()) {
        for (int i = 1; i <= 19; ++i) searcher.t_grid.push_back(0.05 * i);
    }
    searcher.min_margin = opts.min_margin >= 0.0 ? opts.min_margin : 1e-6 * ds.diameter();
    if (!opts.forced_ordering.empty()) {
        if (static_cast<Index>(opts.forced_ordering.size()) != ds.class_count()) {
            throw InvalidInputError("find_sls_certificate: forced ordering has wrong length");
        }
        searcher.forced = opts.forced_ordering;
    }

    // Heuristic: try outermost classes (farthest mean from the barycenter) first.
    std::vector<Index> remaining(static_cast<size_t>(ds.class_count()));
    for (Index j = 0; j < ds.class_count(); ++j) remaining[static_cast<size_t>(j)] = j;
    std::stable_sort(remaining.begin(), remaining.end(), [&](Index a, Index b) {
        return (info.means[static_cast<size_t>(a)] - info.barycenter).norm() >
               (info.means[static_cast<size_t>(b)] - info.barycenter).norm();
    });

    if (!searcher.search(remaining)) return result;

    SLSCertificate cert;
    for (size_t step = 0; step < searcher.placed.size(); ++step) {
        const SlsStep& s = searcher.placed[step];
        cert.ordering.push_back(s.cls);
        cert.base_points.push_back(s.p);
        cert.t_params.push_back(s.t);
        cert.normals.push_back(s.h);
        cert.margins.push_back(s.margin);
        // Smallest usable aperture: enclose the class about -h and everything
        // else (later classes, earlier base points) about +h.
        Mat fwd(ds.ambient_dim(),
                [&] {
                    Index c = static_cast<Index>(step);
                    for (size_t later = step + 1; later < searcher.placed.size(); ++later) {
                        c += ds.classes[static_cast<size_t>(searcher.placed[later].cls)].cols();
                    }
                    return c;
                }());
        Index at = 0;
        for (size_t earlier = 0; earlier < step; ++earlier) fwd.col(at++) = searcher.placed[earlier].p;
        for (size_t later = step + 1; later < searcher.placed.size(); ++later) {
            const Mat& c = ds.classes[static_cast<size_t>(searcher.placed[later].cls)];
            fwd.middleCols(at, c.cols()) = c;
            at += c.cols();
        }
        const double fwd_ap = min_enclosing_aperture(s.p, s.h, fwd, 0.0);
        const double bwd_ap = min_enclosing_aperture(
            s.p, -s.h, ds.classes[static_cast<size_t>(s.cls)], 0.0);
        cert.theta_min.push_back(std::max(fwd_ap, bwd_ap));
    }

    std::string why;
    if (!certificate_valid(ds, cert, &why)) {
        throw ConstructionError("find_sls_certificate: produced certificate failed re-verification: " + why);
    }
    result.certificate = std::move(cert);
    return result;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

LabeledDataset gen_clustered(std::uint64_t seed, Index ambient_dim, Index class_count,
                             Index points_per_class, double spread) {
    if (class_count < 2 || class_count > ambient_dim) {
        throw InvalidInputError("gen_clustered: need 2 <= Q <= M");
    }
    if (points_per_class < 1) throw InvalidInputError("gen_clustered: points_per_class >= 1");
    if (!(spread > 0.0 && spread < 1.0)) throw InvalidInputError("gen_clustered: spread must lie in (0, 1)");

    const double c0 = 0.125;
    for (int attempt = 0; attempt < 16; ++attempt) {
        Rng rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
        Mat frame = random_orthonormal(rng, ambient_dim, class_count);
        const double scale = 1.0 + rng.uniform();
        Vec center = rng.normal_vec(ambient_dim);
        const double pair_dist = scale * std::numbers::sqrt2;
        const double ball_radius = spread * c0 * pair_dist / 2.0;

        LabeledDataset ds;
        ds.labels = Mat::Identity(class_count, class_count);
        for (Index j = 0; j < class_count; ++j) {
            Vec mean = center + scale * frame.col(j);
            Mat pts(ambient_dim, points_per_class);
            for (Index i = 0; i < points_per_class; ++i) {
                pts.col(i) = mean + ball_radius * rng.ball_vec(ambient_dim);
            }
            ds.classes.push_back(std::move(pts));
        }
        if (check_clustered(ds, c0).passes) return ds;
    }
    throw GenerationError("gen_clustered: could not satisfy the clustering conditions");
}

LabeledDataset gen_sls(std::uint64_t seed, Index ambient_dim, Index class_count,
                       Index points_per_class) {
    if (class_count < 2 || class_count > ambient_dim || ambient_dim < 3) {
        throw InvalidInputError("gen_sls: need 2 <= Q <= M and M >= 3");
    }
    if (points_per_class < 1) throw InvalidInputError("gen_sls: points_per_class >= 1");

    const Index q = class_count;
    const double gamma = 0.30;       // radius decay per shell
    const double thickness = 0.04;   // relative radial thickness of a crescent
    const double deg = kPi / 180.0;

    for (int attempt = 0; attempt < 12; ++attempt) {
        Rng rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
        Mat basis = random_orthonormal(rng, ambient_dim, ambient_dim);
        const double scale = 1.0 + rng.uniform();
        Vec center = rng.normal_vec(ambient_dim);

        LabeledDataset ds;
        ds.labels = Mat::Identity(q, q);
        ds.classes.resize(static_cast<size_t>(q));

        auto embed = [&](double px, double py, Index cls) {
            Vec v = center + scale * (px * basis.col(0) + py * basis.col(1));
            // Per-class lift off the crescent plane keeps the means full rank.
            if (ambient_dim > 2) {
                const Index axis = 2 + cls % (ambient_dim - 2);
                const double rho = std::pow(gamma, static_cast<double>(cls));
                v += scale * 0.05 * rho * basis.col(axis);
            }
            return v;
        };

        for (Index j = 0; j < q; ++j) {
            const double rho = std::pow(gamma, static_cast<double>(j));
            Mat pts(ambient_dim, points_per_class);
            if (j == q - 1) {
                // Innermost class: a disk at the common center.
                const double blob = 0.10 * std::pow(gamma, static_cast<double>(q - 2));
                for (Index i = 0; i < points_per_class; ++i) {
                    Vec b = rng.ball_vec(2);
                    pts.col(i) = embed(blob * b(0), blob * b(1), j);
                }
            } else {
                // Crescent j: angular span biased off the previous one.
                const double psi = (-40.0 + 130.0 * static_cast<double>(j)) * deg;
                const double beta = (j == 0 ? 70.0 : 80.0) * deg;
                for (Index i = 0; i < points_per_class; ++i) {
                    const double phi = psi + rng.uniform(-beta, beta);
                    const double r = rho * (1.0 + thickness * rng.uniform(-1.0, 1.0));
                    pts.col(i) = embed(r * std::cos(phi), r * std::sin(phi), j);
                }
            }
            ds.classes[static_cast<size_t>(j)] = std::move(pts);
        }

        try {
            Mat b = means_matrix(means_and_barycenter(ds).means);
            if (rank(b) < q) continue;
            if (check_clustered(ds, 0.125).passes) continue; // must NOT be clustered
            if (!find_sls_certificate(ds).certificate.has_value()) continue;
        } catch (const InvalidInputError&) {
            continue;
        }
        return ds;
    }
    throw GenerationError("gen_sls: could not produce a sequentially separable dataset");
}

} // namespace zerocone

#include "zerocone/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace zerocone {

void Tolerance::validate() const {
    if (!(rank_rel > 0.0 && rank_rel < 1.0) ||
        !(identity_abs > 0.0 && identity_abs < 1.0)) {
        throw InvalidInputError("Tolerance fields must lie strictly in (0, 1)");
    }
}

bool Permutation::is_identity() const {
    for (Index i = 0; i < size(); ++i) {
        if (images[static_cast<size_t>(i)] != i) return false;
    }
    return true;
}

bool Permutation::is_valid() const {
    std::vector<bool> seen(images.size(), false);
    for (Index im : images) {
        if (im < 0 || im >= size() || seen[static_cast<size_t>(im)]) return false;
        seen[static_cast<size_t>(im)] = true;
    }
    return true;
}

Mat Permutation::matrix() const {
    Mat p = Mat::Zero(size(), size());
    for (Index i = 0; i < size(); ++i) p(i, images[static_cast<size_t>(i)]) = 1.0;
    return p;
}

Mat Permutation::apply_rows(const Mat& a) const {
    if (a.rows() != size()) throw InvalidInputError("permutation size mismatch");
    Mat out(a.rows(), a.cols());
    for (Index i = 0; i < size(); ++i) out.row(i) = a.row(images[static_cast<size_t>(i)]);
    return out;
}

Permutation Permutation::inverse() const {
    Permutation inv;
    inv.images.assign(images.size(), 0);
    for (Index i = 0; i < size(); ++i) inv.images[static_cast<size_t>(images[static_cast<size_t>(i)])] = i;
    return inv;
}

Permutation Permutation::identity(Index n) {
    Permutation p;
    p.images.resize(static_cast<size_t>(n));
    std::iota(p.images.begin(), p.images.end(), Index{0});
    return p;
}

namespace {

void require_finite(const Mat& a, const char* what) {
    if (a.size() == 0) throw InvalidInputError(std::string(what) + ": empty matrix");
    if (!a.allFinite()) throw InvalidInputError(std::string(what) + ": non-finite entries");
}

} // namespace

Mat pinv(const Mat& a, const Tolerance& tol) {
    tol.validate();
    require_finite(a, "pinv");
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tol.rank_rel * sv(0) : 0.0;
    Vec inv_sv = Vec::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Index rank(const Mat& a, const Tolerance& tol) {
    tol.validate();
    require_finite(a, "rank");
    Eigen::JacobiSVD<Mat> svd(a);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = tol.rank_rel * sv(0);
    Index r = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= cutoff) ++r;
    }
    return r;
}

Mat rotation_to(const Vec& a, const Vec& b) {
    const Index n = a.size();
    if (n != b.size()) throw InvalidInputError("rotation_to: dimension mismatch");
    if (n < 2) throw InvalidInputError("rotation_to: dimension must be >= 2");
    if (!a.allFinite() || !b.allFinite()) throw InvalidInputError("rotation_to: non-finite input");
    constexpr double unit_tol = 1e-8;
    if (std::abs(a.norm() - 1.0) > unit_tol || std::abs(b.norm() - 1.0) > unit_tol) {
        throw InvalidInputError("rotation_to: inputs must be unit vectors");
    }

    const double c = std::clamp(a.dot(b), -1.0, 1.0);

    if (c <= -1.0 + 1e-8) {
        // Antipodal: rotate by pi in the plane spanned by a and a fixed
        // companion axis (lowest-index basis vector not parallel to a).
        Index k = 0;
        while (k < n && std::abs(a(k)) > 0.9) ++k;
        if (k == n) k = 0; // unreachable for unit vectors, defensive only
        Vec v = Vec::Zero(n);
        v(k) = 1.0;
        v -= a(k) * a;
        v.normalize();
        return Mat::Identity(n, n) - 2.0 * (a * a.transpose()) - 2.0 * (v * v.transpose());
    }

    Vec w = b - c * a;
    const double s = w.norm();
    if (s < 1e-14) return Mat::Identity(n, n); // already aligned
    Vec v = w / s;
    Mat r = Mat::Identity(n, n);
    r.noalias() += s * (v * a.transpose() - a * v.transpose());
    r.noalias() += (c - 1.0) * (a * a.transpose() + v * v.transpose());
    return r;
}

Permutation invertible_block_permutation(const Mat& a, Index q, const Tolerance& tol) {
    tol.validate();
    require_finite(a, "invertible_block_permutation");
    if (q < 1 || a.rows() < q || a.cols() < q) {
        throw InvalidInputError("invertible_block_permutation: need >= q rows and columns");
    }
    if (rank(a.leftCols(q), tol) < q) {
        throw RankError("invertible_block_permutation: first q columns are rank-deficient");
    }

    // Rank-revealing QR on the transpose of the first q columns selects the
    // q most independent rows of A.
    Eigen::ColPivHouseholderQR<Mat> qr(a.leftCols(q).transpose());
    const auto& piv = qr.colsPermutation().indices();

    std::vector<Index> chosen(piv.data(), piv.data() + q);
    std::vector<bool> taken(static_cast<size_t>(a.rows()), false);
    for (Index r : chosen) taken[static_cast<size_t>(r)] = true;

    Permutation p;
    p.images = chosen;
    for (Index r = 0; r < a.rows(); ++r) {
        if (!taken[static_cast<size_t>(r)]) p.images.push_back(r);
    }

    Mat block(q, q);
    for (Index i = 0; i < q; ++i) block.row(i) = a.row(p.images[static_cast<size_t>(i)]).head(q);
    Eigen::JacobiSVD<Mat> svd(block);
    const Vec& sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(q - 1) < tol.rank_rel * sv(0)) {
        throw RankError("invertible_block_permutation: no permutation yields an invertible block");
    }
    return p;
}

} // namespace zerocone

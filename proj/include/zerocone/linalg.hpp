#pragma once

#include <Eigen/Dense>
#include <vector>

#include "zerocone/errors.hpp"

namespace zerocone {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical cutoffs shared by the rank-sensitive routines.
struct Tolerance {
    double rank_rel = 1e-10;   // singular values below rank_rel * sigma_max count as zero
    double identity_abs = 1e-9; // absolute slack when asserting matrix identities

    void validate() const;
};

// Bijection on {0..size-1}. apply(x)[i] = x[images[i]], so as a matrix
// P has P(i, images[i]) = 1 and P*A reorders the rows of A.
struct Permutation {
    std::vector<Index> images;

    Index size() const { return static_cast<Index>(images.size()); }
    bool is_identity() const;
    bool is_valid() const;
    Mat matrix() const;
    Mat apply_rows(const Mat& a) const;
    Permutation inverse() const;

    static Permutation identity(Index n);
};

// Moore-Penrose pseudoinverse via SVD with a relative rank cutoff.
Mat pinv(const Mat& a, const Tolerance& tol = {});

// Number of singular values >= rank_rel * sigma_max.
Index rank(const Mat& a, const Tolerance& tol = {});

// Special orthogonal R with R a = b that acts as the identity on the
// orthogonal complement of span{a, b}. a and b must be unit vectors of the
// same dimension >= 2. For a ~ -b the rotation is by pi in the plane spanned
// by a and the lowest-index standard basis vector not parallel to it.
Mat rotation_to(const Vec& a, const Vec& b);

// Row permutation making the leading q x q block of P*A invertible
// (smallest singular value of the block >= rank_rel * its sigma_max).
// Selection is greedy pivoted on the first q columns; throws RankError when
// those columns are rank-deficient.
Permutation invertible_block_permutation(const Mat& a, Index q,
                                         const Tolerance& tol = {});

} // namespace zerocone

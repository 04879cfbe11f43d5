#include "zerocone/rng.hpp"

#include <Eigen/QR>

namespace zerocone {

Mat random_orthonormal(Rng& rng, Index dim, Index cols) {
    if (cols > dim) throw InvalidInputError("random_orthonormal: cols > dim");
    Mat g = rng.normal_mat(dim, dim);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(dim, cols);
    // Fix signs so the frame is a deterministic function of g.
    Mat r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    for (Index j = 0; j < cols; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

} // namespace zerocone

#pragma once

#include <cstdint>
#include <random>

#include "zerocone/linalg.hpp"

namespace zerocone {

// Seeded RNG with hand-rolled distributions. mt19937_64 output is fixed by
// the standard; std::*_distribution is not, and generator outputs must be
// byte-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Marsaglia's polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    Vec normal_vec(Index n) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    Mat normal_mat(Index rows, Index cols) {
        Mat m(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

    Vec unit_vec(Index n) {
        Vec v;
        do {
            v = normal_vec(n);
        } while (v.norm() < 1e-12);
        return v / v.norm();
    }

    // Uniform in the unit ball of R^n.
    Vec ball_vec(Index n) {
        Vec dir = unit_vec(n);
        const double r = std::pow(uniform(), 1.0 / static_cast<double>(n));
        return r * dir;
    }

    // Derives an independent stream (for retry attempts).
    std::uint64_t derive(std::uint64_t salt) {
        std::uint64_t x = engine_() ^ (salt * 0x9e3779b97f4a7c15ULL);
        return x ? x : 1;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Random orthonormal frame: first `cols` columns of the Q factor of a
// Gaussian matrix, with a deterministic sign convention.
Mat random_orthonormal(Rng& rng, Index dim, Index cols);

} // namespace zerocone

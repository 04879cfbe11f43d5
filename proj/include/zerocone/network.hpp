#pragma once

#include <vector>

#include "zerocone/linalg.hpp"

namespace zerocone {

// Layerwise parameterization: x^(l) = relu(W_l x^(l-1) + b_l) for l < L and
// an affine last layer.
struct LayerNet {
    std::vector<Mat> weights; // W_l: d_l x d_{l-1}
    std::vector<Vec> biases;  // b_l: d_l

    Index depth() const { return static_cast<Index>(weights.size()); }
    Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
    Index output_dim() const { return weights.empty() ? 0 : weights.back().rows(); }
    std::vector<Index> widths() const; // d_0 .. d_L

    void validate() const; // dimension chaining, finiteness
};

// Cumulative parameterization: W^(l) = W_l ... W_1 maps input space directly
// to layer l. Surjectivity of every W^(l) is validated once, at construction.
struct CumulativeNet {
    std::vector<Mat> weights; // W^(l): d_l x d_0
    std::vector<Vec> biases;  // b^(l): d_l

    Index depth() const { return static_cast<Index>(weights.size()); }
    Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
    std::vector<Index> widths() const;

    static CumulativeNet checked(std::vector<Mat> weights, std::vector<Vec> biases,
                                 const Tolerance& tol = {});
};

// Forward pass on a batch (columns of x). L-1 ReLU layers, affine last layer.
Mat forward(const LayerNet& net, const Mat& x);

// Truncation map pinv(W) (relu(W X + B) - B), applied columnwise; the image
// lives back in the input space of W.
Mat truncate(const Mat& w, const Vec& b, const Mat& x, const Tolerance& tol = {});

CumulativeNet cumulative_from_layers(const LayerNet& net, const Tolerance& tol = {});

// Inverts the cumulative recursion: W_1 = W^(1), W_l = W^(l) pinv(W^(l-1)),
// b_l = b^(l) - W_l b^(l-1). Verifies the round trip back to the cumulative
// form and throws InconsistencyError when the chain is not realizable.
LayerNet layers_from_cumulative(const CumulativeNet& cnet, const Tolerance& tol = {});

// Successive truncations by the cumulative pairs:
// returns [(X)^(tau,1), ..., (X)^(tau,L-1)], each in input space.
std::vector<Mat> tau_chain(const CumulativeNet& cnet, const Mat& x, const Tolerance& tol = {});

// P^(l) computed by the recursion P^(l) = pinv(W^(l)) W^(l) P^(l-1); asserts
// P^(l) = pinv(W^(l)) W^(l) and W^(l) P^(l-1) = W^(l) to identity_abs and
// reports the first failing layer otherwise.
std::vector<Mat> projector_chain(const CumulativeNet& cnet, const Tolerance& tol = {});

} // namespace zerocone

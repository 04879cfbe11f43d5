#include "zerocone/network.hpp"

#include <string>

namespace zerocone {

std::vector<Index> LayerNet::widths() const {
    std::vector<Index> w;
    if (weights.empty()) return w;
    w.push_back(weights.front().cols());
    for (const Mat& m : weights) w.push_back(m.rows());
    return w;
}

void LayerNet::validate() const {
    if (weights.empty()) throw InvalidInputError("LayerNet: at least one layer required");
    if (weights.size() != biases.size()) throw InvalidInputError("LayerNet: weight/bias count mismatch");
    for (size_t l = 0; l < weights.size(); ++l) {
        if (!weights[l].allFinite() || !biases[l].allFinite()) {
            throw InvalidInputError("LayerNet: non-finite parameters at layer " + std::to_string(l + 1));
        }
        if (weights[l].rows() != biases[l].size()) {
            throw InvalidInputError("LayerNet: bias dimension mismatch at layer " + std::to_string(l + 1));
        }
        if (l > 0 && weights[l].cols() != weights[l - 1].rows()) {
            throw InvalidInputError("LayerNet: width chain broken at layer " + std::to_string(l + 1));
        }
    }
}

std::vector<Index> CumulativeNet::widths() const {
    std::vector<Index> w;
    if (weights.empty()) return w;
    w.push_back(weights.front().cols());
    for (const Mat& m : weights) w.push_back(m.rows());
    return w;
}

CumulativeNet CumulativeNet::checked(std::vector<Mat> weights, std::vector<Vec> biases,
                                     const Tolerance& tol) {
    if (weights.empty() || weights.size() != biases.size()) {
        throw InvalidInputError("CumulativeNet: empty or mismatched parameter lists");
    }
    const Index d0 = weights.front().cols();
    for (size_t l = 0; l < weights.size(); ++l) {
        const Mat& w = weights[l];
        if (w.cols() != d0) throw InvalidInputError("CumulativeNet: W^(l) must map from input space");
        if (w.rows() != biases[l].size()) throw InvalidInputError("CumulativeNet: bias dimension mismatch");
        if (!w.allFinite() || !biases[l].allFinite()) throw InvalidInputError("CumulativeNet: non-finite parameters");
        if (rank(w, tol) < w.rows()) {
            throw RankError("CumulativeNet: W^(" + std::to_string(l + 1) + ") is not surjective");
        }
    }
    CumulativeNet c;
    c.weights = std::move(weights);
    c.biases = std::move(biases);
    return c;
}

Mat forward(const LayerNet& net, const Mat& x) {
    net.validate();
    if (x.rows() != net.input_dim()) throw InvalidInputError("forward: input dimension mismatch");
    Mat cur = x;
    const Index l_count = net.depth();
    for (Index l = 0; l < l_count; ++l) {
        Mat z = (net.weights[static_cast<size_t>(l)] * cur).colwise() + net.biases[static_cast<size_t>(l)];
        cur = (l + 1 < l_count) ? z.cwiseMax(0.0) : z;
    }
    return cur;
}

Mat truncate(const Mat& w, const Vec& b, const Mat& x, const Tolerance& tol) {
    if (x.rows() != w.cols()) throw InvalidInputError("truncate: input dimension mismatch");
    if (b.size() != w.rows()) throw InvalidInputError("truncate: bias dimension mismatch");
    Mat z = (w * x).colwise() + b;
    Mat s = z.cwiseMax(0.0);
    return pinv(w, tol) * (s.colwise() - b);
}

CumulativeNet cumulative_from_layers(const LayerNet& net, const Tolerance& tol) {
    net.validate();
    std::vector<Mat> ws;
    std::vector<Vec> bs;
    ws.reserve(net.weights.size());
    bs.reserve(net.biases.size());
    for (size_t l = 0; l < net.weights.size(); ++l) {
        if (l == 0) {
            ws.push_back(net.weights[0]);
            bs.push_back(net.biases[0]);
        } else {
            ws.push_back(net.weights[l] * ws[l - 1]);
            bs.push_back(net.weights[l] * bs[l - 1] + net.biases[l]);
        }
    }
    return CumulativeNet::checked(std::move(ws), std::move(bs), tol);
}

LayerNet layers_from_cumulative(const CumulativeNet& cnet, const Tolerance& tol) {
    LayerNet net;
    for (size_t l = 0; l < cnet.weights.size(); ++l) {
        if (l == 0) {
            net.weights.push_back(cnet.weights[0]);
            net.biases.push_back(cnet.biases[0]);
        } else {
            Mat wl = cnet.weights[l] * pinv(cnet.weights[l - 1], tol);
            net.weights.push_back(wl);
            net.biases.push_back(cnet.biases[l] - wl * cnet.biases[l - 1]);
        }
    }
    // Round trip; fails exactly when ker(W^(l-1)) is not contained in ker(W^(l)).
    CumulativeNet back = cumulative_from_layers(net, tol);
    for (size_t l = 0; l < cnet.weights.size(); ++l) {
        const double wscale = std::max(1.0, cnet.weights[l].norm());
        const double bscale = std::max(1.0, cnet.biases[l].norm());
        if ((back.weights[l] - cnet.weights[l]).norm() > tol.identity_abs * wscale ||
            (back.biases[l] - cnet.biases[l]).norm() > tol.identity_abs * bscale) {
            throw InconsistencyError(
                "layers_from_cumulative: cumulative chain is not realizable at layer " +
                std::to_string(l + 1));
        }
    }
    return net;
}

std::vector<Mat> tau_chain(const CumulativeNet& cnet, const Mat& x, const Tolerance& tol) {
    if (x.rows() != cnet.input_dim()) throw InvalidInputError("tau_chain: input dimension mismatch");
    std::vector<Mat> chain;
    if (cnet.depth() < 2) return chain;
    chain.reserve(static_cast<size_t>(cnet.depth() - 1));
    Mat cur = x;
    for (Index l = 0; l + 1 < cnet.depth(); ++l) {
        cur = truncate(cnet.weights[static_cast<size_t>(l)], cnet.biases[static_cast<size_t>(l)], cur, tol);
        chain.push_back(cur);
    }
    return chain;
}

std::vector<Mat> projector_chain(const CumulativeNet& cnet, const Tolerance& tol) {
    std::vector<Mat> ps;
    ps.reserve(cnet.weights.size());
    for (size_t l = 0; l < cnet.weights.size(); ++l) {
        const Mat& w = cnet.weights[l];
        Mat pw = pinv(w, tol) * w;
        Mat p = (l == 0) ? pw : Mat(pw * ps[l - 1]);
        const double scale = std::max(1.0, w.norm());
        if ((p - pw).norm() > tol.identity_abs) {
            throw InconsistencyError("projector_chain: P^(l) != pinv(W^(l)) W^(l) at layer " +
                                     std::to_string(l + 1));
        }
        if (l > 0 && (w * ps[l - 1] - w).norm() > tol.identity_abs * scale) {
            throw InconsistencyError("projector_chain: W^(l) P^(l-1) != W^(l) at layer " +
                                     std::to_string(l + 1));
        }
        ps.push_back(std::move(p));
    }
    return ps;
}

} // namespace zerocone

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zerocone/dataset.hpp"
#include "zerocone/network.hpp"

namespace zerocone {

struct ZeroLossCertificate {
    double cost = 0.0;
    double variance_term = 0.0;
    double mean_term = 0.0;
    std::vector<double> per_class_residuals; // max entry residual per class
    double max_entry_residual = 0.0;
    double tolerance = 0.0;
    bool passes = false;
};

enum class Builder { Clustered, Sls };

struct ProbeDraw {
    std::vector<double> fractions; // mu/delta ratios or theta alphas
    bool passed = false;
    std::string failure; // empty when passed
};

struct ProbeReport {
    Builder builder = Builder::Clustered;
    Index requested = 0;
    Index passed = 0;
    std::vector<ProbeDraw> draws;
};

// Square loss 1/2 ||X^(L) - Y_ext||_F^2.
double cost(const LayerNet& net, const LabeledDataset& ds);

// Class-normalized decomposition: per-class variance of the outputs plus the
// mean-to-label mismatch; the two sum to the class-weighted cost.
std::pair<double, double> cost_decomposed(const LayerNet& net, const LabeledDataset& ds);

// Entrywise interpolation verdict. tol < 0 defaults to
// 1e-8 * max(1, data diameter).
ZeroLossCertificate certify(const LayerNet& net, const LabeledDataset& ds, double tol = -1.0);

// Rebuilds the network k times with independently drawn free parameters
// (mu fractions or theta fractions) and certifies each one.
ProbeReport degeneracy_probe(const LabeledDataset& ds, Builder builder, Index k,
                             std::uint64_t seed);

struct LayerParamCount {
    Index weights = 0;
    Index biases = 0;
};

struct ParamBreakdown {
    std::vector<LayerParamCount> per_layer;
    Index total_weights = 0;
    Index total_biases = 0;
    Index total = 0;
    Index reference_figure = 0; // Q (M + Q^2), for comparison only
};

ParamBreakdown count_params(const LayerNet& net);

} // namespace zerocone

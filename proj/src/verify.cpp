#include "zerocone/verify.hpp"

#include <algorithm>
#include <cmath>

#include "zerocone/construct.hpp"
#include "zerocone/rng.hpp"

namespace zerocone {

double cost(const LayerNet& net, const LabeledDataset& ds) {
    ds.validate();
    Mat resid = forward(net, ds.data_matrix()) - ds.labels_ext();
    return 0.5 * resid.squaredNorm();
}

std::pair<double, double> cost_decomposed(const LayerNet& net, const LabeledDataset& ds) {
    ds.validate();
    Mat out = forward(net, ds.data_matrix());
    double variance = 0.0;
    double mean_term = 0.0;
    Index at = 0;
    for (Index j = 0; j < ds.class_count(); ++j) {
        const Index nj = ds.points_in_class(j);
        Mat block = out.middleCols(at, nj);
        Vec mean = block.rowwise().mean();
        variance += (block.colwise() - mean).squaredNorm() / static_cast<double>(nj);
        mean_term += (mean - ds.labels.col(j)).squaredNorm();
        at += nj;
    }
    return {variance, mean_term};
}

ZeroLossCertificate certify(const LayerNet& net, const LabeledDataset& ds, double tol) {
    ds.validate();
    ZeroLossCertificate cert;
    cert.tolerance = tol >= 0.0 ? tol : 1e-8 * std::max(1.0, ds.diameter());
    cert.cost = cost(net, ds);
    auto [variance, mean_term] = cost_decomposed(net, ds);
    cert.variance_term = variance;
    cert.mean_term = mean_term;

    Mat resid = (forward(net, ds.data_matrix()) - ds.labels_ext()).cwiseAbs();
    Index at = 0;
    for (Index j = 0; j < ds.class_count(); ++j) {
        const Index nj = ds.points_in_class(j);
        cert.per_class_residuals.push_back(resid.middleCols(at, nj).maxCoeff());
        at += nj;
    }
    cert.max_entry_residual = resid.maxCoeff();
    cert.passes = cert.max_entry_residual <= cert.tolerance;
    return cert;
}

ProbeReport degeneracy_probe(const LabeledDataset& ds, Builder builder, Index k,
                             std::uint64_t seed) {
    if (k < 1) throw InvalidInputError("degeneracy_probe: k must be >= 1");
    ProbeReport report;
    report.builder = builder;
    report.requested = k;

    const Index q = ds.class_count();
    Rng rng(seed);

    // SLS probes share one certificate; the free parameters are the angles.
    std::optional<SLSCertificate> cert;
    if (builder == Builder::Sls) {
        SlsSearchResult res = find_sls_certificate(ds);
        if (!res.certificate) {
            throw InvalidInputError("degeneracy_probe: dataset is not sequentially separable");
        }
        cert = std::move(res.certificate);
    }

    for (Index i = 0; i < k; ++i) {
        ProbeDraw draw;
        for (Index j = 0; j < q; ++j) {
            const double u = 1e-4 + (1.0 - 2e-4) * rng.uniform();
            draw.fractions.push_back(builder == Builder::Clustered ? 2.0 + u : u);
        }
        try {
            LayerNet net;
            if (builder == Builder::Clustered) {
                ClusteredOptions opts;
                opts.mu_fractions = draw.fractions;
                net = build_clustered(ds, opts).first;
            } else {
                SLSOptions opts;
                opts.theta_alphas = draw.fractions;
                net = build_sls(ds, *cert, opts).first;
            }
            ZeroLossCertificate zc = certify(net, ds);
            draw.passed = zc.passes;
            if (!zc.passes) draw.failure = "interpolation residual above tolerance";
        } catch (const std::exception& e) {
            draw.passed = false;
            draw.failure = e.what();
        }
        if (draw.passed) ++report.passed;
        report.draws.push_back(std::move(draw));
    }
    return report;
}

ParamBreakdown count_params(const LayerNet& net) {
    net.validate();
    ParamBreakdown b;
    for (size_t l = 0; l < net.weights.size(); ++l) {
        LayerParamCount c;
        c.weights = net.weights[l].size();
        c.biases = net.biases[l].size();
        b.total_weights += c.weights;
        b.total_biases += c.biases;
        b.per_layer.push_back(c);
    }
    b.total = b.total_weights + b.total_biases;
    const Index m = net.input_dim();
    const Index q = net.output_dim();
    b.reference_figure = q * (m + q * q);
    return b;
}

} // namespace zerocone

#pragma once

#include <string>

#include "zerocone/construct.hpp"
#include "zerocone/dataset.hpp"
#include "zerocone/network.hpp"
#include "zerocone/verify.hpp"

namespace zerocone {

// Dataset schema: {"ambient_dim": int,
//                  "classes": [{"label": [float x Q], "points": [[float x M], ...]}, ...]}
// Labels may be omitted; they default to standard basis vectors.
std::string dataset_to_json(const LabeledDataset& ds);
LabeledDataset dataset_from_json(const std::string& text);

// Network schema: {"widths": [int, ...], "form": "layerwise"|"cumulative",
//                  "layers": [{"W": [[float, ...], ...], "b": [float, ...]}, ...]}
std::string network_to_json(const LayerNet& net);
std::string network_to_json(const CumulativeNet& net);
// Accepts either form; a cumulative file is converted to layers.
LayerNet network_from_json(const std::string& text);

// Certificate schema: {"cost", "variance_term", "mean_term", "passes",
//                      "tolerance", "per_class": [...]}
std::string certificate_to_json(const ZeroLossCertificate& cert);

std::string cluster_report_to_json(const ClusterReport& rep);

// SLS certificate round-trips through JSON for the certify-sls / build split.
std::string sls_certificate_to_json(const SLSCertificate& cert);
SLSCertificate sls_certificate_from_json(const std::string& text);

// Trace schema: {"steps": [{"cone": {"apex": [...], "axis": [...], "theta": f},
//                           "collapsed_class": int, "snapshot_digest": hex}, ...]}
std::string trace_to_json(const ConstructionTrace& trace);

// Cone steps only (apex/axis/theta/collapsed_class); enough to replay the
// idealized collapse for plotting.
struct TraceSummary {
    struct Step {
        Cone cone;
        Index collapsed_class;
        std::string snapshot_digest;
    };
    std::vector<Step> steps;
};
TraceSummary trace_from_json(const std::string& text);

std::string probe_report_to_json(const ProbeReport& rep);
std::string params_to_json(const ParamBreakdown& breakdown, const std::vector<Index>& widths);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace zerocone

#include "zerocone/json_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace zerocone {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_rows_to_json(const Mat& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vec vec_from_json(const json& a, const char* what) {
    if (!a.is_array() || a.empty()) throw ParseError(std::string(what) + ": expected a non-empty array");
    Vec v(static_cast<Index>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ParseError(std::string(what) + ": expected numbers");
        v(static_cast<Index>(i)) = a[i].get<double>();
    }
    return v;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON parse error: ") + e.what());
    }
}

// FNV-1a over the matrix bytes, column major; stable across runs.
std::string digest(const Mat& m) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            const double d = m(i, j);
            const unsigned char* p = reinterpret_cast<const unsigned char*>(&d);
            for (size_t b = 0; b < sizeof(double); ++b) {
                h ^= p[b];
                h *= 1099511628211ULL;
            }
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::string dataset_to_json(const LabeledDataset& ds) {
    json root;
    root["ambient_dim"] = ds.ambient_dim();
    json classes = json::array();
    for (Index j = 0; j < ds.class_count(); ++j) {
        json cls;
        cls["label"] = vec_to_json(ds.labels.col(j));
        json pts = json::array();
        const Mat& c = ds.classes[static_cast<size_t>(j)];
        for (Index i = 0; i < c.cols(); ++i) pts.push_back(vec_to_json(c.col(i)));
        cls["points"] = std::move(pts);
        classes.push_back(std::move(cls));
    }
    root["classes"] = std::move(classes);
    return root.dump(2) + "\n";
}

LabeledDataset dataset_from_json(const std::string& text) {
    json root = parse(text);
    if (!root.contains("ambient_dim") || !root["ambient_dim"].is_number_integer()) {
        throw ParseError("dataset: missing integer field 'ambient_dim'");
    }
    if (!root.contains("classes") || !root["classes"].is_array() || root["classes"].empty()) {
        throw ParseError("dataset: missing non-empty array field 'classes'");
    }
    const Index m = root["ambient_dim"].get<Index>();
    const Index q = static_cast<Index>(root["classes"].size());

    LabeledDataset ds;
    ds.labels = Mat::Identity(q, q);
    bool any_label = false;
    for (Index j = 0; j < q; ++j) {
        const json& cls = root["classes"][static_cast<size_t>(j)];
        if (!cls.contains("points") || !cls["points"].is_array() || cls["points"].empty()) {
            throw ParseError("dataset: class " + std::to_string(j) + " has no points");
        }
        const json& pts = cls["points"];
        Mat c(m, static_cast<Index>(pts.size()));
        for (size_t i = 0; i < pts.size(); ++i) {
            Vec p = vec_from_json(pts[i], "dataset point");
            if (p.size() != m) {
                throw ParseError("dataset: point in class " + std::to_string(j) +
                                 " has wrong dimension");
            }
            c.col(static_cast<Index>(i)) = p;
        }
        ds.classes.push_back(std::move(c));
        if (cls.contains("label")) {
            Vec y = vec_from_json(cls["label"], "dataset label");
            if (y.size() != q) throw ParseError("dataset: label length must equal the class count");
            ds.labels.col(j) = y;
            any_label = true;
        }
    }
    (void)any_label;
    ds.validate();
    return ds;
}

namespace {

json layers_json(const std::vector<Mat>& ws, const std::vector<Vec>& bs) {
    json layers = json::array();
    for (size_t l = 0; l < ws.size(); ++l) {
        json layer;
        layer["W"] = mat_rows_to_json(ws[l]);
        layer["b"] = vec_to_json(bs[l]);
        layers.push_back(std::move(layer));
    }
    return layers;
}

json widths_json(const std::vector<Index>& widths) {
    json a = json::array();
    for (Index w : widths) a.push_back(w);
    return a;
}

} // namespace

std::string network_to_json(const LayerNet& net) {
    net.validate();
    json root;
    root["widths"] = widths_json(net.widths());
    root["form"] = "layerwise";
    root["layers"] = layers_json(net.weights, net.biases);
    return root.dump(2) + "\n";
}

std::string network_to_json(const CumulativeNet& net) {
    json root;
    root["widths"] = widths_json(net.widths());
    root["form"] = "cumulative";
    root["layers"] = layers_json(net.weights, net.biases);
    return root.dump(2) + "\n";
}

LayerNet network_from_json(const std::string& text) {
    json root = parse(text);
    if (!root.contains("layers") || !root["layers"].is_array() || root["layers"].empty()) {
        throw ParseError("network: missing non-empty array field 'layers'");
    }
    const std::string form = root.value("form", "layerwise");
    if (form != "layerwise" && form != "cumulative") {
        throw ParseError("network: field 'form' must be 'layerwise' or 'cumulative'");
    }
    std::vector<Mat> ws;
    std::vector<Vec> bs;
    for (const json& layer : root["layers"]) {
        if (!layer.contains("W") || !layer["W"].is_array() || layer["W"].empty()) {
            throw ParseError("network: layer missing matrix field 'W'");
        }
        const json& rows = layer["W"];
        const size_t cols = rows[0].is_array() ? rows[0].size() : 0;
        if (cols == 0) throw ParseError("network: 'W' rows must be non-empty arrays");
        Mat w(static_cast<Index>(rows.size()), static_cast<Index>(cols));
        for (size_t i = 0; i < rows.size(); ++i) {
            Vec r = vec_from_json(rows[i], "network weight row");
            if (static_cast<size_t>(r.size()) != cols) throw ParseError("network: ragged weight matrix");
            w.row(static_cast<Index>(i)) = r.transpose();
        }
        if (!layer.contains("b")) throw ParseError("network: layer missing field 'b'");
        Vec b = vec_from_json(layer["b"], "network bias");
        if (b.size() != w.rows()) throw ParseError("network: bias length mismatch");
        ws.push_back(std::move(w));
        bs.push_back(std::move(b));
    }
    if (root.contains("widths")) {
        std::vector<Index> expect;
        for (const json& v : root["widths"]) expect.push_back(v.get<Index>());
        std::vector<Index> have;
        have.push_back(ws.front().cols());
        for (const Mat& w : ws) have.push_back(w.rows());
        if (form == "cumulative") {
            for (size_t i = 1; i < have.size(); ++i) have[i] = ws[i - 1].rows();
        }
        if (expect != have) throw ParseError("network: 'widths' disagree with the layer shapes");
    }
    if (form == "cumulative") {
        return layers_from_cumulative(CumulativeNet::checked(std::move(ws), std::move(bs)));
    }
    LayerNet net;
    net.weights = std::move(ws);
    net.biases = std::move(bs);
    net.validate();
    return net;
}

std::string certificate_to_json(const ZeroLossCertificate& cert) {
    json root;
    root["cost"] = cert.cost;
    root["variance_term"] = cert.variance_term;
    root["mean_term"] = cert.mean_term;
    root["passes"] = cert.passes;
    root["tolerance"] = cert.tolerance;
    root["per_class"] = cert.per_class_residuals;
    root["max_entry_residual"] = cert.max_entry_residual;
    return root.dump(2) + "\n";
}

std::string cluster_report_to_json(const ClusterReport& rep) {
    json root;
    root["delta"] = rep.delta;
    root["c0"] = rep.c0;
    root["min_mean_dist"] = rep.min_mean_dist;
    json thetas = json::array();
    for (double t : rep.theta_star_j) {
        if (std::isfinite(t)) {
            thetas.push_back(t);
        } else {
            thetas.push_back(nullptr);
        }
    }
    root["theta_star_j"] = std::move(thetas);
    root["theta_star"] = rep.theta_star;
    root["passes"] = rep.passes;
    root["failure_reasons"] = rep.failure_reasons;
    return root.dump(2) + "\n";
}

std::string sls_certificate_to_json(const SLSCertificate& cert) {
    json root;
    root["ordering"] = cert.ordering;
    root["t"] = cert.t_params;
    json pts = json::array();
    for (const Vec& p : cert.base_points) pts.push_back(vec_to_json(p));
    root["base_points"] = std::move(pts);
    json ns = json::array();
    for (const Vec& h : cert.normals) ns.push_back(vec_to_json(h));
    root["normals"] = std::move(ns);
    root["margins"] = cert.margins;
    root["theta_min"] = cert.theta_min;
    return root.dump(2) + "\n";
}

SLSCertificate sls_certificate_from_json(const std::string& text) {
    json root = parse(text);
    for (const char* field : {"ordering", "t", "base_points", "normals", "margins", "theta_min"}) {
        if (!root.contains(field) || !root[field].is_array()) {
            throw ParseError(std::string("sls certificate: missing array field '") + field + "'");
        }
    }
    SLSCertificate cert;
    for (const json& v : root["ordering"]) cert.ordering.push_back(v.get<Index>());
    for (const json& v : root["t"]) cert.t_params.push_back(v.get<double>());
    for (const json& v : root["base_points"]) cert.base_points.push_back(vec_from_json(v, "base point"));
    for (const json& v : root["normals"]) cert.normals.push_back(vec_from_json(v, "normal"));
    for (const json& v : root["margins"]) cert.margins.push_back(v.get<double>());
    for (const json& v : root["theta_min"]) cert.theta_min.push_back(v.get<double>());
    const size_t n = cert.ordering.size();
    if (cert.t_params.size() != n || cert.base_points.size() != n || cert.normals.size() != n ||
        cert.margins.size() != n || cert.theta_min.size() != n) {
        throw ParseError("sls certificate: field lengths disagree");
    }
    return cert;
}

std::string trace_to_json(const ConstructionTrace& trace) {
    json steps = json::array();
    for (const TraceStep& s : trace.steps) {
        json step;
        step["cone"] = {{"apex", vec_to_json(s.cone.apex)},
                        {"axis", vec_to_json(s.cone.axis)},
                        {"theta", s.cone.theta}};
        step["collapsed_class"] = s.collapsed_class;
        step["snapshot_digest"] = digest(s.snapshot);
        steps.push_back(std::move(step));
    }
    json root;
    root["steps"] = std::move(steps);
    return root.dump(2) + "\n";
}

TraceSummary trace_from_json(const std::string& text) {
    json root = parse(text);
    if (!root.contains("steps") || !root["steps"].is_array()) {
        throw ParseError("trace: missing array field 'steps'");
    }
    TraceSummary sum;
    for (const json& s : root["steps"]) {
        if (!s.contains("cone") || !s.contains("collapsed_class")) {
            throw ParseError("trace: step missing 'cone' or 'collapsed_class'");
        }
        const json& c = s["cone"];
        TraceSummary::Step step{
            Cone(vec_from_json(c.at("apex"), "trace apex"), vec_from_json(c.at("axis"), "trace axis"),
                 c.at("theta").get<double>()),
            s["collapsed_class"].get<Index>(), s.value("snapshot_digest", "")};
        sum.steps.push_back(std::move(step));
    }
    return sum;
}

std::string probe_report_to_json(const ProbeReport& rep) {
    json root;
    root["builder"] = rep.builder == Builder::Clustered ? "clustered" : "sls";
    root["requested"] = rep.requested;
    root["passed"] = rep.passed;
    json draws = json::array();
    for (const ProbeDraw& d : rep.draws) {
        json dj;
        dj["fractions"] = d.fractions;
        dj["passed"] = d.passed;
        if (!d.failure.empty()) dj["failure"] = d.failure;
        draws.push_back(std::move(dj));
    }
    root["draws"] = std::move(draws);
    return root.dump(2) + "\n";
}

std::string params_to_json(const ParamBreakdown& breakdown, const std::vector<Index>& widths) {
    json root;
    root["widths"] = widths_json(widths);
    json layers = json::array();
    for (const LayerParamCount& c : breakdown.per_layer) {
        layers.push_back({{"weights", c.weights}, {"biases", c.biases}});
    }
    root["per_layer"] = std::move(layers);
    root["total_weights"] = breakdown.total_weights;
    root["total_biases"] = breakdown.total_biases;
    root["total"] = breakdown.total;
    root["reference_figure"] = breakdown.reference_figure;
    return root.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

} // namespace zerocone

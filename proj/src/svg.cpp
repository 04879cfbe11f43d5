#include "zerocone/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace zerocone {

namespace {

constexpr double kPanel = 320.0;
constexpr double kPad = 24.0;

const char* kPalette[10] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                            "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct Projector2D {
    Mat map; // 2 x M

    Eigen::Vector2d operator()(const Vec& x) const { return map * x; }
};

} // namespace

std::string plot_trace(const LabeledDataset& ds, const TraceSummary& trace) {
    ds.validate();
    if (ds.ambient_dim() < 2) throw InvalidInputError("plot_trace: need ambient dimension >= 2");

    Projector2D proj;
    if (ds.class_count() >= 2) {
        auto [dsb, frame] = to_barycentric(ds);
        (void)dsb;
        proj.map = frame.forward.topRows(2);
    } else {
        proj.map = Mat::Identity(2, ds.ambient_dim());
    }

    const Index q = ds.class_count();
    const size_t frames = trace.steps.size() + 1;

    // Panel f holds the class positions after f collapses.
    std::vector<std::vector<Mat>> panel_points(frames);
    {
        std::vector<Mat> cur;
        for (const Mat& c : ds.classes) {
            Mat p(2, c.cols());
            for (Index i = 0; i < c.cols(); ++i) p.col(i) = proj(c.col(i));
            cur.push_back(std::move(p));
        }
        panel_points[0] = cur;
        for (size_t f = 1; f < frames; ++f) {
            const auto& step = trace.steps[f - 1];
            if (step.collapsed_class < 0 || step.collapsed_class >= q) {
                throw InvalidInputError("plot_trace: trace references a class outside the dataset");
            }
            Eigen::Vector2d apex = proj(step.cone.apex);
            Mat collapsed(2, cur[static_cast<size_t>(step.collapsed_class)].cols());
            collapsed.colwise() = apex;
            cur[static_cast<size_t>(step.collapsed_class)] = collapsed;
            panel_points[f] = cur;
        }
    }

    // Common scale across panels.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](const Eigen::Vector2d& p) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    };
    for (const auto& panel : panel_points) {
        for (const Mat& c : panel) {
            for (Index i = 0; i < c.cols(); ++i) grow(c.col(i));
        }
    }
    for (const auto& step : trace.steps) grow(proj(step.cone.apex));
    const double spanx = std::max(xmax - xmin, 1e-9);
    const double spany = std::max(ymax - ymin, 1e-9);
    const double scale = (kPanel - 2.0 * kPad) / std::max(spanx, spany);

    auto to_px = [&](const Eigen::Vector2d& p, size_t frame) {
        const double x = kPad + static_cast<double>(frame) * kPanel + (p.x() - xmin) * scale;
        const double y = kPanel - kPad - (p.y() - ymin) * scale; // svg y grows downward
        return std::pair<double, double>{x, y};
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           fmt(kPanel * static_cast<double>(frames)) + "\" height=\"" + fmt(kPanel) +
           "\" viewBox=\"0 0 " + fmt(kPanel * static_cast<double>(frames)) + " " + fmt(kPanel) +
           "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    for (size_t f = 0; f < frames; ++f) {
        out += "<rect x=\"" + fmt(static_cast<double>(f) * kPanel + 2.0) +
               "\" y=\"2\" width=\"" + fmt(kPanel - 4.0) + "\" height=\"" + fmt(kPanel - 4.0) +
               "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

        // Cone acting on this panel (producing the next one).
        if (f < trace.steps.size()) {
            const auto& step = trace.steps[f];
            Eigen::Vector2d apex = proj(step.cone.apex);
            Eigen::Vector2d axis2 = proj.map * step.cone.axis;
            auto [ax, ay] = to_px(apex, f);
            if (axis2.norm() > 1e-9) {
                axis2.normalize();
                const double half = step.cone.theta / 2.0;
                const double base = std::atan2(axis2.y(), axis2.x());
                const double ray_len = 0.9 * std::max(spanx, spany);
                for (double sgn : {-1.0, 1.0}) {
                    const double ang = base + sgn * half;
                    Eigen::Vector2d tip = apex + ray_len * Eigen::Vector2d(std::cos(ang), std::sin(ang));
                    auto [tx, ty] = to_px(tip, f);
                    out += "<line x1=\"" + fmt(ax) + "\" y1=\"" + fmt(ay) + "\" x2=\"" + fmt(tx) +
                           "\" y2=\"" + fmt(ty) +
                           "\" stroke=\"#444444\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";
                }
            }
            out += "<path d=\"M " + fmt(ax - 5.0) + " " + fmt(ay) + " L " + fmt(ax + 5.0) + " " +
                   fmt(ay) + " M " + fmt(ax) + " " + fmt(ay - 5.0) + " L " + fmt(ax) + " " +
                   fmt(ay + 5.0) + "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
        }

        for (Index j = 0; j < q; ++j) {
            const Mat& pts = panel_points[f][static_cast<size_t>(j)];
            const char* color = kPalette[static_cast<size_t>(j) % 10];
            for (Index i = 0; i < pts.cols(); ++i) {
                auto [px, py] = to_px(pts.col(i), f);
                out += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) +
                       "\" r=\"2.5\" fill=\"" + std::string(color) + "\" fill-opacity=\"0.8\"/>\n";
            }
        }
    }
    out += "</svg>\n";
    return out;
}

} // namespace zerocone

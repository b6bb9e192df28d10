#pragma once

// CSV and SVG artifacts for solutions and plane envelopes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sturmcert/envelope2d.hpp"
#include "sturmcert/error.hpp"
#include "sturmcert/expression.hpp"
#include "sturmcert/operator.hpp"

namespace sturmcert::io {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::string num(double v) { return detail::format_number(v); }

inline std::string solution_csv(const Solution& s) {
    std::ostringstream os;
    os << "t,u,Tu,residual\n";
    for (std::size_t i = 0; i < s.u.size(); ++i)
        os << num(s.u.grid().node(i)) << ',' << num(s.u[i]) << ',' << num(s.Tu[i]) << ','
           << num(std::abs(s.u[i] - s.Tu[i])) << '\n';
    return os.str();
}

inline std::string polygon_csv(const plane::Polygon& poly) {
    std::ostringstream os;
    os << "x,y\n";
    for (const auto& p : poly) os << num(p.x) << ',' << num(p.y) << '\n';
    return os.str();
}

/// Minimal SVG canvas mapping a data box onto a fixed pixel frame.
class Svg {
public:
    Svg(double x0, double x1, double y0, double y1, double width = 640, double height = 480)
        : x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1), w_(width), h_(height) {}

    double px(double x) const { return pad + (x - x0_) / (x1_ - x0_) * (w_ - 2 * pad); }
    double py(double y) const { return h_ - pad - (y - y0_) / (y1_ - y0_) * (h_ - 2 * pad); }

    void polyline(const std::vector<plane::Point>& pts, const std::string& color, bool closed = false,
                  const std::string& fill = "none") {
        body_ << (closed ? "<polygon" : "<polyline") << " fill=\"" << fill << "\" fill-opacity=\"0.25\" stroke=\""
              << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : pts) body_ << px(p.x) << ',' << py(p.y) << ' ';
        body_ << "\"/>\n";
    }

    void dot(plane::Point p, const std::string& color, double r = 3) {
        body_ << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"" << r << "\" fill=\"" << color
              << "\"/>\n";
    }

    void text(double x, double y, const std::string& s) {
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"13\">" << s
              << "</text>\n";
    }

    std::string str() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << "<line x1=\"" << px(x0_) << "\" y1=\"" << py(y0_) << "\" x2=\"" << px(x1_) << "\" y2=\"" << py(y0_)
           << "\" stroke=\"black\"/>\n"
           << "<line x1=\"" << px(x0_) << "\" y1=\"" << py(y0_) << "\" x2=\"" << px(x0_) << "\" y2=\"" << py(y1_)
           << "\" stroke=\"black\"/>\n"
           << body_.str() << "</svg>\n";
        return os.str();
    }

    static constexpr double pad = 40;

private:
    double x0_, x1_, y0_, y1_, w_, h_;
    std::ostringstream body_;
};

/// u (blue) and T u (orange) against t; grey lines mark the annulus radii.
inline std::string solution_svg(const Solution& s,
                                const std::optional<std::pair<double, double>>& annulus = std::nullopt) {
    double top = std::max(norm_sup(s.u), norm_sup(s.Tu));
    if (annulus) top = std::max(top, annulus->second);
    Svg svg(0.0, 1.0, 0.0, top * 1.05);
    std::vector<plane::Point> u, tu;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        u.push_back({s.u.grid().node(i), s.u[i]});
        tu.push_back({s.u.grid().node(i), s.Tu[i]});
    }
    if (annulus) {
        svg.polyline({{0.0, annulus->first}, {1.0, annulus->first}}, "#999999");
        svg.polyline({{0.0, annulus->second}, {1.0, annulus->second}}, "#999999");
    }
    svg.polyline(tu, "#e08000");
    svg.polyline(u, "#1f4fbf");
    svg.text(Svg::pad, 20, "u (blue), Tu (orange), |u| = " + num(s.norm) + ", residual " + num(s.residual_sup));
    return svg.str();
}

/// Envelope hulls across the eps ladder, the base point, and its image.
inline std::string envelope_svg(const plane::EnvelopeApprox& env, plane::Point image) {
    double hi = std::max({env.base.x, env.base.y, image.x, image.y, 1e-12});
    for (const auto& h : env.hulls)
        for (const auto& p : h) hi = std::max({hi, p.x, p.y});
    Svg svg(0.0, hi * 1.1, 0.0, hi * 1.1, 480, 480);
    for (std::size_t k = 0; k < env.hulls.size(); ++k) {
        const auto& h = env.hulls[k];
        bool last = k + 1 == env.hulls.size();
        svg.polyline(h, last ? "#c0392b" : "#7f8c8d", h.size() > 2, last ? "#e74c3c" : "none");
        if (h.size() == 1) svg.dot(h[0], last ? "#c0392b" : "#7f8c8d");
    }
    svg.dot(env.base, "#1f4fbf", 4);
    svg.dot(image, "#27ae60", 4);
    svg.text(Svg::pad, 20, "base x (blue), T x (green), smallest-eps hull (red)");
    return svg.str();
}

}  // namespace sturmcert::io

#pragma once

// Closed-convex envelopes of operators on the plane cone K+ = {(x,y) : x, y >= 0}:
//   TT x = intersection over eps > 0 of  closed conv T(B_eps(x) n K+),
// approximated on a decreasing eps ladder by convex hulls of sampled images.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sturmcert/error.hpp"

namespace sturmcert::plane {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }
inline Point from_polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }
inline bool in_cone(Point p) { return p.x >= 0.0 && p.y >= 0.0; }

/// Parametric curve s in [s0, s1] -> point; marks where an operator may jump.
struct PlaneCurve {
    std::function<Point(double)> at;
    double s0 = 0.0;
    double s1 = 1.0;
};

struct PlaneOperator {
    std::function<Point(Point)> eval;
    /// Discontinuity set; sampled explicitly because it has measure zero.
    std::vector<PlaneCurve> discontinuities;

    Point operator()(Point p) const { return eval(p); }
};

/// Convex polygon, counter-clockwise, no collinear vertices. One vertex: a point; two: a segment.
using Polygon = std::vector<Point>;

/// Andrew's monotone chain.
inline Polygon convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    Polygon hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double dist_to_segment(Point p, Point a, Point b) {
    Point ab = b - a;
    double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 == 0.0) return dist(p, a);
    double t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    return dist(p, a + t * ab);
}

/// Euclidean distance from p to the convex polygon (zero inside).
inline double distance_to(Point p, const Polygon& poly) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return dist(p, poly[0]);
    if (poly.size() == 2) return dist_to_segment(p, poly[0], poly[1]);
    bool inside = true;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Point a = poly[i], b = poly[(i + 1) % poly.size()];
        if (cross(a, b, p) < 0.0) inside = false;
        d = std::min(d, dist_to_segment(p, a, b));
    }
    return inside ? 0.0 : d;
}

/// Hausdorff distance between convex polygons; the extremes sit at vertices.
inline double hausdorff(const Polygon& a, const Polygon& b) {
    double h = 0.0;
    for (const auto& p : a) h = std::max(h, distance_to(p, b));
    for (const auto& p : b) h = std::max(h, distance_to(p, a));
    return h;
}

inline double diameter(const Polygon& poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, dist(poly[i], poly[j]));
    return d;
}

/// True when every vertex of `inner` lies within `tol` of `outer`.
inline bool contained_in(const Polygon& inner, const Polygon& outer, double tol) {
    return std::all_of(inner.begin(), inner.end(), [&](Point p) { return distance_to(p, outer) <= tol; });
}

/// Sample of the closed ball B_eps(center) intersected with K+: a polar lattice around the
/// center, the arcs where the ball meets the axes, and the declared discontinuity curves.
inline std::vector<Point> sample_ball(Point center, double eps, std::size_t samples,
                                      std::span<const PlaneCurve> curves = {}) {
    std::vector<Point> pts;
    if (in_cone(center)) pts.push_back(center);
    const std::size_t rings = std::max<std::size_t>(2, samples / 16);
    const std::size_t spokes = std::max<std::size_t>(8, samples / rings);
    for (std::size_t r = 1; r <= rings; ++r) {
        double rad = eps * static_cast<double>(r) / static_cast<double>(rings);
        for (std::size_t k = 0; k < spokes; ++k) {
            Point p = center + from_polar(rad, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(spokes));
            if (in_cone(p)) pts.push_back(p);
        }
    }
    // Ball n axis: segments on y = 0 and x = 0.
    auto axis = [&](double along, double across, bool horizontal) {
        if (std::abs(across) > eps) return;
        double half = std::sqrt(eps * eps - across * across);
        double lo = std::max(0.0, along - half), hi = along + half;
        if (hi < 0.0) return;
        for (std::size_t k = 0; k <= spokes; ++k) {
            double v = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(spokes);
            pts.push_back(horizontal ? Point{v, 0.0} : Point{0.0, v});
        }
    };
    axis(center.x, center.y, true);
    axis(center.y, center.x, false);

    for (const auto& c : curves) {
        constexpr std::size_t coarse = 4096;
        auto param = [&](std::size_t k) {
            return c.s0 + (c.s1 - c.s0) * static_cast<double>(k) / static_cast<double>(coarse);
        };
        auto inside = [&](double s) { return dist(c.at(s), center) <= eps; };
        // Closest coarse sample, refined by ternary search, seeds runs smaller than the coarse step.
        std::size_t best = 0;
        for (std::size_t k = 1; k <= coarse; ++k)
            if (dist(c.at(param(k)), center) < dist(c.at(param(best)), center)) best = k;
        double a = param(best > 0 ? best - 1 : 0), b = param(std::min(best + 1, coarse));
        for (int it = 0; it < 200; ++it) {
            double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
            if (dist(c.at(m1), center) < dist(c.at(m2), center)) b = m2;
            else a = m1;
        }
        std::vector<double> seeds{0.5 * (a + b)};
        for (std::size_t k = 0; k <= coarse; ++k)
            if (inside(param(k))) seeds.push_back(param(k));
        // Expand each seed to its run inside the ball and sample the run uniformly.
        std::vector<std::pair<double, double>> runs;
        for (double s : seeds) {
            if (!inside(s)) continue;
            if (std::any_of(runs.begin(), runs.end(), [&](auto r) { return s >= r.first && s <= r.second; })) continue;
            auto edge = [&](double in, double limit) {
                if (inside(limit)) return limit;
                double out = limit;
                for (int it = 0; it < 100; ++it) {
                    double mid = 0.5 * (in + out);
                    (inside(mid) ? in : out) = mid;
                }
                return in;
            };
            // Walk outwards on the coarse lattice until leaving the ball, then bisect.
            double step = (c.s1 - c.s0) / static_cast<double>(coarse);
            double lo = s, hi = s;
            while (lo - step >= c.s0 && inside(lo - step)) lo -= step;
            while (hi + step <= c.s1 && inside(hi + step)) hi += step;
            lo = edge(lo, std::max(c.s0, lo - step));
            hi = edge(hi, std::min(c.s1, hi + step));
            runs.emplace_back(lo, hi);
        }
        for (auto [lo, hi] : runs) {
            for (std::size_t k = 0; k <= samples; ++k) {
                Point p = c.at(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples));
                if (in_cone(p)) pts.push_back(p);
            }
        }
    }
    return pts;
}

struct EnvelopeApprox {
    Point base;
    std::vector<double> eps_ladder;  ///< strictly decreasing, including refinement steps
    std::vector<Polygon> hulls;      ///< one per ladder entry
    Polygon intersection;            ///< smallest-eps hull once successive hulls agree
    bool converged = false;          ///< Hausdorff change fell below the tolerance
};

struct EnvelopeOptions {
    std::vector<double> eps_ladder;  ///< empty: {0.1, 0.05, 0.01, 0.005, 0.001} * |x| (absolute when x = 0)
    std::size_t samples_per_eps = 256;
    double hausdorff_tol = 1e-4;
    std::size_t max_refinements = 30;
};

inline std::vector<double> default_ladder(Point x) {
    double scale = norm(x) > 0.0 ? norm(x) : 1.0;
    return {0.1 * scale, 0.05 * scale, 0.01 * scale, 0.005 * scale, 0.001 * scale};
}

inline EnvelopeApprox cc_envelope(const PlaneOperator& T, Point x, const EnvelopeOptions& o = {}) {
    EnvelopeApprox env;
    env.base = x;
    std::vector<double> ladder = o.eps_ladder.empty() ? default_ladder(x) : o.eps_ladder;
    if (ladder.empty()) throw DomainError("eps ladder is empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0)) throw DomainError("eps ladder entries must be positive");
        if (i > 0 && !(ladder[i] < ladder[i - 1])) throw DomainError("eps ladder must be strictly decreasing");
    }

    auto hull_at = [&](double eps) {
        auto pts = sample_ball(x, eps, o.samples_per_eps, T.discontinuities);
        if (pts.empty()) throw DomainError("no samples of the ball lie in the cone");
        std::vector<Point> images;
        images.reserve(pts.size());
        for (const auto& p : pts) images.push_back(T(p));
        return convex_hull(std::move(images));
    };

    for (double eps : ladder) {
        env.eps_ladder.push_back(eps);
        env.hulls.push_back(hull_at(eps));
    }
    auto settled = [&] {
        std::size_t n = env.hulls.size();
        return n >= 2 && hausdorff(env.hulls[n - 1], env.hulls[n - 2]) < o.hausdorff_tol;
    };
    for (std::size_t r = 0; r < o.max_refinements && !settled(); ++r) {
        double eps = 0.5 * env.eps_ladder.back();
        env.eps_ladder.push_back(eps);
        env.hulls.push_back(hull_at(eps));
    }
    env.converged = settled();
    env.intersection = env.hulls.back();
    return env;
}

/// x not in TT x (beyond tol), or x within tol of T x.
inline bool envelope_condition_check(const PlaneOperator& T, Point x, const EnvelopeApprox& approx,
                                     double tol = 1e-9) {
    return distance_to(x, approx.intersection) > tol || dist(x, T(x)) <= tol;
}

struct AnnulusScanReport {
    double min_residual = std::numeric_limits<double>::infinity();
    Point at;
    std::size_t points = 0;
    double spacing = 0.0;  ///< largest lattice step (radial or arc length at r_out)
};

/// min |x - T x| over a polar lattice of the closed annulus r_in <= |x| <= r_out inside K+.
inline AnnulusScanReport annulus_fixed_point_scan(const PlaneOperator& T, double r_in, double r_out,
                                                  std::size_t density) {
    if (!(r_in > 0.0 && r_in < r_out)) throw DomainError("annulus scan needs 0 < r_in < r_out");
    if (density == 0) throw DomainError("annulus scan density must be positive");
    AnnulusScanReport rep;
    const double dr = (r_out - r_in) / static_cast<double>(density);
    const double dth = 0.5 * std::numbers::pi / static_cast<double>(density);
    rep.spacing = std::max(dr, r_out * dth);
    for (std::size_t i = 0; i <= density; ++i) {
        double r = i == density ? r_out : r_in + dr * static_cast<double>(i);
        for (std::size_t j = 0; j <= density; ++j) {
            double th = j == density ? 0.5 * std::numbers::pi : dth * static_cast<double>(j);
            Point x = from_polar(r, th);
            x = {std::max(0.0, x.x), std::max(0.0, x.y)};
            double res = dist(x, T(x));
            ++rep.points;
            if (res < rep.min_residual) {
                rep.min_residual = res;
                rep.at = x;
            }
        }
    }
    return rep;
}

struct UscProbeReport {
    bool ok = false;
    double limit_distance = 0.0;         ///< distance from the limit y to the envelope at the limit x
    std::size_t member_violations = 0;   ///< y_n farther than tol from the envelope at x_n
};

/// Sequential upper-semicontinuity check: x_n -> x, y_n in TT x_n, y_n -> y  =>  y in TT x.
inline UscProbeReport usc_sequence_probe(const PlaneOperator& T, std::span<const Point> xs, std::span<const Point> ys,
                                         Point x_limit, Point y_limit, double tol = 1e-6,
                                         const EnvelopeOptions& o = {}) {
    if (xs.size() != ys.size()) throw DomainError("usc probe: sequences differ in length");
    UscProbeReport r;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (distance_to(ys[k], cc_envelope(T, xs[k], o).intersection) > tol) ++r.member_violations;
    r.limit_distance = distance_to(y_limit, cc_envelope(T, x_limit, o).intersection);
    r.ok = r.limit_distance <= tol;
    return r;
}

/// T(rho, theta) = 0 for rho != r; (r, pi/2) for theta < pi/4; (r, 0) for theta >= pi/4 (polar),
/// with the circle rho = r declared as its discontinuity set.
inline PlaneOperator polar_example_operator(double r) {
    PlaneOperator T;
    T.eval = [r](Point p) {
        double rho = norm(p);
        if (std::abs(rho - r) > 1e-12 * r) return Point{0.0, 0.0};
        double theta = std::atan2(p.y, p.x);
        return theta < 0.25 * std::numbers::pi ? Point{0.0, r} : Point{r, 0.0};
    };
    T.discontinuities.push_back({[r](double s) { return from_polar(r, s); }, 0.0, 0.5 * std::numbers::pi});
    return T;
}

inline PlaneOperator identity_operator() { return {[](Point p) { return p; }, {}}; }

inline PlaneOperator constant_operator(Point c) { return {[c](Point) { return c; }, {}}; }

}  // namespace sturmcert::plane

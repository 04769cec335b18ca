#include "redsim/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace redsim::spacetime {

CausalRelation relate(const Point& from, const Point& to) {
    const double dt = to.t - from.t;
    const double dx = std::abs(to.x - from.x);
    if (dt == 0.0 && dx == 0.0) return CausalRelation::Coincident;
    if (dt > dx) return CausalRelation::TimelikeFuture;
    if (dt == dx) return CausalRelation::LightlikeFuture;
    if (-dt > dx) return CausalRelation::TimelikePast;
    if (-dt == dx) return CausalRelation::LightlikePast;
    return CausalRelation::Spacelike;
}

bool causally_follows(const Point& later, const Point& earlier) {
    switch (relate(earlier, later)) {
        case CausalRelation::TimelikeFuture:
        case CausalRelation::LightlikeFuture:
        case CausalRelation::Coincident:
            return true;
        default:
            return false;
    }
}

Point boost(const Point& p, double velocity) {
    if (std::abs(velocity) >= 1.0)
        throw std::invalid_argument("boost: |velocity| must be below 1");
    const double g = 1.0 / std::sqrt(1.0 - velocity * velocity);
    return Point{g * (p.x - velocity * p.t), g * (p.t - velocity * p.x)};
}

SpacelikeSurface::SpacelikeSurface(std::vector<Point> knots, bool lightlike_ok)
    : knots_(std::move(knots)), lightlike_ok_(lightlike_ok) {
    if (knots_.empty()) throw std::invalid_argument("SpacelikeSurface: no knots");
    // Lightlike-flagged surfaces admit |slope| = 1 as the limiting case, with
    // slack for crossing points computed in floating point.
    const double limit = lightlike_ok_ ? 1.0 + 1e-9 : 1.0;
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        const double dx = knots_[k].x - knots_[k - 1].x;
        const double dt = knots_[k].t - knots_[k - 1].t;
        if (dx <= 0.0) throw std::invalid_argument("SpacelikeSurface: knots not increasing in x");
        const double slope = std::abs(dt / dx);
        if (slope > limit || (slope == 1.0 && !lightlike_ok_))
            throw std::invalid_argument("SpacelikeSurface: segment not space-like");
    }
}

SpacelikeSurface SpacelikeSurface::constant_time(double t, double x_min, double x_max) {
    return SpacelikeSurface({Point{x_min, t}, Point{x_max, t}});
}

double SpacelikeSurface::time_at(double x) const {
    if (x <= knots_.front().x) return knots_.front().t;
    if (x >= knots_.back().x) return knots_.back().t;
    // knots are sorted in x; find the segment containing x
    std::size_t lo = 0, hi = knots_.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (knots_[mid].x <= x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const Point& a = knots_[lo];
    const Point& b = knots_[hi];
    const double u = (x - a.x) / (b.x - a.x);
    return a.t + u * (b.t - a.t);
}

namespace {

std::vector<double> merged_breakpoints(const SpacelikeSurface& a, const SpacelikeSurface& b) {
    std::vector<double> xs;
    for (const auto& k : a.knots()) xs.push_back(k.x);
    for (const auto& k : b.knots()) xs.push_back(k.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

// x positions where two linear pieces cross, restricted to (x1, x2).
void add_crossings(const SpacelikeSurface& a, const SpacelikeSurface& b, std::vector<double>& xs) {
    std::vector<double> base = xs;
    for (std::size_t k = 0; k + 1 < base.size(); ++k) {
        const double x1 = base[k], x2 = base[k + 1];
        const double fa1 = a.time_at(x1), fa2 = a.time_at(x2);
        const double fb1 = b.time_at(x1), fb2 = b.time_at(x2);
        const double d1 = fa1 - fb1, d2 = fa2 - fb2;
        if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) {
            const double u = d1 / (d1 - d2);
            xs.push_back(x1 + u * (x2 - x1));
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

SpacelikeSurface combine(const SpacelikeSurface& a, const SpacelikeSurface& b, bool take_max) {
    std::vector<double> xs = merged_breakpoints(a, b);
    add_crossings(a, b, xs);
    std::vector<Point> knots;
    knots.reserve(xs.size());
    for (double x : xs) {
        // Degenerate segments from near-coincident crossings are dropped.
        if (!knots.empty() && x - knots.back().x < 1e-12) continue;
        const double ta = a.time_at(x), tb = b.time_at(x);
        knots.push_back(Point{x, take_max ? std::max(ta, tb) : std::min(ta, tb)});
    }
    return SpacelikeSurface(std::move(knots), a.lightlike_ok() || b.lightlike_ok());
}

} // namespace

bool SpacelikeSurface::dominates(const SpacelikeSurface& other, double tol) const {
    std::vector<double> xs = merged_breakpoints(*this, other);
    // Beyond the merged knot range both surfaces are flat, so the extreme
    // breakpoints settle the extensions too.
    for (double x : xs)
        if (time_at(x) < other.time_at(x) - tol) return false;
    return true;
}

SpacelikeSurface SpacelikeSurface::boosted(double velocity) const {
    std::vector<Point> knots;
    knots.reserve(knots_.size());
    for (const auto& k : knots_) knots.push_back(boost(k, velocity));
    // A boost preserves x ordering of space-like separated knots.
    return SpacelikeSurface(std::move(knots), lightlike_ok_);
}

SpacelikeSurface SpacelikeSurface::pointwise_max(const SpacelikeSurface& a,
                                                 const SpacelikeSurface& b) {
    return combine(a, b, true);
}

SpacelikeSurface SpacelikeSurface::pointwise_min(const SpacelikeSurface& a,
                                                 const SpacelikeSurface& b) {
    return combine(a, b, false);
}

bool in_volume(const Point& p, const SpacelikeSurface& sigma, const SpacelikeSurface& initial) {
    if (!sigma.dominates(initial))
        throw std::invalid_argument("in_volume: sigma dips below the initial surface");
    return initial.time_at(p.x) <= p.t && p.t < sigma.time_at(p.x);
}

SpacelikeSurface past_cone_surface(const Point& p, const SpacelikeSurface& initial) {
    if (p.t < initial.time_at(p.x) - 1e-12)
        throw std::invalid_argument("past_cone_surface: point below the initial surface");
    // Build the cone as a surface over the span of the initial knots plus the
    // cone apex and its intersections with the initial surface's extensions.
    std::vector<Point> cone_knots;
    const double t0_left = initial.knots().front().t;
    const double t0_right = initial.knots().back().t;
    const double reach_left = p.x - (p.t - t0_left);
    const double reach_right = p.x + (p.t - t0_right);
    double lo = std::min(initial.knots().front().x, reach_left) - 1.0;
    double hi = std::max(initial.knots().back().x, reach_right) + 1.0;
    cone_knots.push_back(Point{lo, p.t - std::abs(lo - p.x)});
    if (p.x > lo && p.x < hi) cone_knots.push_back(Point{p.x, p.t});
    cone_knots.push_back(Point{hi, p.t - std::abs(hi - p.x)});
    const SpacelikeSurface cone(std::move(cone_knots), true);
    return SpacelikeSurface::pointwise_max(cone, initial);
}

} // namespace redsim::spacetime

#pragma once

#include <vector>

namespace redsim::spacetime {

// 1+1 Minkowski bookkeeping with c = 1.

struct Point {
    double x = 0.0;
    double t = 0.0;
};

enum class CausalRelation {
    TimelikeFuture,
    LightlikeFuture,
    Spacelike,
    LightlikePast,
    TimelikePast,
    Coincident
};

/// Causal relation of `to` as seen from `from`.
CausalRelation relate(const Point& from, const Point& to);
/// True when `later` lies in the closed causal future of `earlier`.
bool causally_follows(const Point& later, const Point& earlier);

Point boost(const Point& p, double velocity);

/// Piecewise-linear space-like surface t = f(x), flat beyond the first and
/// last knot. Every interior segment must satisfy |slope| < 1; surfaces built
/// from light cones carry the lightlike_ok flag and admit |slope| = 1 as the
/// limiting case.
class SpacelikeSurface {
public:
    SpacelikeSurface(std::vector<Point> knots, bool lightlike_ok = false);

    static SpacelikeSurface constant_time(double t, double x_min = -1e6, double x_max = 1e6);

    double time_at(double x) const;
    const std::vector<Point>& knots() const { return knots_; }
    bool lightlike_ok() const { return lightlike_ok_; }

    /// True when this surface is nowhere below `other`.
    bool dominates(const SpacelikeSurface& other, double tol = 1e-12) const;

    SpacelikeSurface boosted(double velocity) const;

    static SpacelikeSurface pointwise_max(const SpacelikeSurface& a, const SpacelikeSurface& b);
    static SpacelikeSurface pointwise_min(const SpacelikeSurface& a, const SpacelikeSurface& b);

private:
    std::vector<Point> knots_;
    bool lightlike_ok_;
};

/// Whether p lies in the space-time volume between the initial surface and
/// sigma: initial(p.x) <= p.t < sigma(p.x). A point exactly on sigma does not
/// count as crossed. Throws if sigma dips below the initial surface.
bool in_volume(const Point& p, const SpacelikeSurface& sigma, const SpacelikeSurface& initial);

/// The surface made of the past light cone from p joined to the part of the
/// initial surface outside it: f(x) = max(initial(x), p.t - |x - p.x|).
/// Throws if p lies below the initial surface.
SpacelikeSurface past_cone_surface(const Point& p, const SpacelikeSurface& initial);

} // namespace redsim::spacetime

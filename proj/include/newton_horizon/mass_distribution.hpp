#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "vec3.hpp"

namespace newton_horizon {

/// Closed ball, used both as a bounding region and as a body region candidate.
struct Ball {
    Vec3 center;
    double radius = 0.0;
};

inline double ball_volume(double radius) {
    return (4.0 / 3.0) * std::numbers::pi * radius * radius * radius;
}

// ---- distribution shapes -------------------------------------------------

struct PointMass {
    Vec3 position;
    double mass = 0.0;   // kg
};

struct UniformBall {
    Vec3 center;
    double radius = 0.0;  // m
    double mass = 0.0;    // kg

    double density() const { return mass / ball_volume(radius); }
};

/// One spherical shell of a piecewise-constant radial profile.
/// Covers radii (previous outer_radius, outer_radius]; the first shell starts at 0.
struct ProfileShell {
    double outer_radius = 0.0;
    double density = 0.0;   // kg m^-3, may be 0 (gap)
};

struct RadialProfile {
    Vec3 center;
    std::vector<ProfileShell> shells;
};

/// Superposition of uniform balls. Overlaps stack: both mass and support
/// volume are summed per member, so overlapping regions count once per member.
struct BallUnion {
    std::vector<UniformBall> balls;
};

/// Axis-aligned grid of cubic cells with per-cell constant density.
/// density is indexed x-fastest: density[i + shape[0] * (j + shape[1] * k)].
struct VoxelGrid {
    Vec3 origin;             // corner of cell (0,0,0)
    double cell_size = 0.0;  // m, cubic cells
    std::array<std::size_t, 3> shape{0, 0, 0};
    std::vector<double> density;

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + shape[0] * (j + shape[1] * k);
    }
};

using DistributionShape = std::variant<PointMass, UniformBall, RadialProfile, BallUnion, VoxelGrid>;

namespace detail {

/// Closed radial annulus a <= |x - center| <= b of the support.
struct Annulus {
    double inner = 0.0;
    double outer = 0.0;
};

/// Occupied grid cell with its density, in world coordinates.
struct DensityBox {
    Vec3 lo;
    Vec3 hi;
    double density = 0.0;
};

inline void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace detail

/// A validated mass distribution. Wraps one of the shape types and caches the
/// derived quantities every other module queries (mass, support volume,
/// support geometry). Immutable after construction.
class MassDistribution {
  public:
    MassDistribution(PointMass p) : shape_(std::move(p)) { init(); }
    MassDistribution(UniformBall b) : shape_(std::move(b)) { init(); }
    MassDistribution(RadialProfile r) : shape_(std::move(r)) { init(); }
    MassDistribution(BallUnion u) : shape_(std::move(u)) { init(); }
    MassDistribution(VoxelGrid g) : shape_(std::move(g)) { init(); }
    MassDistribution(DistributionShape s) : shape_(std::move(s)) { init(); }

    const DistributionShape& shape() const { return shape_; }

    template <class T>
    const T* as() const { return std::get_if<T>(&shape_); }

    double total_mass() const { return mass_; }

    /// Volume of the support (0 for a point mass). Ball unions sum member
    /// volumes, counting overlap regions once per member.
    double support_volume() const { return volume_; }

    const Vec3& aabb_lo() const { return aabb_lo_; }
    const Vec3& aabb_hi() const { return aabb_hi_; }

    /// Support annuli of a radial profile, gaps removed, contiguous shells merged.
    const std::vector<detail::Annulus>& support_annuli() const { return annuli_; }

    /// Occupied cells of a voxel grid.
    const std::vector<detail::DensityBox>& occupied_cells() const { return boxes_; }

  private:
    void init();

    DistributionShape shape_;
    double mass_ = 0.0;
    double volume_ = 0.0;
    Vec3 aabb_lo_;
    Vec3 aabb_hi_;
    std::vector<detail::Annulus> annuli_;
    std::vector<detail::DensityBox> boxes_;
};

inline void MassDistribution::init() {
    using detail::require;
    struct Visitor {
        MassDistribution& d;

        void operator()(const PointMass& p) {
            require(is_finite(p.position), "point mass: position must be finite");
            require(std::isfinite(p.mass) && p.mass > 0.0, "point mass: mass must be positive");
            d.mass_ = p.mass;
            d.volume_ = 0.0;
            d.aabb_lo_ = d.aabb_hi_ = p.position;
        }

        void operator()(const UniformBall& b) {
            require(is_finite(b.center), "uniform ball: center must be finite");
            require(std::isfinite(b.radius) && b.radius > 0.0, "uniform ball: radius must be positive");
            require(std::isfinite(b.mass) && b.mass > 0.0, "uniform ball: mass must be positive");
            d.mass_ = b.mass;
            d.volume_ = ball_volume(b.radius);
            Vec3 r{b.radius, b.radius, b.radius};
            d.aabb_lo_ = b.center - r;
            d.aabb_hi_ = b.center + r;
        }

        void operator()(const RadialProfile& p) {
            require(is_finite(p.center), "radial profile: center must be finite");
            require(!p.shells.empty(), "radial profile: needs at least one shell");
            double prev = 0.0;
            double mass = 0.0;
            double volume = 0.0;
            for (const auto& s : p.shells) {
                require(std::isfinite(s.outer_radius) && s.outer_radius > prev,
                        "radial profile: outer radii must be finite and strictly increasing");
                require(std::isfinite(s.density) && s.density >= 0.0,
                        "radial profile: densities must be finite and non-negative");
                double shell_volume = ball_volume(s.outer_radius) - ball_volume(prev);
                mass += s.density * shell_volume;
                if (s.density > 0.0) {
                    volume += shell_volume;
                    if (!d.annuli_.empty() && d.annuli_.back().outer == prev)
                        d.annuli_.back().outer = s.outer_radius;
                    else
                        d.annuli_.push_back({prev, s.outer_radius});
                }
                prev = s.outer_radius;
            }
            require(mass > 0.0, "radial profile: needs at least one positive-density shell");
            d.mass_ = mass;
            d.volume_ = volume;
            double r = d.annuli_.back().outer;
            Vec3 rv{r, r, r};
            d.aabb_lo_ = p.center - rv;
            d.aabb_hi_ = p.center + rv;
        }

        void operator()(const BallUnion& u) {
            require(!u.balls.empty(), "ball union: needs at least one ball");
            double mass = 0.0;
            double volume = 0.0;
            d.aabb_lo_ = {std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
            d.aabb_hi_ = -d.aabb_lo_;
            for (const auto& b : u.balls) {
                require(is_finite(b.center), "ball union: centers must be finite");
                require(std::isfinite(b.radius) && b.radius > 0.0, "ball union: radii must be positive");
                require(std::isfinite(b.mass) && b.mass > 0.0, "ball union: masses must be positive");
                mass += b.mass;
                volume += ball_volume(b.radius);
                for (int a = 0; a < 3; ++a) {
                    double c = a == 0 ? b.center.x : a == 1 ? b.center.y : b.center.z;
                    double& lo = a == 0 ? d.aabb_lo_.x : a == 1 ? d.aabb_lo_.y : d.aabb_lo_.z;
                    double& hi = a == 0 ? d.aabb_hi_.x : a == 1 ? d.aabb_hi_.y : d.aabb_hi_.z;
                    lo = std::min(lo, c - b.radius);
                    hi = std::max(hi, c + b.radius);
                }
            }
            d.mass_ = mass;
            d.volume_ = volume;
        }

        void operator()(const VoxelGrid& g) {
            require(is_finite(g.origin), "voxel grid: origin must be finite");
            require(std::isfinite(g.cell_size) && g.cell_size > 0.0, "voxel grid: cell size must be positive");
            require(g.shape[0] > 0 && g.shape[1] > 0 && g.shape[2] > 0, "voxel grid: shape must be positive");
            require(g.density.size() == g.shape[0] * g.shape[1] * g.shape[2],
                    "voxel grid: density size must match shape");
            double cell_volume = g.cell_size * g.cell_size * g.cell_size;
            double mass = 0.0;
            std::size_t occupied = 0;
            d.aabb_lo_ = {std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
            d.aabb_hi_ = -d.aabb_lo_;
            for (std::size_t k = 0; k < g.shape[2]; ++k)
                for (std::size_t j = 0; j < g.shape[1]; ++j)
                    for (std::size_t i = 0; i < g.shape[0]; ++i) {
                        double rho = g.density[g.index(i, j, k)];
                        require(std::isfinite(rho) && rho >= 0.0,
                                "voxel grid: densities must be finite and non-negative");
                        if (rho == 0.0) continue;
                        ++occupied;
                        mass += rho * cell_volume;
                        Vec3 lo = g.origin + Vec3{double(i), double(j), double(k)} * g.cell_size;
                        Vec3 hi = lo + Vec3{1.0, 1.0, 1.0} * g.cell_size;
                        d.boxes_.push_back({lo, hi, rho});
                        d.aabb_lo_ = {std::min(d.aabb_lo_.x, lo.x), std::min(d.aabb_lo_.y, lo.y),
                                      std::min(d.aabb_lo_.z, lo.z)};
                        d.aabb_hi_ = {std::max(d.aabb_hi_.x, hi.x), std::max(d.aabb_hi_.y, hi.y),
                                      std::max(d.aabb_hi_.z, hi.z)};
                    }
            require(occupied > 0, "voxel grid: needs at least one positive-density cell");
            d.mass_ = mass;
            d.volume_ = double(occupied) * cell_volume;
        }
    };
    std::visit(Visitor{*this}, shape_);
}

// ---- mass and density queries ---------------------------------------------

inline double total_mass(const MassDistribution& d) { return d.total_mass(); }

inline double support_volume(const MassDistribution& d) { return d.support_volume(); }

/// Mean density over the support. Throws DegenerateSupport for a point mass.
inline double average_density(const MassDistribution& d) {
    if (d.support_volume() <= 0.0)
        throw DegenerateSupport("average_density: support has zero volume");
    return d.total_mass() / d.support_volume();
}

/// Density at a point. Ball-union overlaps sum member densities.
/// Throws DegenerateSupport for a point mass (density is not a function there).
inline double density_at(const MassDistribution& d, const Vec3& x) {
    struct Visitor {
        const Vec3& x;
        double operator()(const PointMass&) const {
            throw DegenerateSupport("density_at: point mass has no volume density");
        }
        double operator()(const UniformBall& b) const {
            return distance(x, b.center) <= b.radius ? b.density() : 0.0;
        }
        double operator()(const RadialProfile& p) const {
            double s = distance(x, p.center);
            double prev = 0.0;
            for (const auto& shell : p.shells) {
                if (s <= shell.outer_radius && s >= prev) return shell.density;
                prev = shell.outer_radius;
            }
            return 0.0;
        }
        double operator()(const BallUnion& u) const {
            double rho = 0.0;
            for (const auto& b : u.balls)
                if (distance(x, b.center) <= b.radius) rho += b.density();
            return rho;
        }
        double operator()(const VoxelGrid& g) const {
            Vec3 rel = (x - g.origin) / g.cell_size;
            double fi = std::floor(rel.x), fj = std::floor(rel.y), fk = std::floor(rel.z);
            if (fi < 0 || fj < 0 || fk < 0) return 0.0;
            auto i = std::size_t(fi), j = std::size_t(fj), k = std::size_t(fk);
            if (i >= g.shape[0] || j >= g.shape[1] || k >= g.shape[2]) return 0.0;
            return g.density[g.index(i, j, k)];
        }
    };
    return std::visit(Visitor{x}, d.shape());
}

// ---- support geometry -------------------------------------------------------

namespace detail {

inline double signed_dist_annulus(double s, const Annulus& a) {
    // Inner radius 0 means the piece is a full ball; only the outer sphere bounds it.
    if (a.inner == 0.0) return s - a.outer;
    return std::max(a.inner - s, s - a.outer);
}

inline double signed_dist_box(const Vec3& u, const Vec3& lo, const Vec3& hi) {
    Vec3 q{std::max(lo.x - u.x, u.x - hi.x), std::max(lo.y - u.y, u.y - hi.y),
           std::max(lo.z - u.z, u.z - hi.z)};
    Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
    double inside = std::min(std::max({q.x, q.y, q.z}), 0.0);
    return norm(outside) + inside;
}

inline double farthest_corner_distance(const Vec3& u, const Vec3& lo, const Vec3& hi) {
    double dx = std::max(std::abs(u.x - lo.x), std::abs(u.x - hi.x));
    double dy = std::max(std::abs(u.y - lo.y), std::abs(u.y - hi.y));
    double dz = std::max(std::abs(u.z - lo.z), std::abs(u.z - hi.z));
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace detail

/// Signed distance from u to the support closure: positive outside, negative
/// inside, zero on the boundary. Exact outside every shape; inside overlapping
/// unions the magnitude is the distance to the nearest member boundary.
inline double signed_dist_to_closure(const MassDistribution& d, const Vec3& u) {
    struct Visitor {
        const MassDistribution& d;
        const Vec3& u;
        double operator()(const PointMass& p) const { return distance(u, p.position); }
        double operator()(const UniformBall& b) const { return distance(u, b.center) - b.radius; }
        double operator()(const RadialProfile& p) const {
            double s = distance(u, p.center);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& a : d.support_annuli())
                best = std::min(best, detail::signed_dist_annulus(s, a));
            return best;
        }
        double operator()(const BallUnion& un) const {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : un.balls)
                best = std::min(best, distance(u, b.center) - b.radius);
            return best;
        }
        double operator()(const VoxelGrid&) const {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& box : d.occupied_cells())
                best = std::min(best, detail::signed_dist_box(u, box.lo, box.hi));
            return best;
        }
    };
    return std::visit(Visitor{d, u}, d.shape());
}

/// Euclidean distance from u to the support closure; 0 when u lies in it.
inline double dist_to_closure(const MassDistribution& d, const Vec3& u) {
    return std::max(0.0, signed_dist_to_closure(d, u));
}

/// Largest distance from u to any point of the support closure.
inline double max_dist_over_closure(const MassDistribution& d, const Vec3& u) {
    struct Visitor {
        const MassDistribution& d;
        const Vec3& u;
        double operator()(const PointMass& p) const { return distance(u, p.position); }
        double operator()(const UniformBall& b) const { return distance(u, b.center) + b.radius; }
        double operator()(const RadialProfile& p) const {
            return distance(u, p.center) + d.support_annuli().back().outer;
        }
        double operator()(const BallUnion& un) const {
            double best = 0.0;
            for (const auto& b : un.balls)
                best = std::max(best, distance(u, b.center) + b.radius);
            return best;
        }
        double operator()(const VoxelGrid&) const {
            double best = 0.0;
            for (const auto& box : d.occupied_cells())
                best = std::max(best, detail::farthest_corner_distance(u, box.lo, box.hi));
            return best;
        }
    };
    return std::visit(Visitor{d, u}, d.shape());
}

/// Ball containing the support closure, with `padding` added to the radius.
/// Exact and minimal for the spherically symmetric shapes. For ball unions
/// and voxel grids the center is the support AABB center and the radius the
/// exact farthest support distance from it, at most sqrt(3) times minimal.
inline Ball bounding_ball(const MassDistribution& d, double padding = 0.0) {
    if (!(padding >= 0.0) || !std::isfinite(padding))
        throw std::invalid_argument("bounding_ball: padding must be finite and >= 0");
    struct Visitor {
        const MassDistribution& d;
        Ball operator()(const PointMass& p) const { return {p.position, 0.0}; }
        Ball operator()(const UniformBall& b) const { return {b.center, b.radius}; }
        Ball operator()(const RadialProfile& p) const {
            return {p.center, d.support_annuli().back().outer};
        }
        Ball operator()(const BallUnion& un) const {
            if (un.balls.size() == 1) return {un.balls[0].center, un.balls[0].radius};
            return from_aabb();
        }
        Ball operator()(const VoxelGrid&) const { return from_aabb(); }
        Ball from_aabb() const {
            Vec3 center = (d.aabb_lo() + d.aabb_hi()) * 0.5;
            return {center, max_dist_over_closure(d, center)};
        }
    };
    Ball b = std::visit(Visitor{d}, d.shape());
    b.radius += padding;
    return b;
}

/// Center of spherical symmetry, when the shape has one.
inline std::optional<Vec3> symmetry_center(const MassDistribution& d) {
    struct Visitor {
        std::optional<Vec3> operator()(const PointMass& p) const { return p.position; }
        std::optional<Vec3> operator()(const UniformBall& b) const { return b.center; }
        std::optional<Vec3> operator()(const RadialProfile& p) const { return p.center; }
        std::optional<Vec3> operator()(const BallUnion& u) const {
            if (u.balls.size() == 1) return u.balls[0].center;
            return std::nullopt;
        }
        std::optional<Vec3> operator()(const VoxelGrid&) const { return std::nullopt; }
    };
    return std::visit(Visitor{}, d.shape());
}

/// The support closure as a ball of positive radius, when it is exactly one
/// (uniform ball, gap-free radial profile, or single-member union).
inline std::optional<Ball> support_ball(const MassDistribution& d) {
    struct Visitor {
        const MassDistribution& d;
        std::optional<Ball> operator()(const PointMass&) const { return std::nullopt; }
        std::optional<Ball> operator()(const UniformBall& b) const {
            return Ball{b.center, b.radius};
        }
        std::optional<Ball> operator()(const RadialProfile& p) const {
            const auto& annuli = d.support_annuli();
            if (annuli.size() == 1 && annuli[0].inner == 0.0)
                return Ball{p.center, annuli[0].outer};
            return std::nullopt;
        }
        std::optional<Ball> operator()(const BallUnion& u) const {
            if (u.balls.size() == 1) return Ball{u.balls[0].center, u.balls[0].radius};
            return std::nullopt;
        }
        std::optional<Ball> operator()(const VoxelGrid&) const { return std::nullopt; }
    };
    return std::visit(Visitor{d}, d.shape());
}

/// True iff the support closure lies inside the closed ball B.
inline bool closure_within(const MassDistribution& d, const Ball& B) {
    return max_dist_over_closure(d, B.center) <= B.radius;
}

/// Largest distance between two points of the support closure.
inline double max_pair_distance(const MassDistribution& d) {
    struct Visitor {
        const MassDistribution& d;
        double operator()(const PointMass&) const { return 0.0; }
        double operator()(const UniformBall& b) const { return 2.0 * b.radius; }
        double operator()(const RadialProfile&) const { return 2.0 * d.support_annuli().back().outer; }
        double operator()(const BallUnion& un) const {
            double best = 0.0;
            for (const auto& a : un.balls)
                for (const auto& b : un.balls)
                    best = std::max(best, distance(a.center, b.center) + a.radius + b.radius);
            return best;
        }
        double operator()(const VoxelGrid&) const {
            const auto& boxes = d.occupied_cells();
            double best = 0.0;
            for (std::size_t i = 0; i < boxes.size(); ++i)
                for (std::size_t j = i; j < boxes.size(); ++j) {
                    double dx = std::max(boxes[j].hi.x - boxes[i].lo.x, boxes[i].hi.x - boxes[j].lo.x);
                    double dy = std::max(boxes[j].hi.y - boxes[i].lo.y, boxes[i].hi.y - boxes[j].lo.y);
                    double dz = std::max(boxes[j].hi.z - boxes[i].lo.z, boxes[i].hi.z - boxes[j].lo.z);
                    best = std::max(best, std::sqrt(dx * dx + dy * dy + dz * dz));
                }
            return best;
        }
    };
    return std::visit(Visitor{d}, d.shape());
}

}  // namespace newton_horizon

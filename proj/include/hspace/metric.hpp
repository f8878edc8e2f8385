#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hspace/errors.hpp"

namespace hspace {

/// A point of the base metric space: an immutable coordinate vector of
/// fixed dimension d >= 1 with finite entries.
class Point {
public:
    Point() = default;
    Point(std::initializer_list<double> cs) : coords_(cs) { validate(); }
    explicit Point(std::vector<double> cs) : coords_(std::move(cs)) { validate(); }

    std::size_t dim() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<double>& coords() const { return coords_; }
    const double* data() const { return coords_.data(); }

    friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

private:
    void validate() const {
        if (coords_.empty()) throw InvalidPointError("point must have dimension >= 1");
        for (double c : coords_)
            if (!std::isfinite(c)) throw InvalidPointError("point coordinate is not finite");
    }

    std::vector<double> coords_;
};

/// Lexicographic coordinate order; the post-sort applied to set-valued
/// results before they are returned.
inline bool lex_less(const Point& a, const Point& b) {
    return std::lexicographical_compare(a.coords().begin(), a.coords().end(),
                                        b.coords().begin(), b.coords().end());
}

enum class MetricKind { euclidean, manhattan, chebyshev, custom };

namespace detail {

// Shared point-distance kernel. Every path in the library (plain scans,
// early-break scans, grid queries, the oracle) evaluates distances through
// this one function so their results agree bit-for-bit.
inline double lp_distance(MetricKind kind, const double* a, const double* b, std::size_t d) {
    switch (kind) {
        case MetricKind::euclidean: {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double t = a[i] - b[i];
                s += t * t;
            }
            return std::sqrt(s);
        }
        case MetricKind::manhattan: {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += std::fabs(a[i] - b[i]);
            return s;
        }
        case MetricKind::chebyshev: {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s = std::max(s, std::fabs(a[i] - b[i]));
            return s;
        }
        case MetricKind::custom: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// The base distance function: one of the built-in Lp metrics or a
/// user-supplied callback. Built-ins are metrics by construction; a custom
/// callback is trusted (axioms are exercised by property tests, not checked
/// at construction).
class MetricSpec {
public:
    using DistanceFn = std::function<double(const Point&, const Point&)>;

    static MetricSpec euclidean() { return MetricSpec(MetricKind::euclidean, "euclidean"); }
    static MetricSpec manhattan() { return MetricSpec(MetricKind::manhattan, "manhattan"); }
    static MetricSpec chebyshev() { return MetricSpec(MetricKind::chebyshev, "chebyshev"); }

    static MetricSpec custom(DistanceFn fn, std::string name = "custom") {
        if (!fn) throw Error("custom metric requires a callable");
        MetricSpec m(MetricKind::custom, std::move(name));
        m.fn_ = std::move(fn);
        return m;
    }

    /// Built-in metric by name; used by file and CLI front ends.
    static MetricSpec from_name(const std::string& name) {
        if (name == "euclidean") return euclidean();
        if (name == "manhattan") return manhattan();
        if (name == "chebyshev") return chebyshev();
        throw Error("unknown metric: " + name);
    }

    MetricKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    double operator()(const Point& x, const Point& y) const {
        if (x.dim() != y.dim())
            throw DimensionError("distance between points of dimension " +
                                 std::to_string(x.dim()) + " and " + std::to_string(y.dim()));
        if (kind_ == MetricKind::custom) return fn_(x, y);
        return detail::lp_distance(kind_, x.data(), y.data(), x.dim());
    }

private:
    MetricSpec(MetricKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    MetricKind kind_;
    std::string name_;
    DistanceFn fn_;
};

inline double distance(const Point& x, const Point& y, const MetricSpec& m) { return m(x, y); }

namespace detail {

// Hash/equality over coordinate vectors with -0.0 folded into +0.0, so the
// numeric equality used by dedup and the hash agree.
struct CoordHash {
    std::size_t operator()(const std::vector<double>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (double c : v) {
            const double z = (c == 0.0) ? 0.0 : c;
            std::uint64_t bits;
            std::memcpy(&bits, &z, sizeof bits);
            h ^= bits;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct CoordEq {
    bool operator()(const std::vector<double>& a, const std::vector<double>& b) const {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return false;
        return true;
    }
};

}  // namespace detail

/// A finite non-empty set of points of common dimension: the representable
/// member of the hyperspace. Finite sets are closed and bounded, so every
/// value of this type is a valid hyperspace element by construction.
///
/// Points are stored in first-occurrence order and never mutated afterwards;
/// all operations on point sets are pure and safe for concurrent readers.
class PointSet {
public:
    /// Deduplicates within `dedup_tol` (0 = exact duplicates only), keeping
    /// the earliest occurrence. With a positive tolerance no two stored
    /// points are closer than `dedup_tol` under `metric`.
    explicit PointSet(std::vector<Point> pts, double dedup_tol = 0.0,
                      const MetricSpec& metric = MetricSpec::euclidean())
        : dedup_tol_(dedup_tol) {
        if (pts.empty()) throw EmptySetError("point set must be non-empty");
        if (dedup_tol < 0.0) throw Error("dedup tolerance must be >= 0");
        dim_ = pts.front().dim();
        for (const Point& p : pts)
            if (p.dim() != dim_)
                throw DimensionError("point set mixes dimensions " + std::to_string(dim_) +
                                     " and " + std::to_string(p.dim()));
        if (dedup_tol == 0.0) {
            std::unordered_set<std::vector<double>, detail::CoordHash, detail::CoordEq> seen;
            seen.reserve(pts.size() * 2);
            for (Point& p : pts)
                if (seen.insert(p.coords()).second) points_.push_back(std::move(p));
        } else {
            for (Point& p : pts) {
                bool keep = true;
                for (const Point& q : points_) {
                    if (metric(p, q) <= dedup_tol) {
                        keep = false;
                        break;
                    }
                }
                if (keep) points_.push_back(std::move(p));
            }
        }
    }

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    double dedup_tol() const { return dedup_tol_; }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Point>& points() const { return points_; }

    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

private:
    std::vector<Point> points_;
    std::size_t dim_ = 0;
    double dedup_tol_ = 0.0;
};

namespace detail {

inline void check_dims(const Point& x, const PointSet& a, const char* op) {
    if (x.dim() != a.dim())
        throw DimensionError(std::string(op) + ": point dimension " + std::to_string(x.dim()) +
                             " vs set dimension " + std::to_string(a.dim()));
}

// Index of the closest member, lowest index on ties.
inline std::size_t nearest_index(const Point& x, const PointSet& a, const MetricSpec& m) {
    std::size_t best = 0;
    double best_d = m(x, a[0]);
    for (std::size_t i = 1; i < a.size(); ++i) {
        const double d = m(x, a[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

/// rho(x, A): minimum distance from x to a member of A. Exact minimum, no
/// approximation; zero exactly when x coincides with a stored point.
inline double point_set_distance(const Point& x, const PointSet& a, const MetricSpec& m) {
    detail::check_dims(x, a, "point_set_distance");
    double best = m(x, a[0]);
    for (std::size_t i = 1; i < a.size(); ++i) best = std::min(best, m(x, a[i]));
    return best;
}

/// Closest member of A together with its distance. Ties resolve to the
/// lowest storage index.
inline std::pair<Point, double> nearest_point(const Point& x, const PointSet& a,
                                              const MetricSpec& m) {
    detail::check_dims(x, a, "nearest_point");
    const std::size_t i = detail::nearest_index(x, a, m);
    return {a[i], m(x, a[i])};
}

}  // namespace hspace

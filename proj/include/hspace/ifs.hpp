#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hspace/errors.hpp"
#include "hspace/hausdorff.hpp"
#include "hspace/metric.hpp"
#include "hspace/sequence.hpp"

namespace hspace {

namespace detail {

// Largest singular value of a d x d matrix: cyclic Jacobi sweeps on M^T M.
inline double spectral_norm(const std::vector<double>& m, std::size_t d) {
    if (d == 1) return std::fabs(m[0]);
    std::vector<double> s(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += m[k * d + i] * m[k * d + j];
            s[i * d + j] = acc;
        }
    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) scale += s[i * d + i];
    const double tol = 1e-14 * (scale + 1.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += std::fabs(s[p * d + q]);
        if (off <= tol) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = s[p * d + q];
                if (std::fabs(apq) <= tol / (d * d)) continue;
                const double tau = (s[q * d + q] - s[p * d + p]) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double skp = s[k * d + p], skq = s[k * d + q];
                    s[k * d + p] = c * skp - sn * skq;
                    s[k * d + q] = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double spk = s[p * d + k], sqk = s[q * d + k];
                    s[p * d + k] = c * spk - sn * sqk;
                    s[q * d + k] = sn * spk + c * sqk;
                }
            }
        }
    }
    double lmax = 0.0;
    for (std::size_t i = 0; i < d; ++i) lmax = std::max(lmax, s[i * d + i]);
    return std::sqrt(std::max(lmax, 0.0));
}

}  // namespace detail

/// Affine self-map x -> L x + t of R^d, stored row-major.
class AffineMap {
public:
    AffineMap(std::vector<double> linear_row_major, std::vector<double> offset)
        : linear_(std::move(linear_row_major)), offset_(std::move(offset)) {
        if (offset_.empty()) throw DimensionError("affine map needs dimension >= 1");
        if (linear_.size() != offset_.size() * offset_.size())
            throw DimensionError("linear block of " + std::to_string(linear_.size()) +
                                 " entries does not match dimension " +
                                 std::to_string(offset_.size()));
    }

    std::size_t dim() const { return offset_.size(); }
    const std::vector<double>& linear() const { return linear_; }
    const std::vector<double>& offset() const { return offset_; }

    Point apply(const Point& x) const {
        const std::size_t d = dim();
        if (x.dim() != d)
            throw DimensionError("map dimension " + std::to_string(d) + " vs point dimension " +
                                 std::to_string(x.dim()));
        std::vector<double> y(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            double acc = offset_[i];
            for (std::size_t j = 0; j < d; ++j) acc += linear_[i * d + j] * x[j];
            y[i] = acc;
        }
        return Point(std::move(y));
    }

private:
    std::vector<double> linear_;
    std::vector<double> offset_;
};

/// Lipschitz constant of an affine map: the operator norm of its linear part.
inline double contraction_factor(const AffineMap& f) {
    return detail::spectral_norm(f.linear(), f.dim());
}

/// A finite list of affine maps of one dimension; caches the largest
/// per-map Lipschitz constant.
class Ifs {
public:
    explicit Ifs(std::vector<AffineMap> maps) : maps_(std::move(maps)) {
        if (maps_.empty()) throw Error("system needs at least one map");
        dim_ = maps_.front().dim();
        contraction_ = 0.0;
        for (const AffineMap& f : maps_) {
            if (f.dim() != dim_)
                throw DimensionError("system mixes dimensions " + std::to_string(dim_) +
                                     " and " + std::to_string(f.dim()));
            contraction_ = std::max(contraction_, contraction_factor(f));
        }
    }

    const std::vector<AffineMap>& maps() const { return maps_; }
    std::size_t dim() const { return dim_; }
    double contraction() const { return contraction_; }

private:
    std::vector<AffineMap> maps_;
    std::size_t dim_ = 0;
    double contraction_ = 0.0;
};

/// One application of the set map F(A) = union of f_k(A), exact-deduplicated.
inline PointSet hutchinson_step(const PointSet& a, const Ifs& sys) {
    if (a.dim() != sys.dim())
        throw DimensionError("set dimension " + std::to_string(a.dim()) +
                             " vs system dimension " + std::to_string(sys.dim()));
    std::vector<Point> out;
    out.reserve(a.size() * sys.maps().size());
    for (const AffineMap& f : sys.maps())
        for (const Point& p : a) out.push_back(f.apply(p));
    return PointSet(std::move(out));
}

/// Greedy delta-net subset D of A with rho_H(A, D) <= delta: points are
/// scanned in storage order and kept when farther than delta from every
/// point already kept. delta == 0 returns A unchanged.
inline PointSet decimate(const PointSet& a, double delta,
                         const MetricSpec& metric = MetricSpec::euclidean()) {
    if (delta < 0.0) throw Error("delta must be >= 0");
    if (delta == 0.0 || a.size() == 1) return a;

    const std::size_t d = a.dim();
    // Bucket kept points at cell size delta; any point within delta sits in
    // one of the 3^d neighbouring cells for every built-in metric.
    bool use_grid = metric.kind() != MetricKind::custom;
    std::vector<double> lo(d, 0.0);
    std::vector<std::size_t> ncell(d, 1);
    std::size_t total = 1;
    if (use_grid) {
        std::vector<double> hi(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = hi[k] = a[0][k];
        }
        for (const Point& p : a)
            for (std::size_t k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], p[k]);
                hi[k] = std::max(hi[k], p[k]);
            }
        const std::size_t max_cells = 16 * a.size() + 1024;
        for (std::size_t k = 0; k < d && use_grid; ++k) {
            const double extent = hi[k] - lo[k];
            const double cells = std::floor(extent / delta) + 1.0;
            if (!(cells > 0.0) || cells > static_cast<double>(max_cells)) {
                use_grid = false;
                break;
            }
            ncell[k] = static_cast<std::size_t>(cells);
            if (total > max_cells / ncell[k]) {
                use_grid = false;
                break;
            }
            total *= ncell[k];
        }
    }

    std::vector<Point> kept;
    if (!use_grid) {
        for (const Point& p : a) {
            bool separated = true;
            for (const Point& q : kept)
                if (metric(p, q) <= delta) {
                    separated = false;
                    break;
                }
            if (separated) kept.push_back(p);
        }
        return PointSet(std::move(kept));
    }

    std::vector<std::vector<std::uint32_t>> buckets(total);
    auto cell_of = [&](const Point& p, std::size_t k) {
        const auto c = static_cast<long>(std::floor((p[k] - lo[k]) / delta));
        return std::clamp(c, 0L, static_cast<long>(ncell[k]) - 1);
    };
    auto flat = [&](const std::vector<long>& c) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < d; ++k) idx = idx * ncell[k] + static_cast<std::size_t>(c[k]);
        return idx;
    };
    std::vector<long> cc(d), nb(d);
    for (const Point& p : a) {
        for (std::size_t k = 0; k < d; ++k) cc[k] = cell_of(p, k);
        bool separated = true;
        // odometer over the 3^d neighbourhood
        nb.assign(d, -1);
        while (separated) {
            bool in_range = true;
            for (std::size_t k = 0; k < d; ++k) {
                const long v = cc[k] + nb[k];
                if (v < 0 || v >= static_cast<long>(ncell[k])) {
                    in_range = false;
                    break;
                }
            }
            if (in_range) {
                std::vector<long> cell(d);
                for (std::size_t k = 0; k < d; ++k) cell[k] = cc[k] + nb[k];
                for (std::uint32_t i : buckets[flat(cell)]) {
                    if (metric(p, kept[i]) <= delta) {
                        separated = false;
                        break;
                    }
                }
            }
            std::size_t k = 0;
            while (k < d && ++nb[k] > 1) nb[k++] = -1;
            if (k == d) break;
        }
        if (separated) {
            kept.push_back(p);
            buckets[flat(cc)].push_back(static_cast<std::uint32_t>(kept.size() - 1));
        }
    }
    return PointSet(std::move(kept));
}

namespace detail {

// Metric diameter upper bound of a set; used to bracket the decimation search.
inline double diameter_bound(const PointSet& a, const MetricSpec& m) {
    if (m.kind() == MetricKind::custom) {
        double r = 0.0;
        for (const Point& p : a) r = std::max(r, m(a[0], p));
        return 2.0 * r;
    }
    const std::size_t d = a.dim();
    std::vector<double> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) lo[k] = hi[k] = a[0][k];
    for (const Point& p : a)
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double e = hi[k] - lo[k];
        switch (m.kind()) {
            case MetricKind::euclidean: acc += e * e; break;
            case MetricKind::manhattan: acc += e; break;
            case MetricKind::chebyshev: acc = std::max(acc, e); break;
            case MetricKind::custom: break;
        }
    }
    return m.kind() == MetricKind::euclidean ? std::sqrt(acc) : acc;
}

// Smallest delta (to bisection precision) whose net keeps at most `budget`
// points. delta = 0 is infeasible by assumption (|A| > budget).
inline double smallest_feasible_delta(const PointSet& a, std::size_t budget,
                                      const MetricSpec& m) {
    double lo = 0.0;
    double hi = std::max(diameter_bound(a, m), 1e-300);
    for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (decimate(a, mid, m).size() <= budget) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace detail

struct AttractorStep {
    std::size_t step;  ///< 0-based iteration number
    std::size_t size;  ///< |A_step|
    double gap;        ///< rho_H(A_step, A_{step+1})
    double delta;      ///< decimation radius used to produce A_{step+1} (0 = none)
};

/// Full record of an attractor run: the per-step decay table and every
/// iterate, re-playable as a SetSequence.
struct AttractorTrace {
    std::vector<AttractorStep> steps;
    std::vector<PointSet> iterates;  ///< A_0 (the seed) through A_K
    MetricSpec metric = MetricSpec::euclidean();

    const PointSet& final_set() const { return iterates.back(); }

    SetSequence to_sequence() const { return SetSequence(iterates, metric); }
};

/// Iterates the set map from `seed`, decimating each iterate with the
/// smallest radius that keeps it within `budget` points. Requires a
/// contractive system; the recorded gaps then decay geometrically up to the
/// decimation error, and the iterate sequence is Cauchy.
inline AttractorTrace attractor(const Ifs& sys, const PointSet& seed, std::size_t iters,
                                std::size_t budget,
                                const MetricSpec& metric = MetricSpec::euclidean()) {
    if (sys.contraction() >= 1.0) throw NotContractiveError(sys.contraction());
    if (seed.dim() != sys.dim())
        throw DimensionError("seed dimension " + std::to_string(seed.dim()) +
                             " vs system dimension " + std::to_string(sys.dim()));
    if (budget < seed.size()) throw std::invalid_argument("budget smaller than the seed");

    AttractorTrace trace;
    trace.metric = metric;
    trace.iterates.push_back(seed);
    for (std::size_t k = 0; k < iters; ++k) {
        const PointSet& cur = trace.iterates.back();
        PointSet next = hutchinson_step(cur, sys);
        double delta = 0.0;
        if (next.size() > budget) {
            delta = detail::smallest_feasible_delta(next, budget, metric);
            next = decimate(next, delta, metric);
        }
        const double gap = hausdorff_distance(cur, next, metric).rho_h;
        trace.steps.push_back({k, cur.size(), gap, delta});
        trace.iterates.push_back(std::move(next));
    }
    return trace;
}

// ---- example systems ----

/// Two maps x/3 and x/3 + 2/3 on the line; attractor is the middle-thirds
/// dust with endpoints 0 and 1.
inline Ifs cantor_system() {
    const double third = 1.0 / 3.0;
    return Ifs({AffineMap({third}, {0.0}), AffineMap({third}, {2.0 / 3.0})});
}

/// Three half-scale maps toward the corners of the unit right triangle.
inline Ifs sierpinski_system() {
    return Ifs({AffineMap({0.5, 0.0, 0.0, 0.5}, {0.0, 0.0}),
                AffineMap({0.5, 0.0, 0.0, 0.5}, {0.5, 0.0}),
                AffineMap({0.5, 0.0, 0.0, 0.5}, {0.0, 0.5})});
}

/// Four-map fern with the familiar folklore coefficients; demo system, no
/// numeric claims attached.
inline Ifs fern_system() {
    return Ifs({AffineMap({0.0, 0.0, 0.0, 0.16}, {0.0, 0.0}),
                AffineMap({0.85, 0.04, -0.04, 0.85}, {0.0, 1.6}),
                AffineMap({0.2, -0.26, 0.23, 0.22}, {0.0, 1.6}),
                AffineMap({-0.15, 0.28, 0.26, 0.24}, {0.0, 0.44})});
}

}  // namespace hspace

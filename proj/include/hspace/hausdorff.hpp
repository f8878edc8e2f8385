#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hspace/errors.hpp"
#include "hspace/metric.hpp"

namespace hspace {

/// Full result of a set-distance computation: both directed distances, their
/// maximum, and the points realizing each directed distance.
struct DistanceBreakdown {
    double u_ab;       ///< directed distance from A to B
    double u_ba;       ///< directed distance from B to A
    double rho_h;      ///< max(u_ab, u_ba)
    Point witness_ab;  ///< point of A with rho(witness_ab, B) == u_ab
    Point witness_ba;  ///< point of B with rho(witness_ba, A) == u_ba
};

namespace detail {

// Safety factor applied to geometric lower bounds before pruning. The bounds
// are mathematically valid in real arithmetic; the factor keeps them valid
// after rounding, so a pruned cell can never hold the computed minimum.
inline constexpr double kPruneSlack = 1.0 - 1e-12;

struct MinScan {
    double value;   // exact min over computed pair distances unless aborted
    bool aborted;   // running minimum fell to <= the caller's break level
};

// Plain early-break minimum: scan every member, abort once the running
// minimum cannot exceed `break_at` (the caller's current max).
inline MinScan linear_min(const Point& x, const PointSet& b, const MetricSpec& m,
                          double break_at) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double d = m(x, b[i]);
        if (d < best) {
            best = d;
            if (best <= break_at) return {best, true};
        }
    }
    return {best, false};
}

// Uniform bucket grid over a point set. Cell size follows the bounding-box
// diagonal divided by ceil(n^(1/d)), clamped away from degenerate boxes.
// Only meaningful for the built-in Lp metrics, where axis gaps bound the
// distance from below.
class UniformGrid {
public:
    UniformGrid(const PointSet& set, MetricKind kind) : set_(set), kind_(kind) {
        const std::size_t d = set.dim();
        lo_.assign(d, std::numeric_limits<double>::infinity());
        hi_.assign(d, -std::numeric_limits<double>::infinity());
        for (const Point& p : set) {
            for (std::size_t a = 0; a < d; ++a) {
                lo_[a] = std::min(lo_[a], p[a]);
                hi_[a] = std::max(hi_[a], p[a]);
            }
        }
        double diag_sq = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double e = hi_[a] - lo_[a];
            diag_sq += e * e;
        }
        const double diag = std::sqrt(diag_sq);
        const double per_axis = std::ceil(std::pow(static_cast<double>(set.size()), 1.0 / d));
        cell_ = diag / std::max(per_axis, 1.0);
        if (!(cell_ > 0.0) || !std::isfinite(cell_)) return;  // degenerate box

        ncell_.resize(d);
        const std::size_t max_cells = 16 * set.size() + 1024;
        std::size_t total = 1;
        for (std::size_t a = 0; a < d; ++a) {
            const double extent = hi_[a] - lo_[a];
            std::size_t n = static_cast<std::size_t>(std::floor(extent / cell_)) + 1;
            ncell_[a] = std::max<std::size_t>(n, 1);
            if (total > max_cells / ncell_[a]) return;  // cell blow-up guard
            total *= ncell_[a];
        }

        buckets_.assign(total, {});
        for (std::uint32_t i = 0; i < set.size(); ++i)
            buckets_[flat_index(cell_of(set[i]))].push_back(i);
        valid_ = true;
    }

    bool valid() const { return valid_; }

    // Exact minimum distance from x to the set, walking cells outward by
    // Chebyshev ring. Pruned cells provably cannot contain the minimizer;
    // aborts like linear_min once the running minimum reaches break_at.
    MinScan query(const Point& x, const MetricSpec& m, double break_at) const {
        const std::size_t d = set_.dim();
        std::vector<long> c0(d);
        for (std::size_t a = 0; a < d; ++a) {
            long c = static_cast<long>(std::floor((x[a] - lo_[a]) / cell_));
            c0[a] = std::clamp(c, 0L, static_cast<long>(ncell_[a]) - 1);
        }
        long rmax = 0;
        for (std::size_t a = 0; a < d; ++a)
            rmax = std::max({rmax, c0[a], static_cast<long>(ncell_[a]) - 1 - c0[a]});

        double best = std::numeric_limits<double>::infinity();
        bool aborted = false;
        for (long r = 0; r <= rmax; ++r) {
            // Any cell r rings away is at least (r-1) whole cells away in
            // some axis, for all three built-in metrics.
            if (r >= 2 && static_cast<double>(r - 1) * cell_ * kPruneSlack > best) break;
            visit_ring(c0, r, [&](std::size_t flat, const std::vector<long>& cc) {
                if (aborted) return;
                const auto& bucket = buckets_[flat];
                if (bucket.empty()) return;
                if (cell_lower_bound(x, cc) * kPruneSlack > best) return;
                for (std::uint32_t i : bucket) {
                    const double dist = m(x, set_[i]);
                    if (dist < best) {
                        best = dist;
                        if (best <= break_at) {
                            aborted = true;
                            return;
                        }
                    }
                }
            });
            if (aborted) break;
        }
        return {best, aborted};
    }

private:
    std::vector<long> cell_of(const Point& p) const {
        std::vector<long> c(set_.dim());
        for (std::size_t a = 0; a < set_.dim(); ++a) {
            long v = static_cast<long>(std::floor((p[a] - lo_[a]) / cell_));
            c[a] = std::clamp(v, 0L, static_cast<long>(ncell_[a]) - 1);
        }
        return c;
    }

    std::size_t flat_index(const std::vector<long>& c) const {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < c.size(); ++a) idx = idx * ncell_[a] + static_cast<std::size_t>(c[a]);
        return idx;
    }

    // Metric distance from x to the closed box of cell cc.
    double cell_lower_bound(const Point& x, const std::vector<long>& cc) const {
        double acc = 0.0;
        for (std::size_t a = 0; a < cc.size(); ++a) {
            const double box_lo = lo_[a] + static_cast<double>(cc[a]) * cell_;
            const double box_hi = box_lo + cell_;
            double gap = 0.0;
            if (x[a] < box_lo) gap = box_lo - x[a];
            else if (x[a] > box_hi) gap = x[a] - box_hi;
            switch (kind_) {
                case MetricKind::euclidean: acc += gap * gap; break;
                case MetricKind::manhattan: acc += gap; break;
                case MetricKind::chebyshev: acc = std::max(acc, gap); break;
                case MetricKind::custom: break;
            }
        }
        return kind_ == MetricKind::euclidean ? std::sqrt(acc) : acc;
    }

    // Enumerate in-bounds cells whose Chebyshev offset from c0 is exactly r.
    template <typename Fn>
    void visit_ring(const std::vector<long>& c0, long r, Fn&& fn) const {
        const std::size_t d = c0.size();
        std::vector<long> cc(d);
        walk_axis(0, false, c0, r, cc, fn);
    }

    template <typename Fn>
    void walk_axis(std::size_t a, bool has_extreme, const std::vector<long>& c0, long r,
                   std::vector<long>& cc, Fn&& fn) const {
        const std::size_t d = c0.size();
        const long n = static_cast<long>(ncell_[a]);
        auto step = [&](long off, bool extreme) {
            const long v = c0[a] + off;
            if (v < 0 || v >= n) return;
            cc[a] = v;
            if (a + 1 == d) {
                if (has_extreme || extreme) fn(flat_index(cc), cc);
            } else {
                walk_axis(a + 1, has_extreme || extreme, c0, r, cc, fn);
            }
        };
        if (a + 1 == d && !has_extreme) {
            // last axis must supply the extreme offset
            if (r == 0) step(0, true);
            else {
                step(-r, true);
                step(r, true);
            }
        } else {
            for (long off = -r; off <= r; ++off) step(off, std::abs(off) == r);
        }
    }

    const PointSet& set_;
    MetricKind kind_;
    std::vector<double> lo_, hi_;
    double cell_ = 0.0;
    std::vector<std::size_t> ncell_;
    std::vector<std::vector<std::uint32_t>> buckets_;
    bool valid_ = false;
};

enum class ScanPolicy { automatic, force_linear, force_grid };

inline constexpr std::size_t kGridThreshold = 64;

struct DirectedResult {
    double value;
    std::size_t witness;  // index into the source set
};

// u(A,B) = max over x in A of min over y in B. Early break skips the rest of
// a point's scan once its minimum provably cannot raise the running maximum;
// the surviving full scans yield exact minima, so the maximum (and the first
// index attaining it) match the unconditional oracle bit-for-bit.
inline DirectedResult directed_scan(const PointSet& a, const PointSet& b, const MetricSpec& m,
                                    ScanPolicy policy) {
    bool use_grid = false;
    if (m.kind() != MetricKind::custom && policy != ScanPolicy::force_linear)
        use_grid = policy == ScanPolicy::force_grid || b.size() >= kGridThreshold;

    if (use_grid) {
        UniformGrid grid(b, m.kind());
        if (grid.valid()) {
            double cmax = -1.0;
            std::size_t witness = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const MinScan s = grid.query(a[i], m, cmax);
                if (!s.aborted && s.value > cmax) {
                    cmax = s.value;
                    witness = i;
                }
            }
            return {cmax, witness};
        }
    }
    double cmax = -1.0;
    std::size_t witness = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const MinScan s = linear_min(a[i], b, m, cmax);
        if (!s.aborted && s.value > cmax) {
            cmax = s.value;
            witness = i;
        }
    }
    return {cmax, witness};
}

// Unconditional full pairwise scan; ground truth for everything above.
inline DirectedResult directed_full(const PointSet& a, const PointSet& b, const MetricSpec& m) {
    double cmax = -1.0;
    std::size_t witness = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double mn = m(a[i], b[0]);
        for (std::size_t j = 1; j < b.size(); ++j) mn = std::min(mn, m(a[i], b[j]));
        if (mn > cmax) {
            cmax = mn;
            witness = i;
        }
    }
    return {cmax, witness};
}

inline void check_set_dims(const PointSet& a, const PointSet& b) {
    if (a.dim() != b.dim())
        throw DimensionError("set distance between dimensions " + std::to_string(a.dim()) +
                             " and " + std::to_string(b.dim()));
}

inline DistanceBreakdown breakdown_from(const PointSet& a, const PointSet& b,
                                        const DirectedResult& ab, const DirectedResult& ba) {
    return {ab.value, ba.value, std::max(ab.value, ba.value), a[ab.witness], b[ba.witness]};
}

inline DistanceBreakdown hausdorff_with_policy(const PointSet& a, const PointSet& b,
                                               const MetricSpec& m, ScanPolicy policy) {
    check_set_dims(a, b);
    return breakdown_from(a, b, directed_scan(a, b, m, policy), directed_scan(b, a, m, policy));
}

}  // namespace detail

/// Directed set distance u(A,B): how far the worst point of A is from B.
/// Zero exactly when every point of A occurs in B. Not symmetric.
inline double directed_distance(const PointSet& a, const PointSet& b, const MetricSpec& m) {
    detail::check_set_dims(a, b);
    return detail::directed_scan(a, b, m, detail::ScanPolicy::automatic).value;
}

/// Hausdorff distance with both directed components and witnesses.
/// Uses early-break scans and uniform-grid bucketing; both accelerations are
/// exact, so the returned values equal hausdorff_distance_oracle bit-for-bit.
inline DistanceBreakdown hausdorff_distance(const PointSet& a, const PointSet& b,
                                            const MetricSpec& m) {
    return detail::hausdorff_with_policy(a, b, m, detail::ScanPolicy::automatic);
}

/// Reference O(|A|*|B|) implementation: unconditional full pairwise scan.
/// Ground truth for the accelerated path.
inline DistanceBreakdown hausdorff_distance_oracle(const PointSet& a, const PointSet& b,
                                                   const MetricSpec& m) {
    detail::check_set_dims(a, b);
    return detail::breakdown_from(a, b, detail::directed_full(a, b, m),
                                  detail::directed_full(b, a, m));
}

}  // namespace hspace

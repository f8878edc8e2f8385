#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hspace/errors.hpp"
#include "hspace/hausdorff.hpp"
#include "hspace/metric.hpp"

namespace hspace {

/// A finite prefix A_1..A_N of a sequence of point sets, all of one
/// dimension, analyzed under one metric. Indices in this module are 1-based
/// throughout; a modulus m means "every index i with m < i <= N".
class SetSequence {
public:
    SetSequence(std::vector<PointSet> sets, MetricSpec metric)
        : sets_(std::move(sets)), metric_(std::move(metric)) {
        if (sets_.size() < 2) throw Error("sequence needs at least two sets");
        dim_ = sets_.front().dim();
        for (const PointSet& s : sets_)
            if (s.dim() != dim_)
                throw DimensionError("sequence mixes dimensions " + std::to_string(dim_) +
                                     " and " + std::to_string(s.dim()));
    }

    std::size_t size() const { return sets_.size(); }
    std::size_t dim() const { return dim_; }
    const MetricSpec& metric() const { return metric_; }
    const std::vector<PointSet>& sets() const { return sets_; }

    /// 1-based access.
    const PointSet& set(std::size_t n) const {
        if (n < 1 || n > sets_.size())
            throw IndexError("sequence index " + std::to_string(n) + " outside 1.." +
                             std::to_string(sets_.size()));
        return sets_[n - 1];
    }

private:
    std::vector<PointSet> sets_;
    MetricSpec metric_;
    std::size_t dim_ = 0;
};

/// Cauchy verdict over the stored prefix at a given tolerance.
struct CauchyReport {
    bool is_cauchy;                     ///< some admissible modulus exists
    std::optional<std::size_t> modulus; ///< smallest m with sup over pairs beyond m < epsilon
    double tail_sup;                    ///< that supremum (best achievable one when not Cauchy)
    double epsilon;
};

/// Checks the Cauchy property by computing every pairwise set distance over
/// the prefix. A positive modulus is only reported if at least `min_margin`
/// indices remain beyond it; a modulus at the prefix edge carries no
/// evidence. m = 0 (the whole prefix) is always considered.
inline CauchyReport is_cauchy(const SetSequence& seq, double epsilon,
                              std::size_t min_margin = 5) {
    if (!(epsilon > 0.0)) throw Error("epsilon must be > 0");
    if (min_margin < 2) throw Error("min_margin must be >= 2");
    const std::size_t n = seq.size();
    const auto& sets = seq.sets();

    // rowmax[i] = max over j > i of rho_H(A_i, A_j), 0-based
    std::vector<double> rowmax(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double mx = 0.0;
        for (std::size_t j = i + 1; j < n; ++j)
            mx = std::max(mx, hausdorff_distance(sets[i], sets[j], seq.metric()).rho_h);
        rowmax[i] = mx;
    }
    // sufmax[m] = sup over pairs with both indices > m (1-based), i.e. 0-based >= m
    std::vector<double> sufmax(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
        sufmax[i] = std::max(rowmax[i], sufmax[i + 1]);

    std::size_t m_top = n >= min_margin ? n - min_margin : 0;
    m_top = std::min(m_top, n - 2);
    for (std::size_t m = 0; m <= m_top; ++m)
        if (sufmax[m] < epsilon) return {true, m, sufmax[m], epsilon};
    return {false, std::nullopt, sufmax[m_top], epsilon};
}

/// Union of A_n..A_N, exact-deduplicated and sorted. For finite sets the
/// closure of a tail union is the union itself.
inline PointSet tail_union(const SetSequence& seq, std::size_t n) {
    if (n < 1 || n > seq.size())
        throw IndexError("tail_union index " + std::to_string(n) + " outside 1.." +
                         std::to_string(seq.size()));
    std::vector<Point> pts;
    for (std::size_t i = n; i <= seq.size(); ++i)
        for (const Point& p : seq.set(i)) pts.push_back(p);
    PointSet dedup(std::move(pts));
    std::vector<Point> ordered(dedup.begin(), dedup.end());
    std::sort(ordered.begin(), ordered.end(), lex_less);
    return PointSet(std::move(ordered));
}

namespace detail {

// Candidate pool: every point of every member set, then the caller's extras,
// exact-deduplicated keeping first occurrence.
inline std::vector<Point> candidate_pool(const SetSequence& seq, const PointSet* extra) {
    if (extra && extra->dim() != seq.dim())
        throw DimensionError("candidate dimension " + std::to_string(extra->dim()) +
                             " vs sequence dimension " + std::to_string(seq.dim()));
    std::vector<Point> pool;
    for (const PointSet& s : seq.sets())
        for (const Point& p : s) pool.push_back(p);
    if (extra)
        for (const Point& p : *extra) pool.push_back(p);
    PointSet dedup(std::move(pool));
    return {dedup.begin(), dedup.end()};
}

inline std::size_t tail_start(std::size_t n, double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw Error("tail_fraction must lie in (0, 1]");
    const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * tail_fraction));
    return std::clamp<std::size_t>(k, 1, n);
}

}  // namespace detail

/// Approximation of the limit set extracted from the truncated prefix.
struct LimitApprox {
    PointSet points;                 ///< cluster representatives of the qualifying candidates
    double epsilon;                  ///< thickening tolerance used for extraction
    std::size_t candidates_examined; ///< deduplicated candidate pool size
    bool cauchy_at_epsilon;          ///< warning flag: false when the prefix is not Cauchy at epsilon
};

/// Evaluates the tail-intersection characterization of the limit on the
/// truncation: a candidate x qualifies when rho(x, union of A_n..A_N) <= eps
/// for every n up to N_check = floor(N * tail_fraction). Tail unions shrink
/// as n grows, so the deepest meaningful tail (n = N_check) decides.
///
/// Qualifying candidates are clustered at scale eps; each cluster is
/// represented by its best-qualifying member (smallest tail distance, pool
/// order on ties), so injected candidates at genuine cluster points win over
/// transient sequence members.
inline LimitApprox limit_set(const SetSequence& seq, double epsilon,
                             const std::optional<PointSet>& extra_candidates = std::nullopt,
                             double tail_fraction = 0.5) {
    if (epsilon < 0.0) throw Error("epsilon must be >= 0");
    const std::size_t n_check = detail::tail_start(seq.size(), tail_fraction);
    const std::vector<Point> pool =
        detail::candidate_pool(seq, extra_candidates ? &*extra_candidates : nullptr);
    const PointSet deep_tail = tail_union(seq, n_check);

    std::vector<std::size_t> survivors;
    std::vector<double> score(pool.size(), 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        score[i] = point_set_distance(pool[i], deep_tail, seq.metric());
        if (score[i] <= epsilon) survivors.push_back(i);
    }
    if (survivors.empty())
        throw EmptyLimitError("no candidate within " + std::to_string(epsilon) +
                              " of the inspected tails");

    std::stable_sort(survivors.begin(), survivors.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    std::vector<Point> kept;
    for (std::size_t idx : survivors) {
        bool separated = true;
        for (const Point& q : kept) {
            if (seq.metric()(pool[idx], q) <= epsilon) {
                separated = false;
                break;
            }
        }
        if (separated) kept.push_back(pool[idx]);
    }
    std::sort(kept.begin(), kept.end(), lex_less);

    const bool cauchy = epsilon > 0.0 ? is_cauchy(seq, epsilon).is_cauchy : false;
    return {PointSet(std::move(kept), epsilon, seq.metric()), epsilon, pool.size(), cauchy};
}

namespace detail {

// Candidates within eps of every inspected tail set (full-sequence witness).
inline std::vector<Point> lower_limit_points(const SetSequence& seq, double epsilon,
                                             const PointSet& candidates, double tail_fraction) {
    if (candidates.dim() != seq.dim())
        throw DimensionError("candidate dimension mismatch");
    const std::size_t n_check = tail_start(seq.size(), tail_fraction);
    std::vector<Point> out;
    for (const Point& x : candidates) {
        bool ok = true;
        for (std::size_t n = n_check; n <= seq.size(); ++n) {
            if (point_set_distance(x, seq.set(n), seq.metric()) > epsilon) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(x);
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

// Candidates within eps of at least a fixed fraction of the inspected tail
// sets; the finite surrogate for "along a subsequence".
inline std::vector<Point> upper_limit_points(const SetSequence& seq, double epsilon,
                                             const PointSet& candidates, double tail_fraction,
                                             double subseq_fraction) {
    if (candidates.dim() != seq.dim())
        throw DimensionError("candidate dimension mismatch");
    if (!(subseq_fraction > 0.0) || subseq_fraction > 1.0)
        throw Error("subseq_fraction must lie in (0, 1]");
    const std::size_t n_check = tail_start(seq.size(), tail_fraction);
    const auto needed = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(subseq_fraction * static_cast<double>(seq.size() - n_check))));
    std::vector<Point> out;
    for (const Point& x : candidates) {
        std::size_t hits = 0;
        for (std::size_t n = n_check; n <= seq.size() && hits < needed; ++n)
            if (point_set_distance(x, seq.set(n), seq.metric()) <= epsilon) ++hits;
        if (hits >= needed) out.push_back(x);
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

}  // namespace detail

/// Lower set limit (truncated): candidates approachable through every
/// inspected tail set. Throws EmptyLimitError when no candidate qualifies.
inline PointSet liminf_set(const SetSequence& seq, double epsilon, const PointSet& candidates,
                           double tail_fraction = 0.5) {
    auto pts = detail::lower_limit_points(seq, epsilon, candidates, tail_fraction);
    if (pts.empty())
        throw EmptyLimitError("no candidate stays within " + std::to_string(epsilon) +
                              " of every inspected set");
    return PointSet(std::move(pts));
}

/// Upper set limit (truncated): candidates recurring along a fraction of the
/// inspected tail. Throws EmptyLimitError when no candidate qualifies.
inline PointSet limsup_set(const SetSequence& seq, double epsilon, const PointSet& candidates,
                           double tail_fraction = 0.5, double subseq_fraction = 0.2) {
    auto pts =
        detail::upper_limit_points(seq, epsilon, candidates, tail_fraction, subseq_fraction);
    if (pts.empty())
        throw EmptyLimitError("no candidate recurs within " + std::to_string(epsilon) +
                              " along the inspected tail");
    return PointSet(std::move(pts));
}

/// Outcome of the uniform-closeness check against an extracted limit.
struct ProximityVerdict {
    double distance;  ///< rho(x, limit points)
    double bound;     ///< epsilon + limit thickening + tol
    bool holds;
};

/// Verifies the hypothesis "rho(x, A_i) < epsilon for every i > m" over the
/// prefix (throwing HypothesisViolatedError at the first failing index) and
/// then checks that x lies within epsilon of the limit, up to the limit's
/// own thickening and a floating-point allowance.
inline ProximityVerdict limit_proximity_check(const SetSequence& seq, const Point& x,
                                              double epsilon, std::size_t m,
                                              const LimitApprox& limit, double tol = 1e-9) {
    if (!(epsilon > 0.0)) throw Error("epsilon must be > 0");
    if (m >= seq.size())
        throw IndexError("modulus " + std::to_string(m) + " leaves no tail in a prefix of " +
                         std::to_string(seq.size()));
    for (std::size_t i = m + 1; i <= seq.size(); ++i) {
        const double d = point_set_distance(x, seq.set(i), seq.metric());
        if (!(d < epsilon)) throw HypothesisViolatedError(i, d, epsilon);
    }
    const double dist = point_set_distance(x, limit.points, seq.metric());
    const double bound = epsilon + limit.epsilon + tol;
    return {dist, bound, dist <= bound};
}

/// Constructive chain of points z_i drawn from a subsequence A_{n_i}, with
/// geometrically shrinking links; its end point approximates a limit point
/// near x.
struct WitnessChain {
    double base;                     ///< link budget shrinks by 1/base each level
    double epsilon;
    std::vector<std::size_t> indices; ///< n_1 < n_2 < ... (1-based)
    std::vector<Point> points;        ///< z_i, one per index, z_i in A_{n_i}
    Point limit_estimate;             ///< final chain point
    double first_link;                ///< rho(x, z_1), < epsilon
    std::vector<double> gaps;         ///< rho(z_i, z_{i+1}), < epsilon / base^i
    double total_gap;                 ///< sum of gaps, <= epsilon / (base - 1)
    double distance_to_estimate;      ///< rho(x, limit_estimate), < epsilon (base+1)/(base-1)
};

/// Builds the chain exactly as the existence argument prescribes: n_i is the
/// smallest index after n_{i-1} whose set sits within epsilon / base^i of
/// every later set in the prefix (at least one later index must exist; a
/// vacuous certificate is not accepted), z_1 is the nearest point to x in
/// A_{n_1}, and each z_{i+1} is the nearest point to z_i in A_{n_{i+1}}.
/// That choice makes every link bound hold automatically.
///
/// With links == 0 the chain extends as deep as the prefix supports; a
/// positive links value demands that many links and throws
/// PrefixExhaustedError(level) when the truncation cannot deliver them.
inline WitnessChain witness_chain(const SetSequence& seq, const Point& x, double epsilon,
                                  std::size_t m, double base = 2.0, std::size_t links = 0) {
    if (!(epsilon > 0.0)) throw Error("epsilon must be > 0");
    if (!(base > 1.0)) throw Error("base must be > 1");
    if (m >= seq.size())
        throw IndexError("modulus " + std::to_string(m) + " leaves no tail in a prefix of " +
                         std::to_string(seq.size()));
    const std::size_t n = seq.size();
    for (std::size_t i = m + 1; i <= n; ++i) {
        const double d = point_set_distance(x, seq.set(i), seq.metric());
        if (!(d < epsilon)) throw HypothesisViolatedError(i, d, epsilon);
    }

    // worst[k] = max over j in (k, N] of u(A_k, A_j); the level-i certificate
    // for index k is simply worst[k] < epsilon / base^i.
    std::vector<double> worst(n, 0.0);  // 1-based in [1, N-1]
    for (std::size_t k = 1; k < n; ++k) {
        double w = 0.0;
        for (std::size_t j = k + 1; j <= n; ++j)
            w = std::max(w, directed_distance(seq.set(k), seq.set(j), seq.metric()));
        worst[k] = w;
    }

    WitnessChain chain;
    chain.base = base;
    chain.epsilon = epsilon;
    std::size_t prev = m;
    Point anchor = x;
    for (std::size_t level = 1;; ++level) {
        const double threshold = epsilon / std::pow(base, static_cast<double>(level));
        std::size_t next = 0;
        for (std::size_t k = prev + 1; k + 1 <= n; ++k) {  // k <= N-1: certificate non-vacuous
            if (worst[k] < threshold) {
                next = k;
                break;
            }
        }
        if (next == 0) {
            if (links == 0 && level > 1) break;          // natural end of the truncation
            throw PrefixExhaustedError(level);
        }
        auto [z, gap] = nearest_point(anchor, seq.set(next), seq.metric());
        chain.indices.push_back(next);
        chain.points.push_back(z);
        if (level == 1) chain.first_link = gap;
        else chain.gaps.push_back(gap);
        anchor = z;
        prev = next;
        if (links != 0 && chain.indices.size() == links) break;
    }

    chain.limit_estimate = chain.points.back();
    chain.total_gap = 0.0;
    for (double g : chain.gaps) chain.total_gap += g;
    chain.distance_to_estimate = seq.metric()(x, chain.limit_estimate);
    return chain;
}

/// One row per sequence index: how far the extracted limit is from A_n in
/// both directions. Suitable for plotting decay.
struct ConvergenceRow {
    std::size_t n;
    double u_limit_to_set;  ///< u(limit, A_n)
    double u_set_to_limit;  ///< u(A_n, limit)
    double rho_h;
};

inline std::vector<ConvergenceRow> convergence_trace(const SetSequence& seq,
                                                     const PointSet& limit_points) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(seq.size());
    for (std::size_t n = 1; n <= seq.size(); ++n) {
        const DistanceBreakdown b = hausdorff_distance(limit_points, seq.set(n), seq.metric());
        rows.push_back({n, b.u_ab, b.u_ba, b.rho_h});
    }
    return rows;
}

inline std::vector<ConvergenceRow> convergence_trace(const SetSequence& seq,
                                                     const LimitApprox& limit) {
    return convergence_trace(seq, limit.points);
}

/// Side-by-side evaluation of the three limit characterizations on one
/// candidate set.
struct AgreementRecord {
    std::vector<Point> limit_points;
    std::vector<Point> lower_points;
    std::vector<Point> upper_points;
    std::optional<double> d_limit_lower;
    std::optional<double> d_limit_upper;
    std::optional<double> d_lower_upper;
    bool agree;              ///< all three non-empty and pairwise within 2 * epsilon
    bool upper_tracks_intersection;  ///< upper limit within 2 * epsilon of the tail intersection
    double epsilon;
};

/// Runs the tail-intersection evaluator and both set limits on the same
/// candidate pool (the union of all member sets plus `candidates`) and
/// reports the pairwise distances between the three results. The upper
/// limit / tail-intersection comparison is meaningful for any sequence,
/// convergent or not; the lower limit may legitimately come out empty.
inline AgreementRecord characterization_agreement(const SetSequence& seq, double epsilon,
                                                  const PointSet& candidates,
                                                  double tail_fraction = 0.5,
                                                  double subseq_fraction = 0.2) {
    std::vector<Point> pool_pts = detail::candidate_pool(seq, &candidates);
    const PointSet pool(pool_pts);

    AgreementRecord rec;
    rec.epsilon = epsilon;
    const LimitApprox lim = limit_set(seq, epsilon, pool, tail_fraction);
    rec.limit_points.assign(lim.points.begin(), lim.points.end());
    rec.lower_points = detail::lower_limit_points(seq, epsilon, pool, tail_fraction);
    rec.upper_points =
        detail::upper_limit_points(seq, epsilon, pool, tail_fraction, subseq_fraction);

    const auto pairwise = [&](const std::vector<Point>& a,
                              const std::vector<Point>& b) -> std::optional<double> {
        if (a.empty() || b.empty()) return std::nullopt;
        return hausdorff_distance(PointSet(a), PointSet(b), seq.metric()).rho_h;
    };
    rec.d_limit_lower = pairwise(rec.limit_points, rec.lower_points);
    rec.d_limit_upper = pairwise(rec.limit_points, rec.upper_points);
    rec.d_lower_upper = pairwise(rec.lower_points, rec.upper_points);

    const double budget = 2.0 * epsilon;
    rec.agree = rec.d_limit_lower && rec.d_limit_upper && rec.d_lower_upper &&
                *rec.d_limit_lower <= budget && *rec.d_limit_upper <= budget &&
                *rec.d_lower_upper <= budget;
    rec.upper_tracks_intersection = rec.d_limit_upper && *rec.d_limit_upper <= budget;
    return rec;
}

}  // namespace hspace

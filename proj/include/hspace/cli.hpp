#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hspace/errors.hpp"
#include "hspace/hausdorff.hpp"
#include "hspace/ifs.hpp"
#include "hspace/io.hpp"
#include "hspace/metric.hpp"
#include "hspace/sequence.hpp"

namespace hspace {

namespace cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kMaxGridPoints = 2'000'000;

/// Regular lattice with spacing `step` covering the bounding box of every
/// member set, inflated by one step on each side. Makes cluster points that
/// never occur in any member set discoverable.
inline PointSet candidate_grid(const SetSequence& seq, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
    const std::size_t d = seq.dim();
    std::vector<double> lo = seq.set(1)[0].coords();
    std::vector<double> hi = lo;
    for (const PointSet& s : seq.sets())
        for (const Point& p : s)
            for (std::size_t k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], p[k]);
                hi[k] = std::max(hi[k], p[k]);
            }
    std::vector<std::size_t> counts(d);
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
        const double start = lo[k] - step;
        const double stop = hi[k] + step;
        counts[k] = static_cast<std::size_t>(std::floor((stop - start) / step)) + 1;
        if (counts[k] == 0 || total > kMaxGridPoints / counts[k])
            throw std::invalid_argument("grid step too small: lattice exceeds " +
                                        std::to_string(kMaxGridPoints) + " points");
        total *= counts[k];
    }
    std::vector<Point> pts;
    pts.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    while (true) {
        std::vector<double> c(d);
        for (std::size_t k = 0; k < d; ++k)
            c[k] = (lo[k] - step) + static_cast<double>(idx[k]) * step;
        pts.emplace_back(std::move(c));
        std::size_t k = 0;
        while (k < d && ++idx[k] == counts[k]) idx[k++] = 0;
        if (k == d) break;
    }
    return PointSet(std::move(pts));
}

namespace detail {

inline Point parse_point_arg(const std::string& text) {
    std::vector<double> coords;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string field =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v;
        if (!hspace::detail::parse_double(field, v))
            throw std::invalid_argument("cannot parse point coordinate '" + field + "'");
        coords.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return Point(std::move(coords));
}

// Extra candidates requested through --grid / --candidates, if any.
inline std::optional<PointSet> gather_extras(const SetSequence& seq, double grid_step,
                                             const std::string& candidates_file) {
    std::vector<Point> pts;
    if (!candidates_file.empty()) {
        const PointSet file_pts = load_cloud(candidates_file, seq.dim());
        pts.insert(pts.end(), file_pts.begin(), file_pts.end());
    }
    if (grid_step > 0.0) {
        const PointSet grid = candidate_grid(seq, grid_step);
        pts.insert(pts.end(), grid.begin(), grid.end());
    }
    if (pts.empty()) return std::nullopt;
    return PointSet(std::move(pts));
}

// Full candidate pool: union of all member sets plus the extras.
inline PointSet full_pool(const SetSequence& seq, const std::optional<PointSet>& extras) {
    return PointSet(hspace::detail::candidate_pool(seq, extras ? &*extras : nullptr));
}

inline json breakdown_json(const DistanceBreakdown& b) {
    json j;
    j["u_ab"] = b.u_ab;
    j["u_ba"] = b.u_ba;
    j["rho_h"] = b.rho_h;
    j["witness_ab"] = point_json(b.witness_ab);
    j["witness_ba"] = point_json(b.witness_ba);
    return j;
}

inline json trace_json(const std::vector<ConvergenceRow>& rows) {
    json arr = json::array();
    for (const ConvergenceRow& r : rows) {
        json row;
        row["n"] = r.n;
        row["u_limit_to_set"] = r.u_limit_to_set;
        row["u_set_to_limit"] = r.u_set_to_limit;
        row["rho_h"] = r.rho_h;
        arr.push_back(std::move(row));
    }
    return arr;
}

inline json chain_json(const WitnessChain& c) {
    json j;
    j["base"] = c.base;
    j["epsilon"] = c.epsilon;
    j["indices"] = c.indices;
    j["points"] = points_json(c.points);
    j["first_link"] = c.first_link;
    j["gaps"] = c.gaps;
    j["total_gap"] = c.total_gap;
    j["gap_budget"] = c.epsilon / (c.base - 1.0);
    j["limit_estimate"] = point_json(c.limit_estimate);
    j["distance_to_estimate"] = c.distance_to_estimate;
    j["estimate_bound"] = c.epsilon * (c.base + 1.0) / (c.base - 1.0);
    return j;
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace detail

/// Dispatches one CLI invocation. `args` excludes the program name. Writes a
/// JSON report to `out`; diagnostics go to `err`. Exit codes: 0 success,
/// 1 usage error, 2 data/parse error, 3 analysis error.
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"Set distances, set-sequence limits, and attractor iteration "
                 "over finite point clouds"};
    app.require_subcommand(1);

    // dist
    std::string dist_a, dist_b, dist_metric = "euclidean";
    bool dist_oracle = false;
    auto* dist = app.add_subcommand("dist", "Hausdorff distance between two clouds");
    dist->add_option("A", dist_a, "first cloud (CSV)")->required();
    dist->add_option("B", dist_b, "second cloud (CSV)")->required();
    dist->add_option("--metric", dist_metric, "euclidean|manhattan|chebyshev")
        ->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));
    dist->add_flag("--oracle", dist_oracle, "use the unconditional full-scan reference");

    // shared manifest-command options
    struct SeqOpts {
        std::string manifest;
        std::string metric = "euclidean";
        double epsilon = 0.0;
        double grid_step = 0.0;
        std::string candidates;
    };
    auto add_seq_opts = [](CLI::App* cmd, SeqOpts& o, bool with_candidates) {
        cmd->add_option("manifest", o.manifest, "sequence manifest (JSON)")->required();
        cmd->add_option("--epsilon", o.epsilon, "tolerance")->required();
        cmd->add_option("--metric", o.metric, "euclidean|manhattan|chebyshev")
            ->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));
        if (with_candidates) {
            cmd->add_option("--grid", o.grid_step, "candidate lattice spacing");
            cmd->add_option("--candidates", o.candidates, "extra candidate cloud (CSV)");
        }
    };

    SeqOpts cauchy_o;
    auto* cauchy_cmd = app.add_subcommand("cauchy", "Cauchy check over the sequence prefix");
    add_seq_opts(cauchy_cmd, cauchy_o, false);

    SeqOpts limit_o, liminf_o, limsup_o, agree_o;
    auto* limit_cmd = app.add_subcommand("limit", "extract the limit set");
    add_seq_opts(limit_cmd, limit_o, true);
    auto* liminf_cmd = app.add_subcommand("liminf", "lower set limit");
    add_seq_opts(liminf_cmd, liminf_o, true);
    auto* limsup_cmd = app.add_subcommand("limsup", "upper set limit");
    add_seq_opts(limsup_cmd, limsup_o, true);
    auto* agree_cmd = app.add_subcommand("agree", "compare the three limit characterizations");
    add_seq_opts(agree_cmd, agree_o, true);

    SeqOpts lemma_o;
    std::string lemma_x, lemma_limit_csv;
    std::size_t lemma_m = 0, lemma_links = 0;
    double lemma_b = 2.0, lemma_tol = 1e-9, lemma_limit_eps = -1.0;
    bool lemma_chain = false;
    auto* lemma_cmd =
        app.add_subcommand("lemma", "check that a uniformly tail-close point is near the limit");
    add_seq_opts(lemma_cmd, lemma_o, true);
    lemma_cmd->add_option("--x", lemma_x, "query point, comma-separated coordinates")->required();
    lemma_cmd->add_option("--m", lemma_m, "modulus: hypothesis holds for indices > m");
    lemma_cmd->add_option("--b", lemma_b, "witness-chain shrink base (> 1)");
    lemma_cmd->add_flag("--chain", lemma_chain, "also build and print the witness chain");
    lemma_cmd->add_option("--links", lemma_links, "demand this many chain links (0 = auto)");
    lemma_cmd->add_option("--tol", lemma_tol, "floating-point allowance for the verdict");
    lemma_cmd->add_option("--limit-epsilon", lemma_limit_eps,
                          "extraction tolerance for the limit (default: epsilon)");
    lemma_cmd->add_option("--limit-csv", lemma_limit_csv,
                          "use these points as the limit instead of extracting one");

    // ifs
    std::string ifs_system, ifs_seed, ifs_out, ifs_trace, ifs_metric = "euclidean";
    std::size_t ifs_iters = 0, ifs_budget = 0;
    auto* ifs_cmd = app.add_subcommand("ifs", "iterate a contractive system to its attractor");
    ifs_cmd->add_option("system", ifs_system, "system definition (JSON)")->required();
    ifs_cmd->add_option("--seed", ifs_seed, "seed cloud (CSV)")->required();
    ifs_cmd->add_option("--iters", ifs_iters, "iteration count")->required();
    ifs_cmd->add_option("--budget", ifs_budget, "max points per iterate")->required();
    ifs_cmd->add_option("--out", ifs_out, "write the final iterate here (CSV)");
    ifs_cmd->add_option("--trace", ifs_trace, "write the decay table here (CSV)");
    ifs_cmd->add_option("--metric", ifs_metric, "euclidean|manhattan|chebyshev")
        ->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));

    std::vector<const char*> argv;
    argv.push_back("hspace");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*dist) {
            const MetricSpec m = MetricSpec::from_name(dist_metric);
            const PointSet a = load_cloud(dist_a);
            const PointSet b = load_cloud(dist_b);
            const DistanceBreakdown br =
                dist_oracle ? hausdorff_distance_oracle(a, b, m) : hausdorff_distance(a, b, m);
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = "dist";
            j["metric"] = dist_metric;
            j["oracle"] = dist_oracle;
            j.update(detail::breakdown_json(br));
            detail::emit(out, j);
        } else if (*cauchy_cmd) {
            const MetricSpec m = MetricSpec::from_name(cauchy_o.metric);
            const SetSequence seq = load_sequence(cauchy_o.manifest, m);
            const CauchyReport rep = is_cauchy(seq, cauchy_o.epsilon);
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = "cauchy";
            j["metric"] = cauchy_o.metric;
            j["epsilon"] = rep.epsilon;
            j["is_cauchy"] = rep.is_cauchy;
            j["modulus"] = rep.modulus ? json(*rep.modulus) : json(nullptr);
            j["tail_sup"] = rep.tail_sup;
            detail::emit(out, j);
        } else if (*limit_cmd) {
            const MetricSpec m = MetricSpec::from_name(limit_o.metric);
            const SetSequence seq = load_sequence(limit_o.manifest, m);
            const auto extras = detail::gather_extras(seq, limit_o.grid_step, limit_o.candidates);
            const LimitApprox lim = limit_set(seq, limit_o.epsilon, extras);
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = "limit";
            j["metric"] = limit_o.metric;
            j["epsilon"] = lim.epsilon;
            j["cauchy_at_epsilon"] = lim.cauchy_at_epsilon;
            j["candidates_examined"] = lim.candidates_examined;
            j["points"] = points_json(lim.points);
            j["trace"] = detail::trace_json(convergence_trace(seq, lim));
            detail::emit(out, j);
        } else if (*liminf_cmd || *limsup_cmd) {
            const SeqOpts& o = *liminf_cmd ? liminf_o : limsup_o;
            const MetricSpec m = MetricSpec::from_name(o.metric);
            const SetSequence seq = load_sequence(o.manifest, m);
            const auto extras = detail::gather_extras(seq, o.grid_step, o.candidates);
            const PointSet pool = detail::full_pool(seq, extras);
            const PointSet result = *liminf_cmd ? liminf_set(seq, o.epsilon, pool)
                                                : limsup_set(seq, o.epsilon, pool);
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = *liminf_cmd ? "liminf" : "limsup";
            j["metric"] = o.metric;
            j["epsilon"] = o.epsilon;
            j["candidates_examined"] = pool.size();
            j["points"] = points_json(result);
            j["trace"] = detail::trace_json(convergence_trace(seq, result));
            detail::emit(out, j);
        } else if (*agree_cmd) {
            const MetricSpec m = MetricSpec::from_name(agree_o.metric);
            const SetSequence seq = load_sequence(agree_o.manifest, m);
            const auto extras = detail::gather_extras(seq, agree_o.grid_step, agree_o.candidates);
            const AgreementRecord rec =
                characterization_agreement(seq, agree_o.epsilon, detail::full_pool(seq, extras));
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = "agree";
            j["metric"] = agree_o.metric;
            j["epsilon"] = rec.epsilon;
            j["limit_points"] = points_json(rec.limit_points);
            j["liminf_points"] = points_json(rec.lower_points);
            j["limsup_points"] = points_json(rec.upper_points);
            auto opt = [](const std::optional<double>& v) {
                return v ? json(*v) : json(nullptr);
            };
            j["d_limit_liminf"] = opt(rec.d_limit_lower);
            j["d_limit_limsup"] = opt(rec.d_limit_upper);
            j["d_liminf_limsup"] = opt(rec.d_lower_upper);
            j["agree"] = rec.agree;
            j["upper_tracks_intersection"] = rec.upper_tracks_intersection;
            detail::emit(out, j);
        } else if (*lemma_cmd) {
            const MetricSpec m = MetricSpec::from_name(lemma_o.metric);
            const SetSequence seq = load_sequence(lemma_o.manifest, m);
            const Point x = detail::parse_point_arg(lemma_x);
            LimitApprox lim = [&] {
                if (!lemma_limit_csv.empty()) {
                    PointSet pts = load_cloud(lemma_limit_csv, seq.dim());
                    const double eps = lemma_limit_eps >= 0.0 ? lemma_limit_eps : 0.0;
                    const std::size_t examined = pts.size();
                    return LimitApprox{std::move(pts), eps, examined, true};
                }
                const auto extras =
                    detail::gather_extras(seq, lemma_o.grid_step, lemma_o.candidates);
                const double eps = lemma_limit_eps >= 0.0 ? lemma_limit_eps : lemma_o.epsilon;
                return limit_set(seq, eps, extras);
            }();
            const ProximityVerdict v =
                limit_proximity_check(seq, x, lemma_o.epsilon, lemma_m, lim, lemma_tol);
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = "lemma";
            j["metric"] = lemma_o.metric;
            j["epsilon"] = lemma_o.epsilon;
            j["m"] = lemma_m;
            j["x"] = point_json(x);
            j["limit_epsilon"] = lim.epsilon;
            j["limit_points"] = points_json(lim.points);
            j["distance"] = v.distance;
            j["bound"] = v.bound;
            j["verdict"] = v.holds;
            if (lemma_chain) {
                const WitnessChain c =
                    witness_chain(seq, x, lemma_o.epsilon, lemma_m, lemma_b, lemma_links);
                j["chain"] = detail::chain_json(c);
            }
            detail::emit(out, j);
        } else if (*ifs_cmd) {
            const MetricSpec m = MetricSpec::from_name(ifs_metric);
            const Ifs sys = load_ifs(ifs_system);
            const PointSet seed = load_cloud(ifs_seed, sys.dim());
            const AttractorTrace trace = attractor(sys, seed, ifs_iters, ifs_budget, m);
            if (!ifs_out.empty()) save_cloud(ifs_out, trace.final_set());
            if (!ifs_trace.empty()) {
                std::ofstream tf(ifs_trace);
                if (!tf) throw Error("cannot write " + ifs_trace);
                tf << "step,size,gap,delta\n";
                for (const AttractorStep& s : trace.steps)
                    tf << s.step << ',' << s.size << ','
                       << hspace::detail::format_double(s.gap) << ','
                       << hspace::detail::format_double(s.delta) << '\n';
            }
            json j;
            j["schema"] = kSchemaVersion;
            j["command"] = "ifs";
            j["metric"] = ifs_metric;
            j["contraction"] = sys.contraction();
            j["iters"] = ifs_iters;
            j["budget"] = ifs_budget;
            j["final_size"] = trace.final_set().size();
            json steps = json::array();
            for (const AttractorStep& s : trace.steps) {
                json row;
                row["step"] = s.step;
                row["size"] = s.size;
                row["gap"] = s.gap;
                row["delta"] = s.delta;
                steps.push_back(std::move(row));
            }
            j["steps"] = std::move(steps);
            j["out"] = ifs_out.empty() ? json(nullptr) : json(ifs_out);
            j["trace"] = ifs_trace.empty() ? json(nullptr) : json(ifs_trace);
            detail::emit(out, j);
        }
        return 0;
    } catch (const EmptyLimitError& e) {
        err << "analysis error: " << e.what() << '\n';
        return 3;
    } catch (const HypothesisViolatedError& e) {
        err << "analysis error: " << e.what() << '\n';
        return 3;
    } catch (const NotContractiveError& e) {
        err << "analysis error: " << e.what() << '\n';
        return 3;
    } catch (const PrefixExhaustedError& e) {
        err << "analysis error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace cli
}  // namespace hspace

#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hspace/errors.hpp"
#include "hspace/ifs.hpp"
#include "hspace/metric.hpp"
#include "hspace/sequence.hpp"

namespace hspace {

namespace detail {

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace detail

/// Parses a CSV point cloud: one point per row, comma-separated float
/// columns, '#'-prefixed comment/header lines skipped. Blank lines are only
/// tolerated at the end of the file. With expect_dim > 0 the parsed
/// dimension must match.
inline PointSet load_cloud(const std::filesystem::path& path, std::size_t expect_dim = 0) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());

    std::vector<Point> pts;
    std::size_t columns = 0;
    std::size_t pending_blank = 0;  // line number of the first unresolved blank line
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv(line);
        std::size_t i = 0;
        while (i < sv.size() && (sv[i] == ' ' || sv[i] == '\t')) ++i;
        if (i == sv.size()) {
            if (pending_blank == 0) pending_blank = lineno;
            continue;
        }
        if (pending_blank != 0) throw ParseError(pending_blank, "blank line inside the cloud");
        if (sv[i] == '#') continue;

        std::vector<double> coords;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = sv.find(',', start);
            const std::string_view field =
                sv.substr(start, comma == std::string_view::npos ? sv.size() - start
                                                                 : comma - start);
            double v;
            if (!detail::parse_double(field, v))
                throw ParseError(lineno, "cannot parse '" + std::string(field) + "' as a number");
            coords.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (columns == 0) columns = coords.size();
        else if (coords.size() != columns)
            throw RaggedRowError(lineno, coords.size(), columns);
        pts.emplace_back(std::move(coords));
    }
    if (pts.empty()) throw EmptyCloudError("no data rows in " + path.string());
    if (expect_dim != 0 && columns != expect_dim)
        throw DimensionError(path.string() + ": dimension " + std::to_string(columns) +
                             ", expected " + std::to_string(expect_dim));
    return PointSet(std::move(pts));
}

/// Writes a point cloud as CSV with full round-trip precision.
inline void save_cloud(const std::filesystem::path& path, const PointSet& set) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const Point& p : set) {
        for (std::size_t i = 0; i < p.dim(); ++i) {
            if (i) out << ',';
            out << detail::format_double(p[i]);
        }
        out << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

struct ManifestEntry {
    std::size_t index;
    std::filesystem::path path;
};

/// Ordered list of cloud files forming a sequence; paths resolve relative to
/// the manifest's own directory.
struct Manifest {
    std::size_t dim = 0;
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;
};

inline Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    Manifest man;
    man.base_dir = path.parent_path();
    try {
        man.dim = j.at("dim").get<std::size_t>();
        for (const auto& e : j.at("entries")) {
            man.entries.push_back(
                {e.at("index").get<std::size_t>(), e.at("path").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (man.dim == 0) throw FormatError(path.string() + ": dim must be >= 1");
    if (man.entries.empty()) throw FormatError(path.string() + ": no entries");
    for (std::size_t i = 0; i < man.entries.size(); ++i)
        if (man.entries[i].index != i + 1)
            throw FormatError(path.string() + ": entry " + std::to_string(i) +
                              " has index " + std::to_string(man.entries[i].index) +
                              ", expected contiguous indices from 1");
    return man;
}

/// Loads every referenced cloud and assembles the sequence.
inline SetSequence load_sequence(const Manifest& man, const MetricSpec& metric) {
    std::vector<PointSet> sets;
    sets.reserve(man.entries.size());
    for (const ManifestEntry& e : man.entries) {
        const auto file = e.path.is_absolute() ? e.path : man.base_dir / e.path;
        sets.push_back(load_cloud(file, man.dim));
    }
    return SetSequence(std::move(sets), metric);
}

inline SetSequence load_sequence(const std::filesystem::path& manifest_path,
                                 const MetricSpec& metric) {
    return load_sequence(load_manifest(manifest_path), metric);
}

/// Parses a system definition: {"dim": d, "maps": [{"linear": [d*d floats,
/// row-major], "offset": [d floats]}, ...]}. Rejected when any block does not
/// match dim.
inline Ifs load_ifs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    std::vector<AffineMap> maps;
    try {
        const auto d = j.at("dim").get<std::size_t>();
        if (d == 0) throw FormatError(path.string() + ": dim must be >= 1");
        for (const auto& m : j.at("maps")) {
            auto linear = m.at("linear").get<std::vector<double>>();
            auto offset = m.at("offset").get<std::vector<double>>();
            if (linear.size() != d * d)
                throw FormatError(path.string() + ": linear block has " +
                                  std::to_string(linear.size()) + " entries, expected " +
                                  std::to_string(d * d));
            if (offset.size() != d)
                throw FormatError(path.string() + ": offset has " +
                                  std::to_string(offset.size()) + " entries, expected " +
                                  std::to_string(d));
            maps.emplace_back(std::move(linear), std::move(offset));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (maps.empty()) throw FormatError(path.string() + ": no maps");
    return Ifs(std::move(maps));
}

// ---- JSON report fragments ----

inline nlohmann::ordered_json point_json(const Point& p) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < p.dim(); ++i) arr.push_back(p[i]);
    return arr;
}

inline nlohmann::ordered_json points_json(const std::vector<Point>& pts) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Point& p : pts) arr.push_back(point_json(p));
    return arr;
}

inline nlohmann::ordered_json points_json(const PointSet& set) {
    return points_json(set.points());
}

}  // namespace hspace

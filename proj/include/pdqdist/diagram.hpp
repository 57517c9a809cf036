#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdqdist/errors.hpp"

namespace pdq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One topological feature: the scale where it appears and the scale where it
/// disappears. Always death >= birth, both finite.
struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;

    double persistence() const { return death - birth; }

    friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

/// A finite multiset of birth-death points. Duplicates are meaningful and are
/// matched independently. Empty diagrams are valid.
struct PersistenceDiagram {
    std::vector<DiagramPoint> points;
    std::string label;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

inline void validate_point(const DiagramPoint& pt, long line = -1) {
    const std::string at = line >= 0 ? " (line " + std::to_string(line) + ")" : "";
    if (!std::isfinite(pt.birth) || !std::isfinite(pt.death))
        throw validation_error("non-finite diagram coordinate" + at);
    if (pt.death < pt.birth)
        throw validation_error("death " + std::to_string(pt.death) + " < birth " +
                               std::to_string(pt.birth) + at);
}

/// Nearest point on the line birth = death: (b, d) -> ((b+d)/2, (b+d)/2).
inline DiagramPoint diagonal_projection(const DiagramPoint& pt) {
    const double mid = 0.5 * (pt.birth + pt.death);
    return {mid, mid};
}

/// L_q norm of a - b for q >= 1; q = infinity selects the sup norm.
inline double lq_distance(const DiagramPoint& a, const DiagramPoint& b, double q) {
    if (!(q >= 1.0))
        throw parameter_error("norm order q must be >= 1 or infinity");
    const double db = std::abs(a.birth - b.birth);
    const double dd = std::abs(a.death - b.death);
    if (std::isinf(q)) return std::max(db, dd);
    if (q == 1.0) return db + dd;
    if (q == 2.0) return std::hypot(db, dd);
    return std::pow(std::pow(db, q) + std::pow(dd, q), 1.0 / q);
}

enum class DiagramFormat { csv, json };

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, long line) {
    const std::string t = trim(field);
    if (t.empty()) throw parse_error("empty numeric field", line);
    const char* begin = t.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + t.size())
        throw parse_error("malformed number '" + t + "'", line);
    return v;
}

} // namespace detail

/// CSV reader: one "birth,death" pair per line, '.' decimal separator.
/// A leading "birth,death" header and blank lines are skipped.
inline PersistenceDiagram read_diagram_csv(std::istream& in, std::string label = {}) {
    PersistenceDiagram dg;
    dg.label = std::move(label);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (lineno == 1 && t == "birth,death") continue;
        const auto comma = t.find(',');
        if (comma == std::string::npos)
            throw parse_error("expected 'birth,death'", lineno);
        if (t.find(',', comma + 1) != std::string::npos)
            throw parse_error("too many fields", lineno);
        DiagramPoint pt{detail::parse_double(t.substr(0, comma), lineno),
                        detail::parse_double(t.substr(comma + 1), lineno)};
        validate_point(pt, lineno);
        dg.points.push_back(pt);
    }
    return dg;
}

/// JSON reader for {"label": ..., "points": [[b, d], ...]}.
inline PersistenceDiagram read_diagram_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(e.what());
    }
    if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
        throw parse_error("expected an object with a 'points' array");
    PersistenceDiagram dg;
    if (doc.contains("label")) dg.label = doc["label"].get<std::string>();
    long index = 0;
    for (const auto& entry : doc["points"]) {
        ++index;
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
            throw parse_error("point " + std::to_string(index) + " is not a [birth, death] pair");
        DiagramPoint pt{entry[0].get<double>(), entry[1].get<double>()};
        validate_point(pt);
        dg.points.push_back(pt);
    }
    return dg;
}

inline PersistenceDiagram load_diagram(std::istream& in, DiagramFormat format,
                                       std::string label = {}) {
    switch (format) {
    case DiagramFormat::csv: return read_diagram_csv(in, std::move(label));
    case DiagramFormat::json: return read_diagram_json(in);
    }
    throw parameter_error("unknown diagram format");
}

inline void write_diagram_csv(std::ostream& out, const PersistenceDiagram& dg) {
    out << "birth,death\n";
    char buf[64];
    for (const auto& pt : dg.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", pt.birth, pt.death);
        out << buf;
    }
}

inline nlohmann::ordered_json diagram_to_json(const PersistenceDiagram& dg) {
    nlohmann::ordered_json doc;
    doc["label"] = dg.label;
    auto& pts = doc["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : dg.points) pts.push_back({pt.birth, pt.death});
    return doc;
}

} // namespace pdq

#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdqdist/diagram.hpp"
#include "pdqdist/errors.hpp"

namespace pdq {

enum class VariantTag { wasserstein, dcp };

/// Which distance is being computed, with its parameters. q = kInf selects
/// the sup norm; c is the fixed penalty and is meaningful for dcp only.
struct Variant {
    VariantTag tag = VariantTag::wasserstein;
    double p = 2.0;
    double q = kInf;
    double c = 0.0;

    static Variant wasserstein(double p = 2.0, double q = kInf) {
        return {VariantTag::wasserstein, p, q, 0.0};
    }
    static Variant dcp(double c, double p = 2.0, double q = kInf) {
        return {VariantTag::dcp, p, q, c};
    }
};

enum class EdgeKind { main, aux_x, aux_y };

/// One edge of the matching graph together with its qubit slot. Main edges
/// join a point of D1 to a point of D2; aux edges join a point to its proxy
/// vertex (diagonal projection for the Wasserstein graph, penalty vertex for
/// the dcp graph).
struct Edge {
    EdgeKind kind;
    int i = -1; // D1 point index (main, aux_x)
    int j = -1; // D2 point index (main, aux_y)
    double weight = 0.0;
    int bit_index = 0;
};

using BasisState = std::uint64_t;

enum class FeasibilityMode { strict, relaxed };

/// The weighted matching graph with a fixed qubit layout. Bit k of a basis
/// state holds the negated indicator of edge k: bit value 0 means the edge is
/// present in the matching. Layout: main edges row-major at bit i*m + j, then
/// (Wasserstein only) aux_x at n*m + i, then aux_y.
struct MatchingGraph {
    Variant variant;
    std::size_t n = 0; // |D1| after any swap
    std::size_t m = 0; // |D2| after any swap
    bool swapped = false;
    int num_qubits = 0;
    std::vector<Edge> edges; // stored ascending by bit_index
    PersistenceDiagram d1;   // post-swap copies; coordinates behind the weights
    PersistenceDiagram d2;

    int main_bit(std::size_t i, std::size_t j) const { return static_cast<int>(i * m + j); }
    int aux_x_bit(std::size_t i) const { return static_cast<int>(n * m + i); }
    int aux_y_bit(std::size_t j) const {
        return static_cast<int>(variant.tag == VariantTag::wasserstein ? n * m + n + j : n * m + j);
    }

    BasisState row_main_mask(std::size_t i) const {
        return m == 0 ? 0 : ((BasisState{1} << m) - 1) << (i * m);
    }
    BasisState col_main_mask(std::size_t j) const {
        BasisState mask = 0;
        for (std::size_t i = 0; i < n; ++i) mask |= BasisState{1} << main_bit(i, j);
        return mask;
    }
    BasisState state_mask() const {
        return num_qubits == 64 ? ~BasisState{0} : (BasisState{1} << num_qubits) - 1;
    }
};

inline constexpr int kDefaultQubitCap = 24;

namespace detail {

inline void require_in_range(const MatchingGraph& g, BasisState s) {
    if (g.num_qubits < 64 && s >> g.num_qubits)
        throw parameter_error("basis state out of range for " + std::to_string(g.num_qubits) +
                              " qubits");
}

} // namespace detail

/// Builds the matching graph for the given variant. For dcp the inputs are
/// swapped internally when |d1| > |d2| so that n <= m always holds; the swap
/// is recorded in the result.
inline MatchingGraph build_graph(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                                 const Variant& variant, int qubit_cap = kDefaultQubitCap) {
    if (!(variant.p >= 1.0)) throw parameter_error("p must be >= 1");
    if (!(variant.q >= 1.0)) throw parameter_error("q must be >= 1 or infinity");
    if (variant.tag == VariantTag::dcp && !(variant.c > 0.0))
        throw parameter_error("dcp penalty c must be positive");
    for (const auto& pt : d1.points) validate_point(pt);
    for (const auto& pt : d2.points) validate_point(pt);

    MatchingGraph g;
    g.variant = variant;
    g.swapped = variant.tag == VariantTag::dcp && d1.size() > d2.size();
    g.d1 = g.swapped ? d2 : d1;
    g.d2 = g.swapped ? d1 : d2;
    g.n = g.d1.size();
    g.m = g.d2.size();

    const std::size_t qubits = variant.tag == VariantTag::wasserstein
                                   ? g.n * g.m + g.n + g.m
                                   : g.n * g.m + g.m;
    if (qubits > static_cast<std::size_t>(qubit_cap) || qubits > 63)
        throw capacity_error("graph needs " + std::to_string(qubits) + " qubits, cap is " +
                             std::to_string(qubit_cap));
    g.num_qubits = static_cast<int>(qubits);

    const double p = variant.p, q = variant.q;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.m; ++j)
            g.edges.push_back({EdgeKind::main, static_cast<int>(i), static_cast<int>(j),
                               std::pow(lq_distance(g.d1.points[i], g.d2.points[j], q), p),
                               g.main_bit(i, j)});
    if (variant.tag == VariantTag::wasserstein) {
        for (std::size_t i = 0; i < g.n; ++i) {
            const auto& x = g.d1.points[i];
            g.edges.push_back({EdgeKind::aux_x, static_cast<int>(i), -1,
                               std::pow(lq_distance(x, diagonal_projection(x), q), p),
                               g.aux_x_bit(i)});
        }
        for (std::size_t j = 0; j < g.m; ++j) {
            const auto& y = g.d2.points[j];
            g.edges.push_back({EdgeKind::aux_y, -1, static_cast<int>(j),
                               std::pow(lq_distance(diagonal_projection(y), y, q), p),
                               g.aux_y_bit(j)});
        }
    } else {
        for (std::size_t j = 0; j < g.m; ++j)
            g.edges.push_back({EdgeKind::aux_y, -1, static_cast<int>(j), std::pow(variant.c, p),
                               g.aux_y_bit(j)});
    }
    return g;
}

/// Cost of the matching a basis state encodes: the weight sum over present
/// edges (bit value 0).
inline double state_cost(const MatchingGraph& g, BasisState s) {
    detail::require_in_range(g, s);
    double total = 0.0;
    for (const auto& e : g.edges)
        if (((s >> e.bit_index) & 1) == 0) total += e.weight;
    return total;
}

inline bool check_feasibility(const MatchingGraph& g, BasisState s, FeasibilityMode mode) {
    detail::require_in_range(g, s);
    const BasisState present = ~s & g.state_mask();
    const bool wasserstein = g.variant.tag == VariantTag::wasserstein;
    for (std::size_t i = 0; i < g.n; ++i) {
        const int mains = std::popcount(present & g.row_main_mask(i));
        const int aux = wasserstein ? static_cast<int>((present >> g.aux_x_bit(i)) & 1) : 0;
        if (mode == FeasibilityMode::strict) {
            if (wasserstein ? mains + aux != 1 : mains > 1) return false;
        } else {
            if (mains > 1) return false;
            if (wasserstein && mains + aux < 1) return false;
        }
    }
    for (std::size_t j = 0; j < g.m; ++j) {
        const int mains = std::popcount(present & g.col_main_mask(j));
        const int aux = static_cast<int>((present >> g.aux_y_bit(j)) & 1);
        if (mode == FeasibilityMode::strict) {
            if (mains + aux != 1) return false;
        } else {
            if (mains > 1 || mains + aux < 1) return false;
        }
    }
    return true;
}

/// How a basis state (or an exact solver result) reads as a matching, in the
/// orientation of the original inputs. "Unmatched" means matched to its
/// diagonal projection for the Wasserstein variant and penalized at cost c^p
/// (D2 side) or simply skipped (D1 side) for dcp.
struct MatchingDescription {
    std::vector<std::array<int, 2>> pairs; // (d1 index, d2 index)
    std::vector<int> d1_unmatched;
    std::vector<int> d2_unmatched;
    bool strict = false;
    bool relaxed = false;
    bool swapped = false;
};

inline nlohmann::ordered_json variant_to_json(const Variant& v) {
    nlohmann::ordered_json doc;
    doc["kind"] = v.tag == VariantTag::wasserstein ? "wasserstein" : "dcp";
    doc["p"] = v.p;
    if (std::isinf(v.q))
        doc["q"] = "inf";
    else
        doc["q"] = v.q;
    if (v.tag == VariantTag::dcp) doc["c"] = v.c;
    return doc;
}

inline nlohmann::ordered_json matching_to_json(const MatchingDescription& md) {
    nlohmann::ordered_json doc;
    auto& pairs = doc["pairs"] = nlohmann::ordered_json::array();
    for (const auto& pr : md.pairs) pairs.push_back({pr[0], pr[1]});
    doc["d1_unmatched"] = md.d1_unmatched;
    doc["d2_unmatched"] = md.d2_unmatched;
    doc["strict"] = md.strict;
    doc["relaxed"] = md.relaxed;
    doc["swapped"] = md.swapped;
    return doc;
}

inline nlohmann::ordered_json graph_to_json(const MatchingGraph& g) {
    nlohmann::ordered_json doc;
    doc["variant"] = variant_to_json(g.variant);
    doc["n"] = g.n;
    doc["m"] = g.m;
    doc["swapped"] = g.swapped;
    doc["num_qubits"] = g.num_qubits;
    auto& edges = doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        nlohmann::ordered_json entry;
        switch (e.kind) {
        case EdgeKind::main:
            entry["kind"] = "main";
            entry["endpoints"] = {e.i, e.j};
            break;
        case EdgeKind::aux_x:
            entry["kind"] = "aux_x";
            entry["endpoints"] = {e.i};
            break;
        case EdgeKind::aux_y:
            entry["kind"] = "aux_y";
            entry["endpoints"] = {e.j};
            break;
        }
        entry["weight"] = e.weight;
        entry["bit_index"] = e.bit_index;
        edges.push_back(std::move(entry));
    }
    return doc;
}

} // namespace pdq

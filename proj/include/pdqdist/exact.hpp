#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pdqdist/errors.hpp"
#include "pdqdist/matchgraph.hpp"

namespace pdq {

using CostMatrix = std::vector<std::vector<double>>;

/// Output of the rectangular assignment solver: every row paired with a
/// distinct column, pairs listed ascending by row.
struct Assignment {
    std::vector<std::array<int, 2>> pairs;
    double total_cost = 0.0;
};

namespace detail {

// Shortest-augmenting-path assignment with potentials, O(R^2 C), R <= C.
// Returns col_of_row; no tie-break guarantees.
inline std::vector<int> assign_min_cost(const CostMatrix& a) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
    for (int i = 1; i <= rows; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col_of_row(rows, -1);
    for (int j = 1; j <= cols; ++j)
        if (p[j] > 0) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

inline double assignment_total(const CostMatrix& a, const std::vector<int>& col_of_row) {
    double total = 0.0;
    for (std::size_t r = 0; r < col_of_row.size(); ++r) total += a[r][col_of_row[r]];
    return total;
}

} // namespace detail

/// Minimum-cost assignment of every row to a distinct column (rows <= columns).
/// Cells holding a value >= `forbidden` are treated as unusable; the solve
/// stays purely numeric and infeasibility is detected on the way out. Among
/// optimal assignments the lexicographically smallest pair sequence is
/// returned.
inline Assignment hungarian_assign(const CostMatrix& cost,
                                   std::optional<double> forbidden = std::nullopt) {
    const std::size_t rows = cost.size();
    const std::size_t cols = rows == 0 ? 0 : cost[0].size();
    if (rows > cols) throw parameter_error("assignment needs rows <= columns");
    for (const auto& row : cost) {
        if (row.size() != cols) throw parameter_error("ragged cost matrix");
        for (double x : row)
            if (!std::isfinite(x)) throw parameter_error("non-finite cost entry");
    }
    if (rows == 0) return {};

    auto is_forbidden = [&](double x) { return forbidden && x >= *forbidden; };
    auto solve_total = [&](const CostMatrix& a) {
        return detail::assignment_total(a, detail::assign_min_cost(a));
    };

    const double best_total = solve_total(cost);
    const double tol = 1e-9 * std::max(1.0, std::abs(best_total));

    // Lexicographic refinement: for each row in order take the smallest column
    // whose completion still reaches the optimum.
    Assignment result;
    std::vector<char> col_used(cols, 0);
    double fixed_cost = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        bool chosen = false;
        for (std::size_t c = 0; c < cols && !chosen; ++c) {
            if (col_used[c] || is_forbidden(cost[r][c])) continue;
            CostMatrix rest;
            rest.reserve(rows - r - 1);
            for (std::size_t r2 = r + 1; r2 < rows; ++r2) {
                std::vector<double> row;
                row.reserve(cols - r - 1);
                for (std::size_t c2 = 0; c2 < cols; ++c2)
                    if (!col_used[c2] && c2 != c) row.push_back(cost[r2][c2]);
                rest.push_back(std::move(row));
            }
            const double total = fixed_cost + cost[r][c] + solve_total(rest);
            if (total <= best_total + tol) {
                result.pairs.push_back({static_cast<int>(r), static_cast<int>(c)});
                col_used[c] = 1;
                fixed_cost += cost[r][c];
                chosen = true;
            }
        }
        if (!chosen)
            throw infeasible_error("no feasible assignment for row " + std::to_string(r));
    }
    result.total_cost = fixed_cost;
    if (forbidden && result.total_cost >= *forbidden)
        throw infeasible_error("no assignment avoids forbidden cells");
    return result;
}

/// Exact distance plus the matching that witnesses it.
struct ExactResult {
    double distance = 0.0;
    double optimal_cost = 0.0; // value of the graph cost function at the optimum
    MatchingDescription matching;
};

inline ExactResult exact_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                                  const Variant& variant) {
    if (!(variant.p >= 1.0)) throw parameter_error("p must be >= 1");
    if (!(variant.q >= 1.0)) throw parameter_error("q must be >= 1 or infinity");
    const double p = variant.p, q = variant.q;

    ExactResult res;
    res.matching.strict = true;
    res.matching.relaxed = true;

    if (variant.tag == VariantTag::wasserstein) {
        for (const auto& pt : d1.points) validate_point(pt);
        for (const auto& pt : d2.points) validate_point(pt);
        const std::size_t n = d1.size(), m = d2.size();
        const std::size_t dim = n + m;
        if (dim == 0) return res;

        // Augmented square matrix: rows are D1 points then D2 proxies, columns
        // are D2 points then D1 proxies. A point may reach only its own proxy;
        // proxy-to-proxy matches are free.
        double finite_sum = 0.0;
        CostMatrix a(dim, std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                a[i][j] = std::pow(lq_distance(d1.points[i], d2.points[j], q), p);
                finite_sum += a[i][j];
            }
        std::vector<double> diag1(n), diag2(m);
        for (std::size_t i = 0; i < n; ++i) {
            diag1[i] = std::pow(lq_distance(d1.points[i], diagonal_projection(d1.points[i]), q), p);
            finite_sum += diag1[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            diag2[j] = std::pow(lq_distance(diagonal_projection(d2.points[j]), d2.points[j], q), p);
            finite_sum += diag2[j];
        }
        const double sentinel = finite_sum + 1.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t i2 = 0; i2 < n; ++i2) a[i][m + i2] = i == i2 ? diag1[i] : sentinel;
        for (std::size_t j2 = 0; j2 < m; ++j2)
            for (std::size_t j = 0; j < m; ++j) a[n + j2][j] = j == j2 ? diag2[j] : sentinel;

        const Assignment assign = hungarian_assign(a, sentinel);
        res.optimal_cost = assign.total_cost;
        res.distance = std::pow(res.optimal_cost, 1.0 / p);
        for (const auto& [r, c] : assign.pairs) {
            if (r < static_cast<int>(n) && c < static_cast<int>(m))
                res.matching.pairs.push_back({r, c});
            else if (r < static_cast<int>(n))
                res.matching.d1_unmatched.push_back(r);
            else if (c < static_cast<int>(m))
                res.matching.d2_unmatched.push_back(c);
        }
        std::sort(res.matching.d2_unmatched.begin(), res.matching.d2_unmatched.end());
        return res;
    }

    // dcp: assignment over clipped main costs, then the cardinality penalty.
    // No qubit layout is involved, so no capacity cap applies here.
    if (!(variant.c > 0.0)) throw parameter_error("dcp penalty c must be positive");
    for (const auto& pt : d1.points) validate_point(pt);
    for (const auto& pt : d2.points) validate_point(pt);
    const bool swapped = d1.size() > d2.size();
    const PersistenceDiagram& s1 = swapped ? d2 : d1;
    const PersistenceDiagram& s2 = swapped ? d1 : d2;
    const std::size_t n = s1.size(), m = s2.size();
    if (m == 0) return res;
    CostMatrix a(n, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> raw(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            raw[i][j] = lq_distance(s1.points[i], s2.points[j], q);
            a[i][j] = std::pow(std::min(variant.c, raw[i][j]), p);
        }
    const Assignment assign = n == 0 ? Assignment{} : hungarian_assign(a);
    const double cp = std::pow(variant.c, p);
    res.optimal_cost = assign.total_cost + cp * static_cast<double>(m - n);
    res.distance = std::pow(res.optimal_cost / static_cast<double>(m), 1.0 / p);

    std::vector<char> col_matched(m, 0);
    for (const auto& [r, c] : assign.pairs) {
        if (raw[r][c] <= variant.c) {
            res.matching.pairs.push_back({r, c});
            col_matched[c] = 1;
        } else {
            res.matching.d1_unmatched.push_back(r); // clipped: cheaper to penalize
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        if (!col_matched[j]) res.matching.d2_unmatched.push_back(static_cast<int>(j));
    if (swapped) {
        res.matching.swapped = true;
        for (auto& pr : res.matching.pairs) std::swap(pr[0], pr[1]);
        std::swap(res.matching.d1_unmatched, res.matching.d2_unmatched);
        std::sort(res.matching.pairs.begin(), res.matching.pairs.end());
    }
    return res;
}

inline constexpr int kDefaultEnumerationCap = 24;

/// All basis states passing check_feasibility, ascending by index. States are
/// generated constructively over partial injective main matchings with the
/// aux bits filled per mode, then cross-checked against the predicate.
inline std::vector<BasisState> enumerate_feasible(const MatchingGraph& g, FeasibilityMode mode,
                                                  int cap = kDefaultEnumerationCap) {
    if (g.num_qubits > cap)
        throw capacity_error("enumeration over " + std::to_string(g.num_qubits) +
                             " qubits exceeds cap " + std::to_string(cap));
    const bool wasserstein = g.variant.tag == VariantTag::wasserstein;
    std::vector<BasisState> states;
    std::vector<int> col_of_row(g.n, -1);
    std::vector<char> col_used(g.m, 0);

    auto emit = [&]() {
        BasisState base = g.state_mask(); // everything absent
        for (std::size_t i = 0; i < g.n; ++i)
            if (col_of_row[i] >= 0) base &= ~(BasisState{1} << g.main_bit(i, col_of_row[i]));
        std::vector<int> free_bits;
        if (wasserstein) {
            for (std::size_t i = 0; i < g.n; ++i) {
                if (col_of_row[i] >= 0)
                    free_bits.push_back(g.aux_x_bit(i));
                else
                    base &= ~(BasisState{1} << g.aux_x_bit(i)); // must stay covered
            }
        }
        for (std::size_t j = 0; j < g.m; ++j) {
            if (col_used[j])
                free_bits.push_back(g.aux_y_bit(j));
            else
                base &= ~(BasisState{1} << g.aux_y_bit(j));
        }
        if (mode == FeasibilityMode::strict) {
            states.push_back(base); // free aux edges stay absent
            return;
        }
        for (BasisState sub = 0; sub < (BasisState{1} << free_bits.size()); ++sub) {
            BasisState s = base;
            for (std::size_t b = 0; b < free_bits.size(); ++b)
                if ((sub >> b) & 1) s &= ~(BasisState{1} << free_bits[b]);
            states.push_back(s);
        }
    };

    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == g.n) {
            emit();
            return;
        }
        self(self, i + 1); // row i unmatched
        for (std::size_t j = 0; j < g.m; ++j) {
            if (col_used[j]) continue;
            col_used[j] = 1;
            col_of_row[i] = static_cast<int>(j);
            self(self, i + 1);
            col_of_row[i] = -1;
            col_used[j] = 0;
        }
    };
    recurse(recurse, 0);

    std::sort(states.begin(), states.end());
    for (BasisState s : states)
        if (!check_feasibility(g, s, mode))
            throw std::logic_error("constructive enumeration produced an infeasible state");
    return states;
}

/// Minimum cost over the relaxed-feasible states, ties toward the smallest
/// basis index.
inline std::pair<double, BasisState> brute_force_optimum(const MatchingGraph& g,
                                                         int cap = kDefaultEnumerationCap) {
    const std::vector<BasisState> feasible = enumerate_feasible(g, FeasibilityMode::relaxed, cap);
    double best = std::numeric_limits<double>::infinity();
    BasisState argmin = 0;
    for (BasisState s : feasible) {
        const double cost = state_cost(g, s);
        if (cost < best) {
            best = cost;
            argmin = s;
        }
    }
    return {best, argmin};
}

inline nlohmann::ordered_json exact_result_to_json(const ExactResult& res, const Variant& variant,
                                                   std::size_t n, std::size_t m) {
    nlohmann::ordered_json doc;
    doc["distance"] = res.distance;
    doc["optimal_cost"] = res.optimal_cost;
    doc["matching"] = matching_to_json(res.matching);
    doc["variant"] = variant_to_json(variant);
    doc["n"] = n;
    doc["m"] = m;
    return doc;
}

} // namespace pdq

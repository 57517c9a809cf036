#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pdqdist/exact.hpp"
#include "pdqdist/matchgraph.hpp"
#include "pdqdist/qsim.hpp"

namespace pdq {

struct LayerAngles {
    double gamma = 0.0;
    double beta = 0.0;
};

/// Circuit schedule: an initialization mixer angle followed by (gamma, beta)
/// pairs, one per layer. With a basis-state start a leading cost unitary is
/// only a global phase, so beta0 is what makes a one-layer circuit's
/// statistics depend on gamma at all.
struct QaoaParams {
    double beta0 = 0.0;
    std::vector<LayerAngles> layers;
};

/// U_M(beta_p) U_g(gamma_p) ... U_M(beta_1) U_g(gamma_1) U_M(beta0) |initial>.
inline StateVector run_layers(Simulator& sim, const QaoaParams& params) {
    StateVector sv = sim.initial_state();
    sim.apply_mixer(sv, params.beta0);
    for (const auto& layer : params.layers) {
        sim.apply_cost_unitary(sv, layer.gamma);
        sim.apply_mixer(sv, layer.beta);
    }
    return sv;
}

enum class OptimizeStrategy { grid, grid_then_nelder_mead };

struct OptTracePoint {
    QaoaParams params;
    double expected_cost = 0.0;
};

struct OptimizeResult {
    QaoaParams params;
    double expected_cost = 0.0;
    double gamma_scale = 1.0; // layer gammas were searched as angle / gamma_scale
    std::vector<OptTracePoint> trace;
};

namespace detail {

// Downhill simplex, minimizing. Runs until the simplex collapses below
// size_tol around its best vertex or max_iter reflections.
template <typename F>
std::pair<std::vector<double>, double> nelder_mead(F&& objective, std::vector<double> start,
                                                   double step, double size_tol, int max_iter) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> verts(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] += step;
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = objective(verts[i]);

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order[0], worst = order[dim],
                          second_worst = order[dim == 0 ? 0 : dim - 1];

        double size = 0.0;
        for (std::size_t i = 0; i <= dim; ++i)
            for (std::size_t k = 0; k < dim; ++k)
                size = std::max(size, std::abs(verts[i][k] - verts[best][k]));
        if (size < size_tol) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += verts[i][k];
        }
        for (double& x : centroid) x /= static_cast<double>(dim);

        auto blend = [&](double t) {
            std::vector<double> v(dim);
            for (std::size_t k = 0; k < dim; ++k)
                v[k] = centroid[k] + t * (centroid[k] - verts[worst][k]);
            return v;
        };

        const std::vector<double> reflected = blend(1.0);
        const double fr = objective(reflected);
        if (fr < vals[best]) {
            const std::vector<double> expanded = blend(2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                verts[worst] = expanded;
                vals[worst] = fe;
            } else {
                verts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            verts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const std::vector<double> contracted = blend(-0.5);
            const double fc = objective(contracted);
            if (fc < vals[worst]) {
                verts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < dim; ++k)
                        verts[i][k] = 0.5 * (verts[i][k] + verts[best][k]);
                    vals[i] = objective(verts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i)
        if (vals[i] < vals[best]) best = i;
    return {verts[best], vals[best]};
}

} // namespace detail

/// Minimizes the expected cost of run_layers over beta0 and the layer angles.
/// Each angle is gridded over grid_resolution points in [0, 2pi); gammas are
/// searched with the edge weights normalized by their maximum so the grid's
/// period is meaningful, and the returned layer gammas are the rescaled
/// (directly usable) values. Ties go to the lexicographically smallest angle
/// vector. The seed is accepted for interface stability; both strategies here
/// are deterministic.
inline OptimizeResult optimize_angles(const MatchingGraph& g, int num_layers,
                                      OptimizeStrategy strategy, int grid_resolution,
                                      [[maybe_unused]] std::uint64_t seed,
                                      int qubit_cap = kDefaultQubitCap) {
    if (num_layers < 1) throw parameter_error("num_layers must be >= 1");
    if (grid_resolution < 2) throw parameter_error("grid_resolution must be >= 2");

    Simulator sim(g, qubit_cap);
    double max_weight = 0.0;
    for (const auto& e : g.edges) max_weight = std::max(max_weight, e.weight);
    const double scale = max_weight > 0.0 ? max_weight : 1.0;

    const std::size_t dim = 1 + 2 * static_cast<std::size_t>(num_layers);
    auto to_params = [&](const std::vector<double>& v) {
        QaoaParams params;
        params.beta0 = v[0];
        for (int layer = 0; layer < num_layers; ++layer)
            params.layers.push_back({v[1 + 2 * layer] / scale, v[2 + 2 * layer]});
        return params;
    };

    OptimizeResult result;
    result.gamma_scale = scale;
    auto objective = [&](const std::vector<double>& v) {
        const QaoaParams params = to_params(v);
        StateVector sv = run_layers(sim, params);
        const double cost = sim.expected_cost(sv);
        result.trace.push_back({params, cost});
        return cost;
    };

    std::vector<double> best_vec(dim, 0.0);
    double best_cost = std::numeric_limits<double>::infinity();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(grid_resolution);
    std::vector<int> idx(dim, 0);
    std::vector<double> v(dim, 0.0);
    while (true) {
        for (std::size_t k = 0; k < dim; ++k) v[k] = step * idx[k];
        const double cost = objective(v);
        if (cost < best_cost) {
            best_cost = cost;
            best_vec = v;
        }
        std::size_t k = dim;
        while (k > 0 && ++idx[k - 1] == grid_resolution) idx[--k] = 0;
        if (k == 0) break;
    }

    if (strategy == OptimizeStrategy::grid_then_nelder_mead) {
        const auto [vec, cost] =
            detail::nelder_mead(objective, best_vec, 0.5 * step, 1e-4, 200);
        if (cost < best_cost) {
            best_cost = cost;
            best_vec = vec;
        }
    }

    result.params = to_params(best_vec);
    result.expected_cost = best_cost;
    return result;
}

/// Reads a basis state as a matching over the original inputs: pairs from
/// present main edges, unmatched sets from present aux edges (plus, for dcp,
/// the D1 rows no main edge touches).
inline MatchingDescription decode_matching(const MatchingGraph& g, BasisState s) {
    detail::require_in_range(g, s);
    MatchingDescription md;
    md.swapped = g.swapped;
    const BasisState present = ~s & g.state_mask();
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.m; ++j)
            if ((present >> g.main_bit(i, j)) & 1)
                md.pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    if (g.variant.tag == VariantTag::wasserstein) {
        for (std::size_t i = 0; i < g.n; ++i)
            if ((present >> g.aux_x_bit(i)) & 1) md.d1_unmatched.push_back(static_cast<int>(i));
    } else {
        for (std::size_t i = 0; i < g.n; ++i)
            if ((present & g.row_main_mask(i)) == 0) md.d1_unmatched.push_back(static_cast<int>(i));
    }
    for (std::size_t j = 0; j < g.m; ++j)
        if ((present >> g.aux_y_bit(j)) & 1) md.d2_unmatched.push_back(static_cast<int>(j));
    md.strict = check_feasibility(g, s, FeasibilityMode::strict);
    md.relaxed = check_feasibility(g, s, FeasibilityMode::relaxed);
    if (g.swapped) {
        for (auto& pr : md.pairs) std::swap(pr[0], pr[1]);
        std::swap(md.d1_unmatched, md.d2_unmatched);
        std::sort(md.pairs.begin(), md.pairs.end());
    }
    return md;
}

/// Cost-to-distance post-processing of the variant: cost^(1/p) for
/// Wasserstein, (cost/m)^(1/p) for dcp.
inline double distance_from_cost(const MatchingGraph& g, double cost) {
    if (g.variant.tag == VariantTag::wasserstein) return std::pow(cost, 1.0 / g.variant.p);
    if (g.m == 0) return 0.0;
    return std::pow(cost / static_cast<double>(g.m), 1.0 / g.variant.p);
}

struct SampledState {
    BasisState basis = 0;
    std::uint64_t count = 0;
    double cost = 0.0;
    double distance = 0.0;
    MatchingDescription matching;
};

struct DistanceReport {
    Variant variant;
    std::size_t n = 0; // graph-layout cardinalities (post-swap for dcp)
    std::size_t m = 0;
    bool swapped = false;
    QaoaParams params;
    double gamma_scale = 1.0;
    double expected_cost = 0.0;
    SampledState best_sampled;  // minimum-cost relaxed-feasible sampled state
    SampledState most_frequent; // highest count, ties to the smallest index
    std::map<BasisState, std::uint64_t> histogram;
    std::optional<ExactResult> exact_reference;
    int qubits = 0;
    std::uint64_t rz_per_cost = 0;  // phase rotations per cost operator
    std::uint64_t crx_per_mixer = 0; // clause-controlled rotations per mixer
};

/// End-to-end pipeline: build the graph, optimize angles (num_layers == 0
/// skips optimization and runs the bare initial state), run the circuit,
/// sample, decode.
inline DistanceReport estimate_distance(const PersistenceDiagram& d1,
                                        const PersistenceDiagram& d2, const Variant& variant,
                                        int num_layers, std::uint64_t shots, std::uint64_t seed,
                                        bool with_exact, int grid_resolution = 16,
                                        OptimizeStrategy strategy =
                                            OptimizeStrategy::grid_then_nelder_mead,
                                        int qubit_cap = kDefaultQubitCap) {
    const MatchingGraph g = build_graph(d1, d2, variant, qubit_cap);
    DistanceReport report;
    report.variant = variant;
    report.n = g.n;
    report.m = g.m;
    report.swapped = g.swapped;
    report.qubits = g.num_qubits;
    report.rz_per_cost = g.edges.size();
    report.crx_per_mixer = g.edges.size();

    if (num_layers >= 1) {
        OptimizeResult opt =
            optimize_angles(g, num_layers, strategy, grid_resolution, seed, qubit_cap);
        report.params = std::move(opt.params);
        report.gamma_scale = opt.gamma_scale;
    }

    Simulator sim(g, qubit_cap);
    StateVector sv = run_layers(sim, report.params);
    report.expected_cost = sim.expected_cost(sv);
    report.histogram = sim.sample_measurements(sv, shots, seed);

    bool have_best = false;
    for (const auto& [basis, count] : report.histogram) {
        const double cost = state_cost(g, basis);
        if (check_feasibility(g, basis, FeasibilityMode::relaxed) &&
            (!have_best || cost < report.best_sampled.cost)) {
            report.best_sampled = {basis, count, cost, distance_from_cost(g, cost),
                                   decode_matching(g, basis)};
            have_best = true;
        }
        if (count > report.most_frequent.count) {
            report.most_frequent = {basis, count, cost, distance_from_cost(g, cost),
                                    decode_matching(g, basis)};
        }
    }
    if (with_exact) report.exact_reference = exact_distance(d1, d2, variant);
    return report;
}

inline std::string bits_string(BasisState s, int num_qubits) {
    std::string out(static_cast<std::size_t>(num_qubits), '0');
    for (int k = 0; k < num_qubits; ++k)
        if ((s >> k) & 1) out[k] = '1';
    return out;
}

inline nlohmann::ordered_json report_to_json(const DistanceReport& report) {
    nlohmann::ordered_json doc;
    doc["variant"] = variant_to_json(report.variant);
    doc["n"] = report.n;
    doc["m"] = report.m;
    auto& params = doc["params"];
    params["beta0"] = report.params.beta0;
    auto& layers = params["layers"] = nlohmann::ordered_json::array();
    for (const auto& layer : report.params.layers)
        layers.push_back({{"gamma", layer.gamma}, {"beta", layer.beta}});
    params["gamma_scale"] = report.gamma_scale;
    doc["expected_cost"] = report.expected_cost;
    auto& best = doc["best"];
    best["bits"] = bits_string(report.best_sampled.basis, report.qubits);
    best["cost"] = report.best_sampled.cost;
    best["distance"] = report.best_sampled.distance;
    best["matching"] = matching_to_json(report.best_sampled.matching);
    auto& most = doc["most_frequent"];
    most["bits"] = bits_string(report.most_frequent.basis, report.qubits);
    most["count"] = report.most_frequent.count;
    auto& hist = doc["histogram"] = nlohmann::ordered_json::array();
    for (const auto& [basis, count] : report.histogram)
        hist.push_back({{"bits", bits_string(basis, report.qubits)}, {"count", count}});
    if (report.exact_reference)
        doc["exact"] = exact_result_to_json(*report.exact_reference, report.variant, report.n,
                                            report.m);
    auto& res = doc["resources"];
    res["qubits"] = report.qubits;
    res["rz_count"] = report.rz_per_cost;
    res["crx_count"] = report.crx_per_mixer;
    return doc;
}

} // namespace pdq

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "pdqdist/errors.hpp"
#include "pdqdist/matchgraph.hpp"
#include "pdqdist/rng.hpp"

namespace pdq {

/// Dense complex amplitudes over the edge-qubit basis.
struct StateVector {
    int num_qubits = 0;
    std::vector<std::complex<double>> amplitudes;

    double norm_sq() const {
        double total = 0.0;
        for (const auto& a : amplitudes) total += std::norm(a);
        return total;
    }
};

/// Two readings of the per-edge control clause. paper_literal keeps the
/// factor on the target bit itself (an edge may only be added if absent /
/// removed if present) and is meant for classical basis-state diagnostics:
/// f X_e is not self-adjoint under that reading, so it cannot gate a
/// rotation. symmetric_generator is the Hermitian form the mixer uses: the
/// target-bit factor is dropped and, on main edges, both endpoint proxy
/// edges must be present. The coverage factors are what keep each rotation
/// inside the feasible span in the removal direction as well; on every
/// construction-tree state they evaluate identically to the literal clause.
enum class ClauseKind { paper_literal, symmetric_generator };

namespace detail {

struct ClauseMask {
    BasisState need_absent = 0;  // all these bits must be 1
    BasisState need_present = 0; // all these bits must be 0
    bool negate = false;         // aux edges: clause is NOT(all need_absent bits set)

    bool fires(BasisState s) const {
        if (negate) return (s & need_absent) != need_absent;
        return (s & need_absent) == need_absent && (s & need_present) == 0;
    }
};

inline ClauseMask symmetric_clause_mask(const MatchingGraph& g, const Edge& e) {
    switch (e.kind) {
    case EdgeKind::main: {
        const BasisState self = BasisState{1} << e.bit_index;
        ClauseMask cm;
        cm.need_absent = (g.row_main_mask(e.i) | g.col_main_mask(e.j)) & ~self;
        cm.need_present = BasisState{1} << g.aux_y_bit(e.j);
        if (g.variant.tag == VariantTag::wasserstein)
            cm.need_present |= BasisState{1} << g.aux_x_bit(e.i);
        return cm;
    }
    case EdgeKind::aux_x: return {g.row_main_mask(e.i), 0, true};
    case EdgeKind::aux_y: return {g.col_main_mask(e.j), 0, true};
    }
    throw parameter_error("unknown edge kind");
}

} // namespace detail

/// Control clause f(e) evaluated on a basis state.
inline int clause_value(const MatchingGraph& g, const Edge& e, BasisState s, ClauseKind kind) {
    detail::require_in_range(g, s);
    if (kind == ClauseKind::symmetric_generator)
        return detail::symmetric_clause_mask(g, e).fires(s) ? 1 : 0;
    // literal reading: the target-bit factor and the main-edge neighborhood
    const bool bit = (s >> e.bit_index) & 1;
    if (e.kind == EdgeKind::main) {
        const BasisState self = BasisState{1} << e.bit_index;
        const BasisState others = (g.row_main_mask(e.i) | g.col_main_mask(e.j)) & ~self;
        return (bit && (s & others) == others) ? 1 : 0;
    }
    const BasisState mains =
        e.kind == EdgeKind::aux_x ? g.row_main_mask(e.i) : g.col_main_mask(e.j);
    return (!bit && (s & mains) != mains) ? 1 : 0;
}

struct GateCounters {
    std::uint64_t rz = 0;  // single-qubit phase rotations
    std::uint64_t crx = 0; // clause-controlled X rotations
};

/// Statevector engine bound to one matching graph. Mutating operations own
/// the passed buffer for the duration of the call; separate Simulator
/// instances share nothing and can run concurrently.
class Simulator {
public:
    explicit Simulator(const MatchingGraph& g, int qubit_cap = kDefaultQubitCap) : g_(&g) {
        if (g.num_qubits > qubit_cap)
            throw capacity_error("simulating " + std::to_string(g.num_qubits) +
                                 " qubits exceeds cap " + std::to_string(qubit_cap));
        for (const auto& e : g.edges) total_weight_ += e.weight;
        // Mixer order: main edges row-major, then aux_y ascending, then aux_x
        // ascending. Edges are stored by bit index, so pick by kind.
        for (std::size_t k = 0; k < g.edges.size(); ++k)
            if (g.edges[k].kind == EdgeKind::main) mixer_order_.push_back(k);
        for (std::size_t k = 0; k < g.edges.size(); ++k)
            if (g.edges[k].kind == EdgeKind::aux_y) mixer_order_.push_back(k);
        for (std::size_t k = 0; k < g.edges.size(); ++k)
            if (g.edges[k].kind == EdgeKind::aux_x) mixer_order_.push_back(k);
    }

    const MatchingGraph& graph() const { return *g_; }
    const GateCounters& counters() const { return counters_; }
    void reset_counters() { counters_ = {}; }
    void set_trace(std::ostream* sink) { trace_ = sink; }

    /// Basis state with every main edge absent and every aux edge present:
    /// everything matched to its proxy.
    StateVector initial_state() const {
        StateVector sv;
        sv.num_qubits = g_->num_qubits;
        sv.amplitudes.assign(std::size_t{1} << g_->num_qubits, {0.0, 0.0});
        const BasisState start = g_->n * g_->m == 0 ? 0 : (BasisState{1} << (g_->n * g_->m)) - 1;
        sv.amplitudes[start] = {1.0, 0.0};
        return sv;
    }

    /// Diagonal phase operator: one phase rotation per edge, angle -gamma * w_e.
    void apply_cost_unitary(StateVector& sv, double gamma) {
        require_match(sv);
        const std::vector<double>& table = cost_table();
        const double offset = 0.5 * total_weight_;
        for (std::size_t s = 0; s < sv.amplitudes.size(); ++s)
            sv.amplitudes[s] *= std::polar(1.0, gamma * (table[s] - offset));
        counters_.rz += g_->edges.size();
        if (trace_) {
            char buf[96];
            for (const auto& e : g_->edges) {
                std::snprintf(buf, sizeof buf, "RZ bit=%d theta=%.17g\n", e.bit_index,
                              -gamma * e.weight);
                *trace_ << buf;
            }
        }
    }

    /// One clause-controlled rotation. On every basis pair (s, s ^ bit_e)
    /// whose clause fires, mixes with cos(beta/2) on-diagonal and
    /// -i sin(beta/2) across; elsewhere identity.
    void apply_mixer_edge(StateVector& sv, const Edge& e, double beta) {
        require_match(sv);
        const detail::ClauseMask clause = detail::symmetric_clause_mask(*g_, e);
        const BasisState target = BasisState{1} << e.bit_index;
        const BasisState low = target - 1;
        const double ch = std::cos(0.5 * beta);
        const std::complex<double> cross(0.0, -std::sin(0.5 * beta));
        const std::size_t half = sv.amplitudes.size() >> 1;
        for (BasisState base = 0; base < half; ++base) {
            const BasisState s = ((base & ~low) << 1) | (base & low);
            if (!clause.fires(s)) continue;
            auto& a0 = sv.amplitudes[s];
            auto& a1 = sv.amplitudes[s | target];
            const std::complex<double> b0 = a0, b1 = a1;
            a0 = ch * b0 + cross * b1;
            a1 = cross * b0 + ch * b1;
        }
        counters_.crx += 1;
        if (trace_) {
            char buf[160];
            std::string controls;
            for (int b = 0; b < g_->num_qubits; ++b)
                if (((clause.need_absent | clause.need_present) >> b) & 1)
                    controls += (controls.empty() ? "" : ",") + std::to_string(b);
            std::snprintf(buf, sizeof buf, "CRX bits=%s target=%d theta=%.17g clause=symmetric\n",
                          controls.c_str(), e.bit_index, beta);
            *trace_ << buf;
        }
    }

    /// Complete mixer: main edges row-major, then aux_y, then aux_x.
    void apply_mixer(StateVector& sv, double beta) {
        for (std::size_t k : mixer_order_) apply_mixer_edge(sv, g_->edges[k], beta);
    }

    double expected_cost(const StateVector& sv) const {
        require_match(sv);
        const std::vector<double>& table = cost_table();
        double total = 0.0;
        for (std::size_t s = 0; s < sv.amplitudes.size(); ++s)
            total += std::norm(sv.amplitudes[s]) * table[s];
        return total;
    }

    /// Multinomial sample of the measurement distribution; counts sum to shots.
    std::map<BasisState, std::uint64_t> sample_measurements(const StateVector& sv,
                                                            std::uint64_t shots,
                                                            std::uint64_t seed) const {
        require_match(sv);
        if (shots == 0) throw parameter_error("shots must be >= 1");
        std::vector<BasisState> support;
        std::vector<double> cdf;
        double acc = 0.0;
        for (std::size_t s = 0; s < sv.amplitudes.size(); ++s) {
            const double p = std::norm(sv.amplitudes[s]);
            if (p > 0.0) {
                acc += p;
                support.push_back(s);
                cdf.push_back(acc);
            }
        }
        if (support.empty()) throw parameter_error("state carries no probability mass");
        std::map<BasisState, std::uint64_t> counts;
        Rng rng(seed);
        for (std::uint64_t k = 0; k < shots; ++k) {
            const double u = rng.uniform01() * acc;
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const std::size_t idx = std::min<std::size_t>(it - cdf.begin(), support.size() - 1);
            ++counts[support[idx]];
        }
        return counts;
    }

    double total_weight() const { return total_weight_; }

    const std::vector<double>& cost_table() const {
        if (cost_table_.empty()) {
            const std::size_t dim = std::size_t{1} << g_->num_qubits;
            std::vector<double> wbit(g_->num_qubits, 0.0);
            for (const auto& e : g_->edges) wbit[e.bit_index] = e.weight;
            cost_table_.resize(dim);
            cost_table_[0] = total_weight_; // all bits 0: every edge present
            for (std::size_t s = 1; s < dim; ++s)
                cost_table_[s] = cost_table_[s & (s - 1)] - wbit[std::countr_zero(s)];
        }
        return cost_table_;
    }

private:
    void require_match(const StateVector& sv) const {
        if (sv.num_qubits != g_->num_qubits ||
            sv.amplitudes.size() != (std::size_t{1} << g_->num_qubits))
            throw parameter_error("state dimension does not match the graph");
    }

    const MatchingGraph* g_;
    double total_weight_ = 0.0;
    std::vector<std::size_t> mixer_order_;
    mutable std::vector<double> cost_table_;
    GateCounters counters_;
    std::ostream* trace_ = nullptr;
};

} // namespace pdq

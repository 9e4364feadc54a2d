#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mergo/criteria.hpp"
#include "mergo/evolution.hpp"
#include "mergo/hamiltonian.hpp"
#include "mergo/rng.hpp"
#include "mergo/weakmeas.hpp"

namespace mergo {

/// Internal merge node; children are leaf ids or ids of earlier nodes.
struct ScatterNode {
    std::string id;
    std::vector<std::string> children;
    friend bool operator==(const ScatterNode&, const ScatterNode&) = default;
};

/// Internal nodes are stored children-before-parents, so iterating `nodes`
/// in order is a valid post-order schedule.
struct ScatterTree {
    std::vector<std::string> leaves;
    std::vector<ScatterNode> nodes;
    std::string root;

    std::size_t internal_count() const { return nodes.size(); }

    const ScatterNode* find(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }

    bool is_leaf(const std::string& id) const {
        for (const auto& l : leaves)
            if (l == id) return true;
        return false;
    }

    /// Longest root-to-leaf path measured in merges.
    int depth() const {
        std::map<std::string, int> d;
        for (const auto& l : leaves) d[l] = 0;
        int best = 0;
        for (const auto& n : nodes) {
            int m = 0;
            for (const auto& c : n.children) m = std::max(m, d.at(c));
            d[n.id] = m + 1;
            best = std::max(best, m + 1);
        }
        return best;
    }

    /// Checks ids, ordering and that every leaf and node is used exactly once.
    void validate() const {
        std::set<std::string> known(leaves.begin(), leaves.end());
        if (known.size() != leaves.size()) throw InvalidArgument("duplicate leaf id");
        std::set<std::string> consumed;
        for (const auto& n : nodes) {
            if (n.children.size() < 2) throw InvalidArgument("node " + n.id + " needs at least two children");
            for (const auto& c : n.children) {
                if (!known.count(c)) throw InvalidArgument("node " + n.id + " references unknown or later child " + c);
                if (!consumed.insert(c).second) throw InvalidArgument("child " + c + " used twice");
            }
            if (!known.insert(n.id).second) throw InvalidArgument("duplicate node id " + n.id);
        }
        if (!known.count(root)) throw InvalidArgument("unknown root " + root);
        if (consumed.size() + 1 != known.size()) throw InvalidArgument("tree is not connected");
    }
};

/// Balanced tree: groups consecutive runs of `arity` entries level by level;
/// a lone remainder is promoted unchanged to the next level.
inline ScatterTree plan_tree(const std::vector<std::string>& leaves, int arity = 2) {
    if (leaves.empty()) throw InvalidArgument("plan_tree needs at least one leaf");
    if (arity < 2) throw InvalidArgument("arity must be at least 2");
    ScatterTree tree;
    tree.leaves = leaves;
    std::vector<std::string> level = leaves;
    int next_id = 0;
    while (level.size() > 1) {
        std::vector<std::string> up;
        for (std::size_t i = 0; i < level.size(); i += static_cast<std::size_t>(arity)) {
            const std::size_t end = std::min(level.size(), i + static_cast<std::size_t>(arity));
            if (end - i == 1) {
                up.push_back(level[i]);
                continue;
            }
            ScatterNode node{"n" + std::to_string(next_id++), {level.begin() + static_cast<long>(i), level.begin() + static_cast<long>(end)}};
            up.push_back(node.id);
            tree.nodes.push_back(std::move(node));
        }
        level = std::move(up);
    }
    tree.root = level.front();
    return tree;
}

/// Result of a node's merge channel.
struct ChannelResult {
    DensityMatrix state;
    int steps = 0;
};

/// Everything a node does after its children finish.
struct NodeProcess {
    std::function<ChannelResult(const DensityMatrix&)> merge;     // applied once to the tensored input
    RetryChannel retry;                                          // modified channel after a failed flag
    std::function<DensityMatrix(const DensityMatrix&)> renaturalize;  // optional, after success
    Bipartition bipartition;
    DeltaSchedule delta{};
    int max_iters = 100;
    bool restrict_output_to_a = false;  // hand the parent only the A block
};

struct NodeRecord {
    std::string id;
    std::vector<std::string> children;
    std::string status = "not_run";  // complete | exhausted | not_run
    int iterations = 0;
    int merge_executions = 0;
    int propagation_steps = 0;
    double p_suc_first = 0.0;  // A weight seen by the first measurement
    double p1_success = 0.0;   // flag probability of the successful measurement
    long input_dim = 0;
    long output_dim = 0;
};

struct TreeRunReport {
    std::map<std::string, NodeRecord> nodes;  // keyed by node id
    std::vector<std::string> execution_order;
    int total_repetitions = 0;
    std::size_t node_count = 0;
    std::optional<std::string> exhausted_node;
    std::optional<DensityMatrix> final_state;
    std::vector<TraceRecord> trace;
};

class NodeExhausted : public Error {
public:
    NodeExhausted(std::string node_id, TreeRunReport report)
        : Error("node_exhausted", "node " + node_id + " exhausted its retries"),
          node_id_(std::move(node_id)), report_(std::move(report)) {}

    const std::string& node_id() const { return node_id_; }
    const TreeRunReport& report() const { return report_; }

private:
    std::string node_id_;
    TreeRunReport report_;
};

inline DensityMatrix restrict_to(const DensityMatrix& rho, const std::vector<std::size_t>& indices) {
    const auto k = static_cast<Eigen::Index>(indices.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            out(i, j) = rho.matrix()(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]),
                                     static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
    const double tr = out.trace().real();
    if (tr <= 0.0) throw ZeroProbabilityBranch("restricted block carries no weight");
    return DensityMatrix::trusted(out / tr);
}

using NodeProcessFactory = std::function<NodeProcess(const ScatterNode&)>;

/// Post-order execution. Each node tensors its children's outputs in child
/// order, applies its merge channel once, then repeats measurement and retry
/// until success. A failing node never re-runs its children. Node randomness
/// comes from derive_seed(global_seed, node_id).
inline TreeRunReport run_tree(const ScatterTree& tree, const std::map<std::string, DensityMatrix>& leaf_states,
                              std::uint64_t global_seed, const NodeProcessFactory& process_for) {
    tree.validate();
    TreeRunReport report;
    report.node_count = tree.nodes.size();
    std::map<std::string, DensityMatrix> outputs;
    for (const auto& l : tree.leaves) {
        auto it = leaf_states.find(l);
        if (it == leaf_states.end()) throw InvalidArgument("missing atomic state for leaf " + l);
        outputs.emplace(l, it->second);
    }
    for (const auto& n : tree.nodes) report.nodes[n.id] = NodeRecord{n.id, n.children};

    for (const auto& node : tree.nodes) {
        NodeRecord& rec = report.nodes[node.id];
        report.execution_order.push_back(node.id);
        DensityMatrix input = outputs.at(node.children.front());
        for (std::size_t c = 1; c < node.children.size(); ++c) input = kron(input, outputs.at(node.children[c]));
        rec.input_dim = static_cast<long>(input.dim());

        const NodeProcess proc = process_for(node);
        ChannelResult merged = proc.merge(input);
        ++rec.merge_executions;
        rec.propagation_steps += merged.steps;
        if (static_cast<std::size_t>(merged.state.dim()) != proc.bipartition.dim())
            throw InvalidArgument("node " + node.id + ": bipartition does not match merged state");

        Rng rng(derive_seed(global_seed, node.id));
        const std::size_t trace_start = report.trace.size();
        RepeatOptions opts{proc.max_iters, proc.delta, node.id, &report.trace};
        try {
            RepeatResult r = repeat_until_success(merged.state, proc.bipartition, proc.retry, opts, rng);
            rec.iterations = r.iterations;
            DensityMatrix out = proc.renaturalize ? proc.renaturalize(r.state) : r.state;
            if (proc.restrict_output_to_a) out = restrict_to(out, proc.bipartition.set_a);
            rec.output_dim = static_cast<long>(out.dim());
            rec.status = "complete";
            outputs.insert_or_assign(node.id, std::move(out));
        } catch (const MaxItersExceeded&) {
            rec.iterations = proc.max_iters;
            rec.status = "exhausted";
            report.exhausted_node = node.id;
        }
        if (report.trace.size() > trace_start) {
            rec.p_suc_first = report.trace[trace_start].p_suc_before;
            if (rec.status == "complete") rec.p1_success = report.trace.back().p1;
        }
        report.total_repetitions += rec.iterations;
        if (report.exhausted_node) throw NodeExhausted(node.id, report);
    }
    report.final_state = outputs.at(tree.root);
    return report;
}

/// Synthetic node with success probability P per attempt: the merge and
/// retry channels both replace the state with diag(P, 1 - P), A = {0}, and
/// the node hands a one-dimensional state to its parent.
inline NodeProcess synthetic_node_process(double success_probability, int max_iters = 1000) {
    if (!(success_probability >= 0.0 && success_probability <= 1.0))
        throw InvalidArgument("success probability must lie in [0, 1]");
    Matrix sigma = Matrix::Zero(2, 2);
    sigma(0, 0) = success_probability;
    sigma(1, 1) = 1.0 - success_probability;
    const DensityMatrix target = DensityMatrix::trusted(sigma);
    NodeProcess p;
    p.merge = [target](const DensityMatrix&) { return ChannelResult{target, 0}; };
    p.retry = [target](const DensityMatrix&, int) { return target; };
    p.bipartition = Bipartition::from_indicator({true, false});
    p.delta = DeltaSchedule{kHalfPi, 1.0};
    p.max_iters = max_iters;
    p.restrict_output_to_a = true;
    return p;
}

/// Physical node: the merge channel propagates H(s) over [0, s1]; retry k
/// repeats the sweep with the trap frequencies multiplied by escalation^k;
/// renaturalization (optional) re-applies the base sweep after success.
struct PhysicalNodeSpec {
    Basis basis;
    PartitionSpec partition;
    Schedule schedule;
    GeometricCriterion criterion;
    DeltaSchedule delta{};
    int max_iters = 50;
    int n_steps = 0;  // 0 selects default_steps
    double escalation = 1.0;
    bool renaturalize = true;
};

inline NodeProcess physical_node_process(const PhysicalNodeSpec& spec) {
    const ScheduledHamiltonian base = build_scheduled_hamiltonian(spec.basis, spec.partition, spec.schedule);
    const double s1 = spec.schedule.s1;
    const int steps = spec.n_steps > 0 ? spec.n_steps : default_steps(base, 0.0, s1);
    const auto sweep = std::make_shared<SweepUnitary>(sweep_unitary(base, 0.0, s1, steps));
    NodeProcess p;
    p.merge = [sweep](const DensityMatrix& rho) { return ChannelResult{sweep->apply(rho), sweep->steps}; };
    if (spec.partition.trap && spec.escalation != 1.0) {
        p.retry = [spec, base, s1, steps](const DensityMatrix& rho, int k) {
            ScheduledHamiltonian sh = base;
            sh.v_trap = build_trap(spec.basis, spec.partition.trap->scaled(std::pow(spec.escalation, k)));
            return sweep_unitary(sh, 0.0, s1, steps).apply(rho);
        };
    } else {
        p.retry = [sweep](const DensityMatrix& rho, int) { return sweep->apply(rho); };
    }
    if (spec.renaturalize) p.renaturalize = [sweep](const DensityMatrix& rho) { return sweep->apply(rho); };
    p.bipartition = bipartition(spec.criterion, spec.basis);
    p.delta = spec.delta;
    p.max_iters = spec.max_iters;
    return p;
}

/// Block decomposition rho = p0 rho_suc + (1 - p0) rho_notsuc + C.
struct ChannelDecomposition {
    double p0 = 0.0;
    std::optional<DensityMatrix> rho_suc;
    std::optional<DensityMatrix> rho_not_suc;
    Matrix coherence;
    double coherence_norm = 0.0;  // Frobenius norm of the off-diagonal blocks
};

inline ChannelDecomposition channel_decompose(const DensityMatrix& state, const Bipartition& bip) {
    const BlockSplit blocks = split_blocks(state.matrix(), bip);
    ChannelDecomposition d;
    d.p0 = blocks.aa.trace().real();
    if (d.p0 > 0.0) d.rho_suc = DensityMatrix::trusted(blocks.aa / d.p0);
    const double pb = blocks.bb.trace().real();
    if (pb > 0.0) d.rho_not_suc = DensityMatrix::trusted(blocks.bb / pb);
    d.coherence = blocks.cross;
    d.coherence_norm = blocks.cross.norm();
    return d;
}

}  // namespace mergo

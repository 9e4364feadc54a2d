#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mergo/config.hpp"
#include "mergo/criteria.hpp"
#include "mergo/evolution.hpp"
#include "mergo/grid.hpp"
#include "mergo/hamiltonian.hpp"
#include "mergo/io.hpp"
#include "mergo/lzcost.hpp"
#include "mergo/schedule.hpp"
#include "mergo/symmetry.hpp"
#include "mergo/tree.hpp"
#include "mergo/weakmeas.hpp"

namespace mergo::app {

using nlohmann::json;
namespace fs = std::filesystem;

/// Library objects assembled from a RunConfig.
struct Model {
    GridSpec grid;
    ParticleSet particles;
    Schedule schedule;
    std::optional<SymmetryDeclaration> symmetry;
    std::optional<TrapSpec> trap;
    std::optional<GeometricCriterion> criterion;
    std::optional<PartitionSpec> partition;
};

namespace detail {

template <typename T>
const T& need(const std::optional<T>& v, const char* section) {
    if (!v) throw ConfigError(std::string("config section '") + section + "' is required for this command");
    return *v;
}

inline void need_id(const std::set<int>& known, int id, const std::string& where) {
    if (!known.count(id)) throw ConfigError(where + " references unknown particle id " + std::to_string(id));
}

}  // namespace detail

inline Schedule make_schedule(const config::ScheduleConfig& c) {
    try {
        Schedule s{c.s0, c.s1, Profile{profile_from_string(c.f), c.approach}, Profile{profile_from_string(c.g), c.approach}};
        s.validate();
        return s;
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("schedule: ") + e.what());
    }
}

/// Resolves every id referenced by the config and builds the model; any
/// dangling reference is a config error.
inline Model make_model(const config::RunConfig& cfg) {
    using detail::need;
    using detail::need_id;
    Model m;
    const auto& g = need(cfg.grid, "grid");
    try {
        m.grid = GridSpec(g.points_per_axis, g.dims, g.box_length);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    if (cfg.particles.empty()) throw ConfigError("config section 'particles' is required for this command");
    std::vector<Particle> ps;
    for (const auto& p : cfg.particles)
        ps.push_back({p.id, p.species == "electron" ? Species::electron : Species::nucleus, p.mass, p.charge, p.spin});
    try {
        m.particles = ParticleSet(std::move(ps));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("particles: ") + e.what());
    }
    std::set<int> known;
    for (const auto& p : cfg.particles) known.insert(p.id);

    m.schedule = cfg.schedule ? make_schedule(*cfg.schedule) : Schedule{};

    if (cfg.symmetry) {
        SymmetryDeclaration d{cfg.symmetry->bosonic, cfg.symmetry->fermionic};
        for (const auto* sets : {&d.bosonic_sets, &d.fermionic_sets})
            for (const auto& s : *sets)
                for (int id : s) need_id(known, id, "symmetry");
        try {
            d.validate(m.particles);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("symmetry: ") + e.what());
        }
        m.symmetry = d;
    }

    if (cfg.trap) {
        TrapSpec t;
        t.isotropic = cfg.trap->isotropic;
        for (const auto& n : cfg.trap->nuclei) {
            need_id(known, n.id, "trap");
            t.nucleus_ids.push_back(n.id);
            t.centers.push_back(n.center);
            t.frequencies.push_back(n.frequency);
        }
        try {
            t.validate(m.grid);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("trap: ") + e.what());
        }
        m.trap = t;
    }

    if (cfg.criterion) {
        GeometricCriterion c;
        c.mode = criterion_mode_from_string(cfg.criterion->mode);
        for (const auto& p : cfg.criterion->pairs) {
            need_id(known, p.j, "criterion");
            need_id(known, p.k, "criterion");
            c.pairs.push_back({p.j, p.k, p.value});
        }
        c.epsilon = cfg.criterion->epsilon;
        if (cfg.criterion->symmetrize) c.symmetrize_over = need(m.symmetry, "symmetry");
        try {
            c.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("criterion: ") + e.what());
        }
        m.criterion = c;
    }

    if (cfg.partition) {
        PartitionSpec p;
        p.subsystem_a = cfg.partition->subsystem_a;
        p.subsystem_b = cfg.partition->subsystem_b;
        for (int id : p.subsystem_a) need_id(known, id, "partition");
        for (int id : p.subsystem_b) need_id(known, id, "partition");
        p.softening = cfg.partition->softening;
        p.trap = m.trap;
        m.partition = p;
    }
    return m;
}

/// Result of one subcommand: files to write (relative names) and a status.
struct Artifacts {
    std::map<std::string, std::string> files;
};

inline void write_all(const Artifacts& a, const fs::path& dir) {
    for (const auto& [name, content] : a.files) io::atomic_write(dir / name, content);
}

inline ScheduledHamiltonian model_hamiltonian(const Model& m, const Basis& basis, bool zero = false) {
    if (zero) {
        ScheduledHamiltonian sh;
        sh.h_a = OperatorBlock::zero(basis.size(), OperatorTag::composite);
        sh.h_b = sh.h_a;
        sh.h_ab = OperatorBlock::zero(basis.size(), OperatorTag::coulomb);
        sh.v_trap = OperatorBlock::zero(basis.size(), OperatorTag::trap);
        sh.schedule = m.schedule;
        return sh;
    }
    return build_scheduled_hamiltonian(basis, detail::need(m.partition, "partition"), m.schedule);
}

inline Vector initial_vector(const config::InitialStateConfig& c, const ScheduledHamiltonian& sh) {
    const auto n = sh.dim();
    if (c.index >= n) throw ConfigError("initial state index " + std::to_string(c.index) + " exceeds dimension");
    if (c.kind == "basis_state") {
        Vector v = Vector::Zero(n);
        v[c.index] = 1.0;
        return v;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sh.evaluate_matrix(c.s));
    Vector v = eig.eigenvectors().col(c.index);
    // Global phase pinned by the largest component.
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    v *= std::polar(1.0, -std::arg(v[k]));
    return v / v.norm();
}

inline json populations(const DensityMatrix& rho) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < rho.dim(); ++i) arr.push_back(rho.matrix()(i, i).real());
    return arr;
}

inline Artifacts cmd_evolve(const config::RunConfig& cfg) {
    const auto& e = detail::need(cfg.evolve, "evolve");
    const Model m = make_model(cfg);
    const Basis basis = enumerate_basis(m.grid, m.particles);
    const ScheduledHamiltonian sh = model_hamiltonian(m, basis, e.hamiltonian == "zero");
    const Vector psi0 = initial_vector(e.initial, sh);
    const double s_to = e.s_to.value_or(m.schedule.s1);
    const int steps = e.steps > 0 ? e.steps : default_steps(sh, e.s_from, s_to);
    const auto report = propagate(DensityMatrix::from_pure(psi0), sh, e.s_from, s_to, steps);

    json out = {{"command", "evolve"},
                {"seed", cfg.seed},
                {"dimension", basis.size()},
                {"hamiltonian", e.hamiltonian},
                {"s_from", e.s_from},
                {"s_to", s_to},
                {"steps", report.steps},
                {"norm_drift", report.norm_drift},
                {"final_trace", report.final_state.trace()},
                {"final_purity", report.final_state.purity()},
                {"final_populations", populations(report.final_state)}};
    Artifacts a;
    if (e.correlation) {
        const auto& c = *e.correlation;
        const auto series = autocorrelation(psi0, sh, c.s, c.t_max, c.samples);
        const auto spec = spectrum(series, c.window == "hann" ? Window::hann : Window::rectangular);
        std::ostringstream cs, ss;
        write_correlation_csv(cs, series);
        write_spectrum_csv(ss, spec);
        a.files["correlation.csv"] = cs.str();
        a.files["spectrum.csv"] = ss.str();
        double lo = 1e300, hi = 0.0;
        for (const auto& p : series) {
            lo = std::min(lo, std::abs(p.c));
            hi = std::max(hi, std::abs(p.c));
        }
        out["correlation"] = {{"samples", series.size()}, {"abs_min", lo}, {"abs_max", hi}};
    }
    a.files["evolve_report.json"] = io::dump(out);
    return a;
}

inline Artifacts cmd_measure(const config::RunConfig& cfg) {
    const auto& mc = detail::need(cfg.measure, "measure");
    const Model m = make_model(cfg);
    const Basis basis = enumerate_basis(m.grid, m.particles);
    const ScheduledHamiltonian sh = model_hamiltonian(m, basis);
    const Bipartition bip = bipartition(detail::need(m.criterion, "criterion"), basis);
    const int steps = mc.steps > 0 ? mc.steps : default_steps(sh, 0.0, m.schedule.s1);
    const SweepUnitary unitary = sweep_unitary(sh, 0.0, m.schedule.s1, steps);
    auto sweep = [&](const DensityMatrix& rho) { return unitary.apply(rho); };

    DensityMatrix state = DensityMatrix::from_pure(initial_vector(mc.initial, sh));
    if (mc.propagate) state = sweep(state);
    const double p_suc = p_success_weight(state, bip);

    Rng rng(derive_seed(cfg.seed, "measure"));
    std::vector<TraceRecord> trace;
    json out = {{"command", "measure"}, {"seed", cfg.seed}, {"dimension", basis.size()},
                {"accepted_configurations", bip.set_a.size()}, {"p_suc", p_suc}};
    DensityMatrix post;
    if (mc.repeat) {
        RepeatOptions opts{mc.max_iters, DeltaSchedule{mc.delta, mc.ramp}, "measure", &trace};
        const auto r = repeat_until_success(state, bip, [&](const DensityMatrix& rho, int) { return sweep(rho); }, opts,
                                            rng);
        post = r.state;
        out["iterations"] = r.iterations;
        out["flag"] = 1;
    } else {
        WeakMeasurementSpec spec{bip, mc.delta, 0};
        spec.validate();
        const auto o = weak_measure(state, spec, rng);
        trace.push_back({"measure", 1, mc.delta, o.flag, o.p1, o.p_suc_before});
        post = o.post_state;
        out["flag"] = o.flag;
        out["p1"] = o.p1;
        out["p0"] = 1.0 - o.p1;
        out["outcome_probability"] = o.probability;
    }
    out["post_p_suc"] = p_success_weight(post, bip);
    if (m.symmetry) out["post_symmetry_deviation"] = symmetry_check(post, *m.symmetry, basis).max_deviation();
    Artifacts a;
    a.files["measure_report.json"] = io::dump(out);
    a.files["trace.jsonl"] = io::trace_jsonl(trace);
    return a;
}

inline json tree_report_json(const TreeRunReport& r, std::uint64_t seed, const ScatterTree& tree) {
    json nodes = json::array();
    for (const auto& id : tree.nodes) {
        const auto& n = r.nodes.at(id.id);
        nodes.push_back({{"id", n.id},
                         {"children", n.children},
                         {"status", n.status},
                         {"iterations", n.iterations},
                         {"merge_executions", n.merge_executions},
                         {"propagation_steps", n.propagation_steps},
                         {"p_suc_first", n.p_suc_first},
                         {"p1_success", n.p1_success},
                         {"input_dim", n.input_dim},
                         {"output_dim", n.output_dim}});
    }
    json out = {{"command", "tree"},
                {"seed", seed},
                {"root", tree.root},
                {"node_count", r.node_count},
                {"depth", tree.depth()},
                {"total_repetitions", r.total_repetitions},
                {"execution_order", r.execution_order},
                {"nodes", nodes},
                {"status", r.exhausted_node ? "node_exhausted" : "complete"}};
    if (r.exhausted_node) out["exhausted_node"] = *r.exhausted_node;
    if (r.final_state) out["final_dimension"] = r.final_state->dim();
    return out;
}

/// Physical node factory: each node's basis spans its leaves' particles in
/// child order, A is the first child's particle set, and only criterion pairs
/// and symmetry sets inside the node apply.
struct PhysicalTreePlan {
    std::map<std::string, std::vector<int>> members;
    std::map<std::string, DensityMatrix> leaf_states;
    NodeProcessFactory factory;
};

inline PhysicalTreePlan plan_physical(const config::RunConfig& cfg, const Model& m, const ScatterTree& tree) {
    const auto& tc = *cfg.tree;
    PhysicalTreePlan plan;
    std::set<int> used;
    for (const auto& l : tc.leaves) {
        if (l.particles.empty()) throw ConfigError("physical leaf " + l.id + " lists no particles");
        for (int id : l.particles) {
            if (!m.particles.position_of(id)) throw ConfigError("leaf " + l.id + " references unknown particle");
            if (!used.insert(id).second) throw ConfigError("particle " + std::to_string(id) + " used by two leaves");
        }
        plan.members[l.id] = l.particles;
    }
    for (const auto& n : tree.nodes) {
        std::vector<int> ids;
        for (const auto& c : n.children) ids.insert(ids.end(), plan.members[c].begin(), plan.members[c].end());
        plan.members[n.id] = ids;
    }

    auto trap_for = [&m](const std::vector<int>& ids) -> std::optional<TrapSpec> {
        if (!m.trap) return std::nullopt;
        TrapSpec t;
        t.isotropic = m.trap->isotropic;
        for (std::size_t j = 0; j < m.trap->nucleus_ids.size(); ++j)
            if (std::find(ids.begin(), ids.end(), m.trap->nucleus_ids[j]) != ids.end()) {
                t.nucleus_ids.push_back(m.trap->nucleus_ids[j]);
                t.centers.push_back(m.trap->centers[j]);
                t.frequencies.push_back(m.trap->frequencies[j]);
            }
        if (t.nucleus_ids.empty()) return std::nullopt;
        return t;
    };
    auto contains_all = [](const std::vector<int>& ids, const std::vector<int>& set) {
        return std::all_of(set.begin(), set.end(),
                           [&](int x) { return std::find(ids.begin(), ids.end(), x) != ids.end(); });
    };

    const double softening = cfg.partition && cfg.partition->softening ? *cfg.partition->softening : m.grid.spacing();
    for (const auto& l : tc.leaves) {
        const auto& ids = plan.members.at(l.id);
        const Basis b = enumerate_basis(m.grid, m.particles.subset(ids));
        PartitionSpec p{ids, {}, softening, trap_for(ids)};
        const auto sh = build_scheduled_hamiltonian(b, p, m.schedule);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sh.evaluate_matrix(m.schedule.s0));
        Vector v = eig.eigenvectors().col(0);
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::polar(1.0, -std::arg(v[k]));
        plan.leaf_states.emplace(l.id, DensityMatrix::from_pure(v / v.norm()));
    }

    const auto members = plan.members;
    plan.factory = [&m, tc, members, trap_for, contains_all, softening](const ScatterNode& node) {
        const auto& ids = members.at(node.id);
        PhysicalNodeSpec spec;
        spec.basis = enumerate_basis(m.grid, m.particles.subset(ids));
        std::vector<int> a = members.at(node.children.front());
        std::vector<int> b;
        for (std::size_t c = 1; c < node.children.size(); ++c)
            b.insert(b.end(), members.at(node.children[c]).begin(), members.at(node.children[c]).end());
        spec.partition = PartitionSpec{a, b, softening, trap_for(ids)};
        spec.schedule = m.schedule;
        GeometricCriterion crit;
        if (m.criterion) {
            crit.mode = m.criterion->mode;
            crit.epsilon = m.criterion->epsilon;
            for (const auto& pc : m.criterion->pairs)
                if (contains_all(ids, {pc.j, pc.k})) crit.pairs.push_back(pc);
            if (m.criterion->symmetrize_over) {
                SymmetryDeclaration d;
                for (const auto& s : m.criterion->symmetrize_over->bosonic_sets)
                    if (contains_all(ids, s)) d.bosonic_sets.push_back(s);
                for (const auto& s : m.criterion->symmetrize_over->fermionic_sets)
                    if (contains_all(ids, s)) d.fermionic_sets.push_back(s);
                if (!d.empty()) crit.symmetrize_over = d;
            }
        }
        spec.criterion = crit;
        spec.delta = DeltaSchedule{tc.delta, tc.ramp};
        spec.max_iters = tc.max_iters;
        spec.n_steps = tc.steps;
        spec.escalation = tc.escalation;
        spec.renaturalize = tc.renaturalize;
        return physical_node_process(spec);
    };
    return plan;
}

/// Runs the configured tree. On exhaustion the partial report and trace are
/// still returned in `artifacts`, and `exhausted` names the failing node.
struct TreeOutcome {
    Artifacts artifacts;
    std::optional<std::string> exhausted;
};

inline TreeOutcome cmd_tree(const config::RunConfig& cfg) {
    const auto& tc = detail::need(cfg.tree, "tree");
    if (tc.leaves.empty()) throw ConfigError("tree needs at least one leaf");
    std::vector<std::string> leaf_ids;
    for (const auto& l : tc.leaves) leaf_ids.push_back(l.id);
    ScatterTree tree;
    try {
        if (tc.nodes.empty()) {
            tree = plan_tree(leaf_ids, tc.arity);
        } else {
            tree.leaves = leaf_ids;
            for (const auto& n : tc.nodes) tree.nodes.push_back({n.id, n.children});
            tree.root = tc.nodes.back().id;
        }
        tree.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("tree: ") + e.what());
    }

    std::map<std::string, DensityMatrix> leaf_states;
    NodeProcessFactory factory;
    std::optional<Model> model;
    PhysicalTreePlan plan;
    if (tc.mode == "synthetic") {
        for (const auto& id : leaf_ids) leaf_states.emplace(id, DensityMatrix::basis_state(1, 0));
        factory = [tc](const ScatterNode&) {
            NodeProcess p = synthetic_node_process(tc.success_probability, tc.max_iters);
            p.delta = DeltaSchedule{tc.delta, tc.ramp};
            return p;
        };
    } else {
        model = make_model(cfg);
        plan = plan_physical(cfg, *model, tree);
        leaf_states = plan.leaf_states;
        factory = plan.factory;
    }

    TreeOutcome out;
    TreeRunReport report;
    try {
        report = run_tree(tree, leaf_states, cfg.seed, factory);
    } catch (const NodeExhausted& e) {
        report = e.report();
        out.exhausted = e.node_id();
    }
    out.artifacts.files["tree_report.json"] = io::dump(tree_report_json(report, cfg.seed, tree));
    out.artifacts.files["trace.jsonl"] = io::trace_jsonl(report.trace);
    return out;
}

inline LZInput lz_input(const config::LZConfig& c) {
    return LZInput{c.mass_1, c.mass_2, c.mass_unit, c.omega, c.omega_unit, c.omega_a, c.omega_a_unit, 1.0, c.velocity_unit};
}

inline Artifacts cmd_lz(const config::RunConfig& cfg) {
    const auto& c = detail::need(cfg.lz, "lz");
    LZParams base;
    std::vector<double> speeds;
    try {
        base = lz_input(c).to_params();
        for (double v : log_space(c.v_min, c.v_max, c.count)) speeds.push_back(velocity_to_atomic(v, c.velocity_unit));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("lz: ") + e.what());
    }
    const auto rows = lz_sweep_v(base, speeds);
    Artifacts a;
    if (cfg.output.format == "csv") {
        std::ostringstream os;
        write_lz_csv(os, rows);
        a.files["lz.csv"] = os.str();
    } else {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"v_au", r.params.v}, {"p_lz", r.result.p_lz}, {"p_lz_bound", r.result.p_lz_bound},
                           {"p_suc", r.result.p_suc}});
        a.files["lz.json"] = io::dump({{"command", "lz"},
                                       {"mu_me", base.mu},
                                       {"omega_au", base.omega},
                                       {"omega_a_au", base.omega_a},
                                       {"relative_binding", base.relative_binding()},
                                       {"harmonic_length_bohr", base.harmonic_length()},
                                       {"omega_eff_sq_au", rows.empty() ? 0.0 : rows.front().result.omega_eff_sq},
                                       {"d_e_mol_au", rows.empty() ? 0.0 : rows.front().result.d_e_mol},
                                       {"rows", arr}});
    }
    return a;
}

inline CostParams cost_params(const config::CostRowConfig& r) {
    return {r.n_el, r.n_nuc, r.grid_points, r.box_volume, r.trap_volume, r.omega_max, r.m_max};
}

inline Artifacts cmd_cost(const config::RunConfig& cfg) {
    const auto& c = detail::need(cfg.cost, "cost");
    std::vector<CostParams> rows;
    for (const auto& r : c.rows) rows.push_back(cost_params(r));
    Artifacts a;
    if (cfg.output.format == "csv") {
        std::ostringstream os;
        write_cost_csv(os, rows, c.bits);
        a.files["cost.csv"] = os.str();
    } else {
        json arr = json::array();
        for (const auto& p : rows) {
            const auto al = alpha_factors(p);
            const auto e = lcu_query_model(p, c.bits);
            arr.push_back({{"alpha_t", al.kinetic},
                           {"alpha_v", al.coulomb},
                           {"alpha_u", al.external},
                           {"alpha_trap", al.trap},
                           {"prep_branches", e.prep_branches},
                           {"prep_qubits", e.prep_qubits},
                           {"sel_ancillas", e.sel_ancillas},
                           {"schedule_oracles", e.schedule_oracles},
                           {"repetitions", e.repetitions}});
        }
        a.files["cost.json"] = io::dump({{"command", "cost"}, {"bits", c.bits}, {"units", "scaling"}, {"rows", arr}});
    }
    return a;
}

inline Artifacts cmd_validate(const config::RunConfig& cfg) {
    const Model m = make_model(cfg);
    const auto& decl = detail::need(m.symmetry, "symmetry");
    const auto& crit = detail::need(m.criterion, "criterion");
    const Basis basis = enumerate_basis(m.grid, m.particles);
    const auto v = validate_symmetric(crit, decl, basis, derive_seed(cfg.seed, "validate"));
    json out = {{"command", "validate"},
                {"dimension", basis.size()},
                {"symmetric", v.symmetric},
                {"exhaustive", v.exhaustive},
                {"checked", v.checked}};
    if (v.counterexample) {
        const auto& ce = *v.counterexample;
        out["counterexample"] = {{"configuration_index", ce.configuration_index},
                                 {"permutation", ce.permutation.image},
                                 {"sign", ce.permutation.sign}};
    }
    Artifacts a;
    a.files["validate_report.json"] = io::dump(out);
    return a;
}

}  // namespace mergo::app

#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mergo/errors.hpp"
#include "mergo/units.hpp"

namespace mergo::config {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct GridConfig {
    int points_per_axis = 1;
    int dims = 1;
    double box_length = 1.0;
    bool operator==(const GridConfig&) const = default;
};

struct ParticleConfig {
    int id = 0;
    std::string species = "nucleus";  // electron | nucleus
    double mass = 1.0;                 // electron masses
    double charge = 1.0;
    bool spin = false;
    bool operator==(const ParticleConfig&) const = default;
};

struct SymmetryConfig {
    std::vector<std::vector<int>> bosonic;
    std::vector<std::vector<int>> fermionic;
    bool operator==(const SymmetryConfig&) const = default;
};

struct PartitionConfig {
    std::vector<int> subsystem_a;
    std::vector<int> subsystem_b;
    std::optional<double> softening;
    bool operator==(const PartitionConfig&) const = default;
};

struct TrapNucleusConfig {
    int id = 0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> frequency{0.0, 0.0, 0.0};  // atomic units
    bool operator==(const TrapNucleusConfig&) const = default;
};

struct TrapConfig {
    std::vector<TrapNucleusConfig> nuclei;
    bool isotropic = true;
    bool operator==(const TrapConfig&) const = default;
};

struct ScheduleConfig {
    double s0 = 1.0;
    double s1 = 2.0;
    std::string f = "smoothstep";
    std::string g = "smoothstep";
    double approach = 1.0;
    bool operator==(const ScheduleConfig&) const = default;
};

struct PairConfig {
    int j = 0;
    int k = 0;
    double value = 0.0;  // Bohr
    bool operator==(const PairConfig&) const = default;
};

struct CriterionConfig {
    std::string mode = "proximity";
    std::vector<PairConfig> pairs;
    double epsilon = 0.0;  // Bohr
    bool symmetrize = false;
    bool operator==(const CriterionConfig&) const = default;
};

/// Initial state: a basis configuration index, or the k-th eigenvector of H(s).
struct InitialStateConfig {
    std::string kind = "basis_state";  // basis_state | eigenstate
    int index = 0;
    double s = 0.0;
    bool operator==(const InitialStateConfig&) const = default;
};

struct CorrelationConfig {
    double s = 0.0;
    double t_max = 10.0;
    int samples = 256;
    std::string window = "hann";
    bool operator==(const CorrelationConfig&) const = default;
};

struct EvolveConfig {
    std::string hamiltonian = "scheduled";  // scheduled | zero
    InitialStateConfig initial;
    double s_from = 0.0;
    std::optional<double> s_to;  // defaults to s1
    int steps = 0;               // 0 selects an automatic step count
    std::optional<CorrelationConfig> correlation;
    bool operator==(const EvolveConfig&) const = default;
};

struct MeasureConfig {
    double delta = 1.5707963267948966;
    double ramp = 1.0;
    InitialStateConfig initial;
    bool propagate = true;
    int steps = 0;
    bool repeat = false;
    int max_iters = 50;
    bool operator==(const MeasureConfig&) const = default;
};

struct LeafConfig {
    std::string id;
    std::vector<int> particles;  // physical mode only
    bool operator==(const LeafConfig&) const = default;
};

/// Explicit internal node; overrides the planner when any are given.
struct NodeConfig {
    std::string id;
    std::vector<std::string> children;
    bool operator==(const NodeConfig&) const = default;
};

struct TreeConfig {
    std::string mode = "synthetic";  // synthetic | physical
    std::vector<LeafConfig> leaves;
    std::vector<NodeConfig> nodes;  // children before parents; the last node is the root
    int arity = 2;
    double success_probability = 0.5;
    int max_iters = 1000;
    double delta = 1.5707963267948966;
    double ramp = 1.0;
    double escalation = 1.0;
    int steps = 0;
    bool renaturalize = true;
    bool operator==(const TreeConfig&) const = default;
};

struct LZConfig {
    double mass_1 = 0.0;
    double mass_2 = 0.0;
    std::string mass_unit = "u";
    double omega = 0.0;
    std::string omega_unit = "kHz";
    double omega_a = 0.0;
    std::string omega_a_unit = "kHz";
    std::string velocity_unit = "a.u.";
    double v_min = 1e-12;
    double v_max = 1e-5;
    int count = 57;
    bool operator==(const LZConfig&) const = default;
};

struct CostRowConfig {
    double n_el = 0.0;
    double n_nuc = 1.0;
    double grid_points = 1.0;
    double box_volume = 1.0;
    double trap_volume = 1.0;
    double omega_max = 1.0;
    double m_max = 1.0;
    bool operator==(const CostRowConfig&) const = default;
};

struct CostConfig {
    int bits = 16;
    std::vector<CostRowConfig> rows;
    bool operator==(const CostConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";
    std::string format = "json";  // json | csv
    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 0;
    std::optional<GridConfig> grid;
    std::vector<ParticleConfig> particles;
    std::optional<SymmetryConfig> symmetry;
    std::optional<PartitionConfig> partition;
    std::optional<TrapConfig> trap;
    std::optional<ScheduleConfig> schedule;
    std::optional<CriterionConfig> criterion;
    std::optional<EvolveConfig> evolve;
    std::optional<MeasureConfig> measure;
    std::optional<TreeConfig> tree;
    std::optional<LZConfig> lz;
    std::optional<CostConfig> cost;
    OutputConfig output;
    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown key '" + path + "." + it.key() + "'");
}

template <typename T>
T get_as(const json& v, const std::string& path) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("wrong type at '" + path + "'");
    }
}

template <typename T>
T required(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError("missing required key '" + path + "." + key + "'");
    return get_as<T>(j.at(key), path + "." + key);
}

template <typename T>
void optional_into(const json& j, const char* key, const std::string& path, T& out) {
    if (j.contains(key)) out = get_as<T>(j.at(key), path + "." + key);
}

template <typename T>
void optional_into(const json& j, const char* key, const std::string& path, std::optional<T>& out) {
    if (j.contains(key)) out = get_as<T>(j.at(key), path + "." + key);
}

/// A scalar value or a value with a unit: 3.0 or {"value": 3.0, "unit": "pm"}.
inline double quantity(const json& v, const std::string& path, const std::string& canonical) {
    if (v.is_number()) return v.get<double>();
    if (v.is_object()) {
        reject_unknown(v, path, {"value", "unit"});
        const double x = required<double>(v, "value", path);
        const auto unit = required<std::string>(v, "unit", path);
        try {
            return units::convert(x, unit, canonical);
        } catch (const UnsupportedUnit& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    throw ConfigError("'" + path + "' must be a number or {value, unit}");
}

inline std::array<double, 3> triple(const json& v, const std::string& path) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (v.is_number()) {
        out.fill(v.get<double>());
        return out;
    }
    const auto xs = get_as<std::vector<double>>(v, path);
    if (xs.empty() || xs.size() > 3) throw ConfigError("'" + path + "' needs 1 to 3 components");
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i];
    return out;
}

inline InitialStateConfig parse_initial(const json& j, const std::string& path) {
    reject_unknown(j, path, {"kind", "index", "s"});
    InitialStateConfig c;
    optional_into(j, "kind", path, c.kind);
    optional_into(j, "index", path, c.index);
    optional_into(j, "s", path, c.s);
    if (c.kind != "basis_state" && c.kind != "eigenstate")
        throw ConfigError(path + ".kind must be basis_state or eigenstate");
    if (c.index < 0) throw ConfigError(path + ".index must be non-negative");
    return c;
}

inline json emit_initial(const InitialStateConfig& c) { return {{"kind", c.kind}, {"index", c.index}, {"s", c.s}}; }

}  // namespace detail

inline RunConfig parse(const json& root) {
    using namespace detail;
    reject_unknown(root, "$", {"schema_version", "seed", "grid", "particles", "symmetry", "partition", "trap",
                               "schedule", "criterion", "evolve", "measure", "tree", "lz", "cost", "output"});
    RunConfig c;
    c.schema_version = required<int>(root, "schema_version", "$");
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    optional_into(root, "seed", "$", c.seed);

    if (root.contains("grid")) {
        const auto& j = root.at("grid");
        reject_unknown(j, "$.grid", {"points_per_axis", "dims", "box_length"});
        GridConfig g;
        g.points_per_axis = required<int>(j, "points_per_axis", "$.grid");
        g.dims = required<int>(j, "dims", "$.grid");
        if (!j.contains("box_length")) throw ConfigError("missing required key '$.grid.box_length'");
        g.box_length = quantity(j.at("box_length"), "$.grid.box_length", "bohr");
        c.grid = g;
    }

    if (root.contains("particles")) {
        const auto& arr = root.at("particles");
        if (!arr.is_array()) throw ConfigError("$.particles must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.particles[" + std::to_string(i) + "]";
            const auto& j = arr[i];
            reject_unknown(j, path, {"id", "species", "mass", "charge", "spin"});
            ParticleConfig p;
            p.id = required<int>(j, "id", path);
            p.species = required<std::string>(j, "species", path);
            if (p.species != "electron" && p.species != "nucleus")
                throw ConfigError(path + ".species must be electron or nucleus");
            if (p.species == "electron") {
                p.mass = 1.0;
                p.charge = -1.0;
            }
            if (j.contains("mass")) p.mass = quantity(j.at("mass"), path + ".mass", "me");
            optional_into(j, "charge", path, p.charge);
            optional_into(j, "spin", path, p.spin);
            c.particles.push_back(p);
        }
    }

    if (root.contains("symmetry")) {
        const auto& j = root.at("symmetry");
        reject_unknown(j, "$.symmetry", {"bosonic", "fermionic"});
        SymmetryConfig s;
        optional_into(j, "bosonic", "$.symmetry", s.bosonic);
        optional_into(j, "fermionic", "$.symmetry", s.fermionic);
        c.symmetry = s;
    }

    if (root.contains("partition")) {
        const auto& j = root.at("partition");
        reject_unknown(j, "$.partition", {"subsystem_a", "subsystem_b", "softening"});
        PartitionConfig p;
        p.subsystem_a = required<std::vector<int>>(j, "subsystem_a", "$.partition");
        p.subsystem_b = required<std::vector<int>>(j, "subsystem_b", "$.partition");
        if (j.contains("softening")) p.softening = quantity(j.at("softening"), "$.partition.softening", "bohr");
        c.partition = p;
    }

    if (root.contains("trap")) {
        const auto& j = root.at("trap");
        reject_unknown(j, "$.trap", {"nuclei", "isotropic"});
        TrapConfig t;
        optional_into(j, "isotropic", "$.trap", t.isotropic);
        if (!j.contains("nuclei") || !j.at("nuclei").is_array()) throw ConfigError("$.trap.nuclei must be an array");
        const auto& arr = j.at("nuclei");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.trap.nuclei[" + std::to_string(i) + "]";
            reject_unknown(arr[i], path, {"id", "center", "frequency"});
            TrapNucleusConfig n;
            n.id = required<int>(arr[i], "id", path);
            if (!arr[i].contains("center") || !arr[i].contains("frequency"))
                throw ConfigError(path + " needs center and frequency");
            n.center = triple(arr[i].at("center"), path + ".center");
            n.frequency = triple(arr[i].at("frequency"), path + ".frequency");
            t.nuclei.push_back(n);
        }
        c.trap = t;
    }

    if (root.contains("schedule")) {
        const auto& j = root.at("schedule");
        reject_unknown(j, "$.schedule", {"s0", "s1", "f", "g", "approach"});
        ScheduleConfig s;
        optional_into(j, "s0", "$.schedule", s.s0);
        optional_into(j, "s1", "$.schedule", s.s1);
        optional_into(j, "f", "$.schedule", s.f);
        optional_into(j, "g", "$.schedule", s.g);
        optional_into(j, "approach", "$.schedule", s.approach);
        c.schedule = s;
    }

    if (root.contains("criterion")) {
        const auto& j = root.at("criterion");
        reject_unknown(j, "$.criterion", {"mode", "pairs", "epsilon", "unit", "symmetrize"});
        CriterionConfig k;
        k.mode = required<std::string>(j, "mode", "$.criterion");
        if (k.mode != "proximity" && k.mode != "equilibrium")
            throw ConfigError("$.criterion.mode must be proximity or equilibrium");
        std::string unit = "bohr";
        optional_into(j, "unit", "$.criterion", unit);
        double scale = 1.0;
        try {
            scale = units::convert(1.0, unit, "bohr");
        } catch (const UnsupportedUnit& e) {
            throw ConfigError(std::string("$.criterion.unit: ") + e.what());
        }
        if (!j.contains("pairs") || !j.at("pairs").is_array()) throw ConfigError("$.criterion.pairs must be an array");
        const auto& arr = j.at("pairs");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.criterion.pairs[" + std::to_string(i) + "]";
            reject_unknown(arr[i], path, {"j", "k", "value"});
            k.pairs.push_back({required<int>(arr[i], "j", path), required<int>(arr[i], "k", path),
                               required<double>(arr[i], "value", path) * scale});
        }
        double eps = 0.0;
        optional_into(j, "epsilon", "$.criterion", eps);
        k.epsilon = eps * scale;
        optional_into(j, "symmetrize", "$.criterion", k.symmetrize);
        c.criterion = k;
    }

    if (root.contains("evolve")) {
        const auto& j = root.at("evolve");
        reject_unknown(j, "$.evolve", {"hamiltonian", "initial", "s_from", "s_to", "steps", "correlation"});
        EvolveConfig e;
        optional_into(j, "hamiltonian", "$.evolve", e.hamiltonian);
        if (e.hamiltonian != "scheduled" && e.hamiltonian != "zero")
            throw ConfigError("$.evolve.hamiltonian must be scheduled or zero");
        if (j.contains("initial")) e.initial = parse_initial(j.at("initial"), "$.evolve.initial");
        optional_into(j, "s_from", "$.evolve", e.s_from);
        optional_into(j, "s_to", "$.evolve", e.s_to);
        optional_into(j, "steps", "$.evolve", e.steps);
        if (j.contains("correlation")) {
            const auto& cj = j.at("correlation");
            reject_unknown(cj, "$.evolve.correlation", {"s", "t_max", "samples", "window"});
            CorrelationConfig cc;
            optional_into(cj, "s", "$.evolve.correlation", cc.s);
            optional_into(cj, "t_max", "$.evolve.correlation", cc.t_max);
            optional_into(cj, "samples", "$.evolve.correlation", cc.samples);
            optional_into(cj, "window", "$.evolve.correlation", cc.window);
            if (cc.window != "hann" && cc.window != "rectangular")
                throw ConfigError("$.evolve.correlation.window must be hann or rectangular");
            e.correlation = cc;
        }
        c.evolve = e;
    }

    if (root.contains("measure")) {
        const auto& j = root.at("measure");
        reject_unknown(j, "$.measure",
                       {"delta", "ramp", "initial", "propagate", "steps", "repeat", "max_iters"});
        MeasureConfig m;
        m.delta = required<double>(j, "delta", "$.measure");
        optional_into(j, "ramp", "$.measure", m.ramp);
        if (j.contains("initial")) m.initial = parse_initial(j.at("initial"), "$.measure.initial");
        optional_into(j, "propagate", "$.measure", m.propagate);
        optional_into(j, "steps", "$.measure", m.steps);
        optional_into(j, "repeat", "$.measure", m.repeat);
        optional_into(j, "max_iters", "$.measure", m.max_iters);
        c.measure = m;
    }

    if (root.contains("tree")) {
        const auto& j = root.at("tree");
        reject_unknown(j, "$.tree", {"mode", "leaves", "nodes", "arity", "success_probability", "max_iters", "delta", "ramp",
                                     "escalation", "steps", "renaturalize"});
        TreeConfig t;
        t.mode = required<std::string>(j, "mode", "$.tree");
        if (t.mode != "synthetic" && t.mode != "physical")
            throw ConfigError("$.tree.mode must be synthetic or physical");
        if (!j.contains("leaves") || !j.at("leaves").is_array()) throw ConfigError("$.tree.leaves must be an array");
        const auto& arr = j.at("leaves");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.tree.leaves[" + std::to_string(i) + "]";
            if (arr[i].is_string()) {
                t.leaves.push_back({arr[i].get<std::string>(), {}});
                continue;
            }
            reject_unknown(arr[i], path, {"id", "particles"});
            LeafConfig l;
            l.id = required<std::string>(arr[i], "id", path);
            optional_into(arr[i], "particles", path, l.particles);
            t.leaves.push_back(l);
        }
        if (j.contains("nodes")) {
            const auto& nodes = j.at("nodes");
            if (!nodes.is_array()) throw ConfigError("$.tree.nodes must be an array");
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const std::string path = "$.tree.nodes[" + std::to_string(i) + "]";
                reject_unknown(nodes[i], path, {"id", "children"});
                t.nodes.push_back({required<std::string>(nodes[i], "id", path),
                                   required<std::vector<std::string>>(nodes[i], "children", path)});
            }
        }
        optional_into(j, "arity", "$.tree", t.arity);
        optional_into(j, "success_probability", "$.tree", t.success_probability);
        optional_into(j, "max_iters", "$.tree", t.max_iters);
        optional_into(j, "delta", "$.tree", t.delta);
        optional_into(j, "ramp", "$.tree", t.ramp);
        optional_into(j, "escalation", "$.tree", t.escalation);
        optional_into(j, "steps", "$.tree", t.steps);
        optional_into(j, "renaturalize", "$.tree", t.renaturalize);
        c.tree = t;
    }

    if (root.contains("lz")) {
        const auto& j = root.at("lz");
        reject_unknown(j, "$.lz", {"mass_1", "mass_2", "mass_unit", "omega", "omega_unit", "omega_a", "omega_a_unit",
                                   "velocity_unit", "v_min", "v_max", "count"});
        LZConfig l;
        l.mass_1 = required<double>(j, "mass_1", "$.lz");
        l.mass_2 = required<double>(j, "mass_2", "$.lz");
        l.omega = required<double>(j, "omega", "$.lz");
        l.omega_a = required<double>(j, "omega_a", "$.lz");
        optional_into(j, "mass_unit", "$.lz", l.mass_unit);
        optional_into(j, "omega_unit", "$.lz", l.omega_unit);
        optional_into(j, "omega_a_unit", "$.lz", l.omega_a_unit);
        optional_into(j, "velocity_unit", "$.lz", l.velocity_unit);
        optional_into(j, "v_min", "$.lz", l.v_min);
        optional_into(j, "v_max", "$.lz", l.v_max);
        optional_into(j, "count", "$.lz", l.count);
        c.lz = l;
    }

    if (root.contains("cost")) {
        const auto& j = root.at("cost");
        reject_unknown(j, "$.cost", {"bits", "rows"});
        CostConfig k;
        optional_into(j, "bits", "$.cost", k.bits);
        if (!j.contains("rows") || !j.at("rows").is_array()) throw ConfigError("$.cost.rows must be an array");
        const auto& arr = j.at("rows");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.cost.rows[" + std::to_string(i) + "]";
            reject_unknown(arr[i], path,
                           {"n_el", "n_nuc", "grid_points", "box_volume", "trap_volume", "omega_max", "m_max"});
            CostRowConfig r;
            r.n_el = required<double>(arr[i], "n_el", path);
            r.n_nuc = required<double>(arr[i], "n_nuc", path);
            r.grid_points = required<double>(arr[i], "grid_points", path);
            r.box_volume = required<double>(arr[i], "box_volume", path);
            r.trap_volume = required<double>(arr[i], "trap_volume", path);
            r.omega_max = required<double>(arr[i], "omega_max", path);
            optional_into(arr[i], "m_max", path, r.m_max);
            k.rows.push_back(r);
        }
        c.cost = k;
    }

    if (root.contains("output")) {
        const auto& j = root.at("output");
        reject_unknown(j, "$.output", {"dir", "format"});
        optional_into(j, "dir", "$.output", c.output.dir);
        optional_into(j, "format", "$.output", c.output.format);
        if (c.output.format != "json" && c.output.format != "csv")
            throw ConfigError("$.output.format must be json or csv");
    }
    return c;
}

/// Canonical JSON form: units resolved to Bohr / electron masses / atomic units.
inline json emit(const RunConfig& c) {
    json root;
    root["schema_version"] = c.schema_version;
    root["seed"] = c.seed;
    if (c.grid)
        root["grid"] = {{"points_per_axis", c.grid->points_per_axis},
                        {"dims", c.grid->dims},
                        {"box_length", c.grid->box_length}};
    if (!c.particles.empty()) {
        json arr = json::array();
        for (const auto& p : c.particles)
            arr.push_back({{"id", p.id}, {"species", p.species}, {"mass", p.mass}, {"charge", p.charge}, {"spin", p.spin}});
        root["particles"] = arr;
    }
    if (c.symmetry) root["symmetry"] = {{"bosonic", c.symmetry->bosonic}, {"fermionic", c.symmetry->fermionic}};
    if (c.partition) {
        json p = {{"subsystem_a", c.partition->subsystem_a}, {"subsystem_b", c.partition->subsystem_b}};
        if (c.partition->softening) p["softening"] = *c.partition->softening;
        root["partition"] = p;
    }
    if (c.trap) {
        json arr = json::array();
        for (const auto& n : c.trap->nuclei) arr.push_back({{"id", n.id}, {"center", n.center}, {"frequency", n.frequency}});
        root["trap"] = {{"nuclei", arr}, {"isotropic", c.trap->isotropic}};
    }
    if (c.schedule)
        root["schedule"] = {{"s0", c.schedule->s0}, {"s1", c.schedule->s1}, {"f", c.schedule->f},
                            {"g", c.schedule->g},   {"approach", c.schedule->approach}};
    if (c.criterion) {
        json arr = json::array();
        for (const auto& p : c.criterion->pairs) arr.push_back({{"j", p.j}, {"k", p.k}, {"value", p.value}});
        root["criterion"] = {{"mode", c.criterion->mode},
                             {"unit", "bohr"},
                             {"pairs", arr},
                             {"epsilon", c.criterion->epsilon},
                             {"symmetrize", c.criterion->symmetrize}};
    }
    if (c.evolve) {
        json e = {{"hamiltonian", c.evolve->hamiltonian},
                  {"initial", detail::emit_initial(c.evolve->initial)},
                  {"s_from", c.evolve->s_from},
                  {"steps", c.evolve->steps}};
        if (c.evolve->s_to) e["s_to"] = *c.evolve->s_to;
        if (const auto& k = c.evolve->correlation)
            e["correlation"] = {{"s", k->s}, {"t_max", k->t_max}, {"samples", k->samples}, {"window", k->window}};
        root["evolve"] = e;
    }
    if (c.measure)
        root["measure"] = {{"delta", c.measure->delta},         {"ramp", c.measure->ramp},
                           {"initial", detail::emit_initial(c.measure->initial)},
                           {"propagate", c.measure->propagate}, {"steps", c.measure->steps},
                           {"repeat", c.measure->repeat},       {"max_iters", c.measure->max_iters}};
    if (c.tree) {
        json arr = json::array();
        for (const auto& l : c.tree->leaves) arr.push_back({{"id", l.id}, {"particles", l.particles}});
        json nodes = json::array();
        for (const auto& n : c.tree->nodes) nodes.push_back({{"id", n.id}, {"children", n.children}});
        root["tree"] = {{"mode", c.tree->mode},
                        {"leaves", arr},
                        {"nodes", nodes},
                        {"arity", c.tree->arity},
                        {"success_probability", c.tree->success_probability},
                        {"max_iters", c.tree->max_iters},
                        {"delta", c.tree->delta},
                        {"ramp", c.tree->ramp},
                        {"escalation", c.tree->escalation},
                        {"steps", c.tree->steps},
                        {"renaturalize", c.tree->renaturalize}};
    }
    if (c.lz)
        root["lz"] = {{"mass_1", c.lz->mass_1},
                      {"mass_2", c.lz->mass_2},
                      {"mass_unit", c.lz->mass_unit},
                      {"omega", c.lz->omega},
                      {"omega_unit", c.lz->omega_unit},
                      {"omega_a", c.lz->omega_a},
                      {"omega_a_unit", c.lz->omega_a_unit},
                      {"velocity_unit", c.lz->velocity_unit},
                      {"v_min", c.lz->v_min},
                      {"v_max", c.lz->v_max},
                      {"count", c.lz->count}};
    if (c.cost) {
        json arr = json::array();
        for (const auto& r : c.cost->rows)
            arr.push_back({{"n_el", r.n_el},
                           {"n_nuc", r.n_nuc},
                           {"grid_points", r.grid_points},
                           {"box_volume", r.box_volume},
                           {"trap_volume", r.trap_volume},
                           {"omega_max", r.omega_max},
                           {"m_max", r.m_max}});
        root["cost"] = {{"bits", c.cost->bits}, {"rows", arr}};
    }
    root["output"] = {{"dir", c.output.dir}, {"format", c.output.format}};
    return root;
}

inline RunConfig parse_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse(j);
}

inline RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

}  // namespace mergo::config

#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "mergo/errors.hpp"
#include "mergo/rng.hpp"
#include "mergo/units.hpp"

namespace mergo {

enum class UnitSystem { atomic, si };

inline std::string to_string(UnitSystem u) { return u == UnitSystem::atomic ? "atomic" : "si"; }

/// Parameters of the two-fragment Landau-Zener estimate. Frequencies are
/// angular. In the atomic system hbar = 1 and lengths, masses and velocities
/// are in Bohr, electron masses and Bohr per atomic time unit; in the SI
/// system everything is in kg, rad/s and m/s.
struct LZParams {
    double mu = 0.0;
    double omega = 0.0;
    double omega_a = 0.0;
    double v = 0.0;
    UnitSystem system = UnitSystem::atomic;

    double hbar() const { return system == UnitSystem::atomic ? 1.0 : units::kHbarSI; }

    void validate() const {
        if (!(mu > 0.0 && omega > 0.0 && omega_a > 0.0 && v > 0.0))
            throw InvalidArgument("LZ parameters must all be strictly positive");
        if (!std::isfinite(harmonic_length())) throw InvalidArgument("harmonic length is not finite");
    }

    /// beta = sqrt(hbar / (mu omega)).
    double harmonic_length() const { return std::sqrt(hbar() / (mu * omega)); }

    /// E_a / (hbar omega) = omega_a / omega.
    double relative_binding() const { return omega_a / omega; }

    /// Same physical point expressed in SI units.
    LZParams to_si() const {
        if (system == UnitSystem::si) return *this;
        const double inv_t = 1.0 / units::kAuTimeSeconds;
        return {mu * units::kElectronMassKg, omega * inv_t, omega_a * inv_t, v * units::kAuVelocityMetersPerSecond,
                UnitSystem::si};
    }
};

inline double velocity_to_atomic(double v, const std::string& unit) {
    const auto info = units::lookup(unit);
    if (info.dimension != units::Dimension::velocity && info.dimension != units::Dimension::any)
        throw UnsupportedUnit("'" + unit + "' is not a velocity unit");
    return v * info.to_atomic;
}

/// Unit-tagged inputs: fragment masses, trap and threshold frequencies, speed.
/// Frequency units may be any energy unit (kHz is cyclic, so 1 kHz maps to
/// omega = 2 pi * 1e3 rad/s).
struct LZInput {
    double mass_1 = 0.0;
    double mass_2 = 0.0;
    std::string mass_unit = "u";
    double omega = 0.0;
    std::string omega_unit = "kHz";
    double omega_a = 0.0;
    std::string omega_a_unit = "kHz";
    double v = 0.0;
    std::string velocity_unit = "a.u.";

    LZParams to_params() const {
        const double m1 = units::convert(mass_1, mass_unit, "me");
        const double m2 = units::convert(mass_2, mass_unit, "me");
        if (!(m1 > 0.0 && m2 > 0.0)) throw InvalidArgument("fragment masses must be positive");
        LZParams p{m1 * m2 / (m1 + m2), units::convert(omega, omega_unit, "hartree"),
                   units::convert(omega_a, omega_a_unit, "hartree"), velocity_to_atomic(v, velocity_unit),
                   UnitSystem::atomic};
        p.validate();
        return p;
    }
};

/// <a|V|000>^2 = (2 hbar^2 / sqrt(pi)) omega_a^{1/2} omega^{3/2} exp(-(3 + omega_a/omega)/2).
inline double omega_eff_sq(const LZParams& p) {
    p.validate();
    const double h = p.hbar();
    return 2.0 * h * h / std::sqrt(units::kPi) * std::sqrt(p.omega_a) * std::pow(p.omega, 1.5) *
           std::exp(-0.5 * (3.0 + p.relative_binding()));
}

/// omega^2 Ea~^{1/2} exp(-Ea~), the proportional form without its constant.
inline double omega_eff_sq_proportional(const LZParams& p) {
    p.validate();
    const double e = p.relative_binding();
    return p.omega * p.omega * std::sqrt(e) * std::exp(-e);
}

/// Classical turning point of the relative coordinate at contact.
inline double contact_point(const LZParams& p) {
    p.validate();
    return p.harmonic_length() * std::sqrt(3.0 + p.relative_binding());
}

/// (hbar mu)^{1/2} omega (3 omega + omega_a)^{1/2}.
inline double d_E_mol(const LZParams& p) {
    p.validate();
    return std::sqrt(p.hbar() * p.mu) * p.omega * std::sqrt(3.0 * p.omega + p.omega_a);
}

/// Gradient of the separated-atom energy surface, taken flat.
inline double d_E_atom(const LZParams&) { return 0.0; }

struct LZResult {
    double omega_eff_sq = 0.0;
    double d_e_mol = 0.0;
    double exponent = 0.0;  // p_lz = exp(-exponent)
    double p_lz = 0.0;
    double p_lz_bound = 0.0;
    double p_suc = 0.0;
    double relative_binding = 0.0;
};

/// Simplified closed form in terms of the relative binding energy.
inline double p_landau_zener_bound(const LZParams& p) {
    p.validate();
    const double e = p.relative_binding();
    const double x = 4.0 * std::sqrt(units::kPi / p.mu) * std::sqrt(p.hbar() * p.omega * e / (3.0 + e)) *
                     std::exp(-0.5 * e - 1.5) / p.v;
    return std::exp(-x);
}

inline LZResult p_landau_zener(const LZParams& p) {
    p.validate();
    LZResult r;
    r.omega_eff_sq = omega_eff_sq(p);
    r.d_e_mol = d_E_mol(p);
    r.exponent = 2.0 * units::kPi * r.omega_eff_sq / (p.hbar() * std::abs(r.d_e_mol - d_E_atom(p)) * p.v);
    r.p_lz = std::exp(-r.exponent);
    r.p_lz_bound = p_landau_zener_bound(p);
    r.p_suc = 1.0 - r.p_lz;
    r.relative_binding = p.relative_binding();
    return r;
}

/// `count` speeds spaced logarithmically over [v_min, v_max] (inclusive).
inline std::vector<double> log_space(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi >= lo) || count < 1) throw InvalidArgument("log_space needs 0 < lo <= hi and count >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, t);
    }
    return out;
}

struct LZSweepRow {
    LZParams params;
    LZResult result;
};

inline std::vector<LZSweepRow> lz_sweep_v(LZParams base, const std::vector<double>& speeds) {
    std::vector<LZSweepRow> rows;
    rows.reserve(speeds.size());
    for (double v : speeds) {
        base.v = v;
        rows.push_back({base, p_landau_zener(base)});
    }
    return rows;
}

/// Full Cartesian grid over (omega, omega_a, mu, v), v varying fastest.
inline std::vector<LZSweepRow> lz_sweep_grid(const std::vector<double>& omegas, const std::vector<double>& omega_as,
                                             const std::vector<double>& mus, const std::vector<double>& speeds,
                                             UnitSystem system = UnitSystem::atomic) {
    std::vector<LZSweepRow> rows;
    for (double w : omegas)
        for (double wa : omega_as)
            for (double m : mus)
                for (double v : speeds) {
                    LZParams p{m, w, wa, v, system};
                    rows.push_back({p, p_landau_zener(p)});
                }
    return rows;
}

inline void write_lz_csv(std::ostream& os, const std::vector<LZSweepRow>& rows) {
    const bool si = !rows.empty() && rows.front().params.system == UnitSystem::si;
    if (si)
        os << "mu_kg,omega_rad_per_s,omega_a_rad_per_s,v_m_per_s";
    else
        os << "mu_me,omega_au,omega_a_au,v_au";
    os << ",relative_binding,omega_eff_sq,d_e_mol,p_lz,p_lz_bound,p_suc\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.params.mu << ',' << r.params.omega << ',' << r.params.omega_a << ',' << r.params.v << ','
           << r.result.relative_binding << ',' << r.result.omega_eff_sq << ',' << r.result.d_e_mol << ','
           << r.result.p_lz << ',' << r.result.p_lz_bound << ',' << r.result.p_suc << '\n';
}

/// Outcome of comparing the simplified bound against the full expression on
/// seeded random parameter points.
struct BoundCheck {
    int in_regime = 0;
    int out_of_regime = 0;  // Ea~ < 1, reported but not asserted
    int violations = 0;     // in-regime points where the bound is below the full value
    double worst_relative_gap = 0.0;
};

inline BoundCheck check_bound_ordering(std::uint64_t seed, int points = 1000, double rel_tol = 1e-12) {
    Rng rng(seed);
    BoundCheck out;
    for (int i = 0; i < points; ++i) {
        LZParams p;
        p.mu = std::pow(10.0, 3.0 + 3.0 * rng.uniform());
        p.omega = std::pow(10.0, -12.0 + 4.0 * rng.uniform());
        p.omega_a = p.omega * std::pow(10.0, -1.0 + 2.0 * rng.uniform());
        p.v = std::pow(10.0, -12.0 + 6.0 * rng.uniform());
        const auto r = p_landau_zener(p);
        if (r.relative_binding < 1.0) {
            ++out.out_of_regime;
            continue;
        }
        ++out.in_regime;
        if (r.p_lz > 0.0) {
            const double gap = (r.p_lz - r.p_lz_bound) / r.p_lz;
            out.worst_relative_gap = std::max(out.worst_relative_gap, gap);
        }
        if (r.p_lz_bound < r.p_lz * (1.0 - rel_tol)) ++out.violations;
    }
    return out;
}

/// Resource parameters of the block-encoded trap model.
struct CostParams {
    double n_el = 0.0;
    double n_nuc = 0.0;
    double grid_points = 0.0;  // N
    double box_volume = 0.0;   // Omega
    double trap_volume = 0.0;  // Omega_trap
    double omega_max = 0.0;
    double m_max = 1.0;

    void validate() const {
        if (!(n_el >= 0.0 && n_nuc > 0.0 && grid_points > 0.0 && box_volume > 0.0 && trap_volume > 0.0 &&
              omega_max > 0.0 && m_max > 0.0))
            throw InvalidArgument("cost parameters must be positive (n_el may be zero)");
        if (trap_volume > box_volume) throw InvalidArgument("trap volume exceeds box volume");
    }
};

/// Sub-normalization factors in scaling units (all big-O constants set to 1).
struct AlphaFactors {
    double kinetic = 0.0;   // n_el N^{2/3} / Omega^{2/3}
    double coulomb = 0.0;   // n_el^2 N^{1/3} / Omega^{1/3}
    double external = 0.0;  // same form as the Coulomb factor
    double trap = 0.0;      // N_nuc m_max omega_max^2 Omega_trap^{2/3}
};

inline AlphaFactors alpha_factors(const CostParams& c) {
    c.validate();
    AlphaFactors a;
    a.kinetic = c.n_el * std::cbrt(c.grid_points * c.grid_points) / std::cbrt(c.box_volume * c.box_volume);
    a.coulomb = c.n_el * c.n_el * std::cbrt(c.grid_points) / std::cbrt(c.box_volume);
    a.external = a.coulomb;
    a.trap = c.n_nuc * c.m_max * c.omega_max * c.omega_max * std::cbrt(c.trap_volume * c.trap_volume);
    return a;
}

/// Structured LCU estimate for the scheduled trap term; not a circuit.
struct LcuEstimate {
    int bits = 0;
    long prep_branches = 0;   // one per nucleus and axis
    long prep_qubits = 0;     // ceil(log2(prep_branches))
    long sel_ancillas = 0;    // g(s), coordinate, squared displacement and product registers
    long schedule_oracles = 2;
    double repetitions = 0.0;  // scaling units, proportional to alpha_trap (times s1 when given)
};

inline LcuEstimate lcu_query_model(const CostParams& c, int bits, double s1 = 1.0) {
    if (bits < 1) throw InvalidArgument("bits must be at least 1");
    if (!(s1 > 0.0)) throw InvalidArgument("s1 must be positive");
    const auto a = alpha_factors(c);
    LcuEstimate e;
    e.bits = bits;
    e.prep_branches = 3L * std::lround(c.n_nuc);
    e.prep_qubits = e.prep_branches <= 1 ? 0 : static_cast<long>(std::ceil(std::log2(static_cast<double>(e.prep_branches))));
    e.sel_ancillas = 4L * bits;
    e.repetitions = a.trap * s1;
    return e;
}

inline void write_cost_csv(std::ostream& os, const std::vector<CostParams>& rows, int bits) {
    os << "n_el,n_nuc,grid_points,box_volume_bohr3,trap_volume_bohr3,omega_max_au,m_max_me,"
          "alpha_t,alpha_v,alpha_u,alpha_trap,prep_branches,sel_ancillas,repetitions\n"
       << std::setprecision(17);
    for (const auto& c : rows) {
        const auto a = alpha_factors(c);
        const auto e = lcu_query_model(c, bits);
        os << c.n_el << ',' << c.n_nuc << ',' << c.grid_points << ',' << c.box_volume << ',' << c.trap_volume << ','
           << c.omega_max << ',' << c.m_max << ',' << a.kinetic << ',' << a.coulomb << ',' << a.external << ','
           << a.trap << ',' << e.prep_branches << ',' << e.sel_ancillas << ',' << e.repetitions << '\n';
    }
}

inline double unit_convert(double value, const std::string& from, const std::string& to) {
    return units::convert(value, from, to);
}

}  // namespace mergo

#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include "mergo/errors.hpp"

namespace mergo::units {

// CODATA 2018.
inline constexpr double kHartreeInvCm = 219474.6313632;       // cm^-1 per Hartree
inline constexpr double kHartreeKcalPerMol = 627.5094740631;  // kcal/mol per Hartree
inline constexpr double kAuTimeSeconds = 2.4188843265857e-17;
inline constexpr double kAmuElectronMasses = 1822.888486209;
inline constexpr double kSpeedOfLightCmPerS = 2.99792458e10;
inline constexpr double kPi = 3.14159265358979323846;

// SI values for unit-system cross-checks. hbar, the Bohr radius in pm and the
// atomic velocity unit are derived from the other constants so that converting
// a dimensionless quantity between systems is exact up to rounding.
inline constexpr double kElectronMassKg = 9.1093837015e-31;
inline constexpr double kBohrMeters = 5.29177210903e-11;
inline constexpr double kBohrPm = kBohrMeters * 1e12;
inline constexpr double kAuVelocityMetersPerSecond = kBohrMeters / kAuTimeSeconds;
inline constexpr double kHbarSI = kElectronMassKg * kBohrMeters * kBohrMeters / kAuTimeSeconds;  // J s
inline constexpr double kHartreeJoules = 4.3597447222071e-18;

enum class Dimension { energy, length, mass, velocity, any };

struct UnitInfo {
    Dimension dimension;
    double to_atomic;  // multiply a value in this unit to get atomic units
};

inline std::string normalize(std::string u) {
    u.erase(std::remove_if(u.begin(), u.end(), [](unsigned char c) { return std::isspace(c); }), u.end());
    std::string low;
    for (unsigned char c : u) low.push_back(static_cast<char>(std::tolower(c)));
    return low;
}

/// Frequencies in kHz are cyclic (E = h f); "a.u." energies are Hartree,
/// equal to angular frequency in atomic units.
inline UnitInfo lookup(const std::string& unit) {
    const std::string u = normalize(unit);
    if (u == "au" || u == "a.u.") return {Dimension::any, 1.0};
    if (u == "hartree" || u == "eh") return {Dimension::energy, 1.0};
    if (u == "khz") return {Dimension::energy, 1e3 * 2.0 * kPi * kAuTimeSeconds};
    if (u == "hz") return {Dimension::energy, 2.0 * kPi * kAuTimeSeconds};
    if (u == "cm-1" || u == "cm^-1" || u == "1/cm" || u == "cm⁻¹") return {Dimension::energy, 1.0 / kHartreeInvCm};
    if (u == "kcal/mol") return {Dimension::energy, 1.0 / kHartreeKcalPerMol};
    if (u == "bohr" || u == "a0") return {Dimension::length, 1.0};
    if (u == "pm") return {Dimension::length, 1.0 / kBohrPm};
    if (u == "u" || u == "amu" || u == "da") return {Dimension::mass, kAmuElectronMasses};
    if (u == "me") return {Dimension::mass, 1.0};
    if (u == "m/s") return {Dimension::velocity, 1.0 / kAuVelocityMetersPerSecond};
    throw UnsupportedUnit("unsupported unit '" + unit + "'");
}

/// Converts between units of the same dimension; "a.u." adopts the
/// dimension of the other side.
inline double convert(double value, const std::string& from, const std::string& to) {
    const UnitInfo a = lookup(from);
    const UnitInfo b = lookup(to);
    if (a.dimension != Dimension::any && b.dimension != Dimension::any && a.dimension != b.dimension)
        throw UnsupportedUnit("cannot convert '" + from + "' to '" + to + "'");
    return value * a.to_atomic / b.to_atomic;
}

inline double to_atomic(double value, const std::string& from) { return convert(value, from, "a.u."); }

}  // namespace mergo::units

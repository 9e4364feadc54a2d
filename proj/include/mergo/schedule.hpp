#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mergo/errors.hpp"

namespace mergo {

enum class ProfileKind { linear, smoothstep, coulomb };

inline std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::linear: return "linear";
        case ProfileKind::smoothstep: return "smoothstep";
        case ProfileKind::coulomb: return "coulomb";
    }
    return "linear";
}

inline ProfileKind profile_from_string(const std::string& s) {
    if (s == "linear") return ProfileKind::linear;
    if (s == "smoothstep") return ProfileKind::smoothstep;
    if (s == "coulomb") return ProfileKind::coulomb;
    throw InvalidArgument("unknown schedule profile '" + s + "'");
}

/// Monotone ramp on [0, 1] with shape(0) = 0 and shape(1) = 1.
///
/// The coulomb shape follows the interaction strength d/|dz(x)| of two centers
/// approaching linearly from (1 + approach) * d to d, rescaled to start at zero.
struct Profile {
    ProfileKind kind = ProfileKind::linear;
    double approach = 1.0;  // coulomb only: initial separation excess over the bond distance

    double operator()(double x) const {
        x = std::clamp(x, 0.0, 1.0);
        switch (kind) {
            case ProfileKind::linear: return x;
            case ProfileKind::smoothstep: return x * x * (3.0 - 2.0 * x);
            case ProfileKind::coulomb: {
                const double f0 = 1.0 / (1.0 + approach);
                const double ratio = 1.0 / (1.0 + approach * (1.0 - x));
                return (ratio - f0) / (1.0 - f0);
            }
        }
        return x;
    }

    friend bool operator==(const Profile&, const Profile&) = default;
};

/// f ramps 0 -> 1 on [0, s0] and stays at 1; g ramps 0 -> 1 on [0, s0]
/// and back to 0 on [s0, s1].
struct Schedule {
    double s0 = 1.0;
    double s1 = 2.0;
    Profile f_shape{};
    Profile g_shape{};

    void validate() const {
        if (!(s0 > 0.0) || !(s1 > s0))
            throw InvalidArgument("schedule requires 0 < s0 < s1");
        for (const auto* p : {&f_shape, &g_shape})
            if (p->kind == ProfileKind::coulomb && !(p->approach > 0.0))
                throw InvalidArgument("coulomb profile needs a positive approach ratio");
    }

    double f(double s) const {
        if (s >= s0) return 1.0;
        return f_shape(s / s0);
    }

    double g(double s) const {
        if (s <= s0) return g_shape(s / s0);
        if (s >= s1) return 0.0;
        return g_shape((s1 - s) / (s1 - s0));
    }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Interaction schedule that emulates two centers moving along a distance
/// trajectory: f = |center separation| / |distance(s)|, clamped to [0, 1] and
/// pinned to 1 once s >= s0.
inline std::vector<double> coulomb_mimicking_f(const Schedule& schedule, std::span<const double> s,
                                               std::span<const double> distance,
                                               double center_separation) {
    if (s.size() != distance.size())
        throw InvalidArgument("s grid and distance trajectory differ in length");
    if (!(center_separation > 0.0)) throw NonpositiveDistance("center separation must be positive");
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(distance[i] > 0.0))
            throw NonpositiveDistance("distance trajectory must be strictly positive");
        f[i] = s[i] >= schedule.s0 ? 1.0 : std::clamp(center_separation / distance[i], 0.0, 1.0);
    }
    return f;
}

/// Evolution speed diagnostic max(|dz/df * f'(s)|, |dz/dg * g'(s)|) with
/// central-difference derivatives of the schedule.
inline double schedule_speed(const Schedule& schedule, double s_star, double dz_df, double dz_dg,
                             double h = 1e-6) {
    const double lo = std::max(0.0, s_star - h);
    const double hi = std::min(schedule.s1, s_star + h);
    const double df = (schedule.f(hi) - schedule.f(lo)) / (hi - lo);
    const double dg = (schedule.g(hi) - schedule.g(lo)) / (hi - lo);
    return std::max(std::abs(dz_df * df), std::abs(dz_dg * dg));
}

}  // namespace mergo

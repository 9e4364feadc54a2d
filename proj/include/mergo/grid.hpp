#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mergo/errors.hpp"

namespace mergo {

/// Integer lattice point. Axes beyond GridSpec::dims are held at zero.
using LatticePoint = std::array<int, 3>;
using Coord = std::array<double, 3>;

/// Real-space grid of m^dims points labelling the lattice
/// [-(m-1)/2, (m-1)/2]^dims inside the box [-L/2, L/2]^dims (Bohr).
struct GridSpec {
    int points_per_axis = 1;
    int dims = 1;
    double box_length = 1.0;

    GridSpec() = default;
    GridSpec(int m, int d, double length) : points_per_axis(m), dims(d), box_length(length) {
        validate();
    }

    void validate() const {
        if (points_per_axis < 1 || points_per_axis % 2 == 0)
            throw InvalidArgument("points_per_axis must be a positive odd integer, got " +
                                  std::to_string(points_per_axis));
        if (dims < 1 || dims > 3)
            throw InvalidArgument("dims must be 1, 2 or 3, got " + std::to_string(dims));
        if (!(box_length > 0.0) || !std::isfinite(box_length))
            throw InvalidArgument("box_length must be positive");
    }

    int half_extent() const { return (points_per_axis - 1) / 2; }
    double spacing() const { return box_length / points_per_axis; }
    double volume() const { return std::pow(box_length, dims); }

    std::size_t num_points() const {
        std::size_t n = 1;
        for (int a = 0; a < dims; ++a) n *= static_cast<std::size_t>(points_per_axis);
        return n;
    }

    bool contains(const LatticePoint& p) const {
        for (int a = 0; a < 3; ++a) {
            if (a < dims) {
                if (p[a] < -half_extent() || p[a] > half_extent()) return false;
            } else if (p[a] != 0) {
                return false;
            }
        }
        return true;
    }

    bool contains(const Coord& x) const {
        for (int a = 0; a < dims; ++a)
            if (std::abs(x[a]) > 0.5 * box_length) return false;
        return true;
    }

    /// Lexicographic index of a lattice point, axis 0 most significant.
    std::size_t spatial_index(const LatticePoint& p) const {
        std::size_t idx = 0;
        for (int a = 0; a < dims; ++a)
            idx = idx * points_per_axis + static_cast<std::size_t>(p[a] + half_extent());
        return idx;
    }

    LatticePoint point_at(std::size_t idx) const {
        LatticePoint p{0, 0, 0};
        for (int a = dims - 1; a >= 0; --a) {
            p[a] = static_cast<int>(idx % points_per_axis) - half_extent();
            idx /= points_per_axis;
        }
        return p;
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Maps a lattice label to its coordinate p * (L/m), componentwise.
inline Coord label_to_coord(const GridSpec& grid, const LatticePoint& label) {
    if (!grid.contains(label))
        throw LabelOutOfRange("lattice label outside the grid");
    Coord x{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dims; ++a) x[a] = label[a] * grid.spacing();
    return x;
}

inline double distance(const Coord& a, const Coord& b) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

enum class Species { electron, nucleus };
enum class Spin : std::uint8_t { up = 0, down = 1 };

struct Particle {
    int id = 0;  // global register index, stable across subsets
    Species species = Species::electron;
    double mass = 1.0;     // electron masses
    double charge = -1.0;  // elementary charges
    bool spin = false;

    int spin_factor() const { return spin ? 2 : 1; }
    friend bool operator==(const Particle&, const Particle&) = default;
};

class ParticleSet {
public:
    ParticleSet() = default;
    explicit ParticleSet(std::vector<Particle> particles) : particles_(std::move(particles)) {
        validate();
    }

    /// Electrons first (ids 0..n_el-1), then nuclei in the given order.
    static ParticleSet molecular(int n_el, std::span<const double> nuclear_masses,
                                 std::span<const double> nuclear_charges,
                                 bool electron_spin = false, bool nuclear_spin = false) {
        if (n_el < 0) throw InvalidArgument("n_el must be non-negative");
        if (nuclear_masses.size() != nuclear_charges.size())
            throw InvalidArgument("nuclear masses and charges differ in length");
        std::vector<Particle> ps;
        int id = 0;
        for (int i = 0; i < n_el; ++i)
            ps.push_back({id++, Species::electron, 1.0, -1.0, electron_spin});
        for (std::size_t j = 0; j < nuclear_masses.size(); ++j)
            ps.push_back({id++, Species::nucleus, nuclear_masses[j], nuclear_charges[j], nuclear_spin});
        return ParticleSet(std::move(ps));
    }

    std::size_t size() const { return particles_.size(); }
    const Particle& operator[](std::size_t i) const { return particles_[i]; }
    const std::vector<Particle>& particles() const { return particles_; }
    auto begin() const { return particles_.begin(); }
    auto end() const { return particles_.end(); }

    std::size_t count(Species s) const {
        return static_cast<std::size_t>(std::count_if(
            particles_.begin(), particles_.end(), [s](const Particle& p) { return p.species == s; }));
    }

    std::optional<std::size_t> position_of(int id) const {
        for (std::size_t i = 0; i < particles_.size(); ++i)
            if (particles_[i].id == id) return i;
        return std::nullopt;
    }

    /// Particles with the given ids, in the given order.
    ParticleSet subset(std::span<const int> ids) const {
        std::vector<Particle> out;
        for (int id : ids) {
            auto pos = position_of(id);
            if (!pos) throw InvalidArgument("unknown particle id " + std::to_string(id));
            out.push_back(particles_[*pos]);
        }
        return ParticleSet(std::move(out));
    }

    /// Concatenation; ids must stay unique.
    ParticleSet concat(const ParticleSet& other) const {
        std::vector<Particle> out = particles_;
        out.insert(out.end(), other.particles_.begin(), other.particles_.end());
        return ParticleSet(std::move(out));
    }

    std::vector<int> ids() const {
        std::vector<int> out;
        for (const auto& p : particles_) out.push_back(p.id);
        return out;
    }

    friend bool operator==(const ParticleSet&, const ParticleSet&) = default;

private:
    void validate() const {
        for (std::size_t i = 0; i < particles_.size(); ++i) {
            const auto& p = particles_[i];
            if (!(p.mass > 0.0)) throw InvalidArgument("particle masses must be strictly positive");
            if (p.species == Species::electron && (p.mass != 1.0 || p.charge != -1.0))
                throw InvalidArgument("electrons carry mass 1 and charge -1");
            for (std::size_t j = 0; j < i; ++j)
                if (particles_[j].id == p.id)
                    throw InvalidArgument("duplicate particle id " + std::to_string(p.id));
        }
    }

    std::vector<Particle> particles_;
};

/// One basis label: a lattice point and a spin value per particle register.
struct Configuration {
    std::vector<LatticePoint> labels;
    std::vector<Spin> spins;  // Spin::up for registers without spin

    auto operator<=>(const Configuration&) const = default;
    bool operator==(const Configuration&) const = default;
};

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Enumerated many-body basis. Full product bases index arithmetically;
/// explicit subsets (closed under whatever group the caller cares about) use a lookup.
class Basis {
public:
    Basis() = default;

    const GridSpec& grid() const { return grid_; }
    const ParticleSet& particles() const { return particles_; }
    std::size_t size() const { return configs_.size(); }
    bool is_full_product() const { return full_; }

    const Configuration& configuration_at(std::size_t i) const { return configs_.at(i); }
    const std::vector<Configuration>& configurations() const { return configs_; }

    std::optional<std::size_t> find(const Configuration& c) const {
        if (c.labels.size() != particles_.size() || c.spins.size() != particles_.size())
            return std::nullopt;
        if (full_) {
            std::size_t idx = 0;
            for (std::size_t i = 0; i < particles_.size(); ++i) {
                if (!grid_.contains(c.labels[i])) return std::nullopt;
                const int sf = particles_[i].spin_factor();
                const auto s = static_cast<std::size_t>(c.spins[i]);
                if (sf == 1 && s != 0) return std::nullopt;
                idx = idx * (grid_.num_points() * sf) + grid_.spatial_index(c.labels[i]) * sf + s;
            }
            return idx;
        }
        auto it = lookup_.find(c);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(const Configuration& c) const {
        auto idx = find(c);
        if (!idx) throw LabelOutOfRange("configuration not in basis");
        return *idx;
    }

    friend Basis enumerate_basis(const GridSpec&, const ParticleSet&, std::size_t);
    friend Basis basis_from_configurations(const GridSpec&, const ParticleSet&,
                                           std::vector<Configuration>);

private:
    GridSpec grid_;
    ParticleSet particles_;
    std::vector<Configuration> configs_;
    std::map<Configuration, std::size_t> lookup_;
    bool full_ = false;
};

/// Product-basis dimension as a double so oversized requests do not overflow.
inline double basis_dimension(const GridSpec& grid, const ParticleSet& particles) {
    double dim = 1.0;
    for (const auto& p : particles) dim *= static_cast<double>(grid.num_points()) * p.spin_factor();
    return dim;
}

/// Lexicographic enumeration, particle 0 most significant; within a particle
/// the spatial label is more significant than the spin.
inline Basis enumerate_basis(const GridSpec& grid, const ParticleSet& particles,
                             std::size_t cap = kDefaultDimensionCap) {
    grid.validate();
    const double dim = basis_dimension(grid, particles);
    if (dim > static_cast<double>(cap))
        throw DimensionCapExceeded("basis dimension " + std::to_string(dim) + " exceeds cap " +
                                   std::to_string(cap));
    Basis b;
    b.grid_ = grid;
    b.particles_ = particles;
    b.full_ = true;
    const auto n = static_cast<std::size_t>(dim);
    const std::size_t np = particles.size();
    b.configs_.reserve(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        Configuration c;
        c.labels.resize(np);
        c.spins.resize(np);
        std::size_t rest = idx;
        for (std::size_t i = np; i-- > 0;) {
            const std::size_t sf = static_cast<std::size_t>(particles[i].spin_factor());
            const std::size_t local = rest % (grid.num_points() * sf);
            rest /= grid.num_points() * sf;
            c.labels[i] = grid.point_at(local / sf);
            c.spins[i] = static_cast<Spin>(local % sf);
        }
        b.configs_.push_back(std::move(c));
    }
    return b;
}

/// Basis over an explicit configuration list (sorted, deduplicated).
inline Basis basis_from_configurations(const GridSpec& grid, const ParticleSet& particles,
                                       std::vector<Configuration> configs) {
    grid.validate();
    for (const auto& c : configs) {
        if (c.labels.size() != particles.size() || c.spins.size() != particles.size())
            throw InvalidArgument("configuration length does not match particle count");
        for (std::size_t i = 0; i < c.labels.size(); ++i) {
            if (!grid.contains(c.labels[i])) throw LabelOutOfRange("configuration label outside grid");
            if (!particles[i].spin && c.spins[i] != Spin::up)
                throw InvalidArgument("spin set on a spinless register");
        }
    }
    std::sort(configs.begin(), configs.end());
    configs.erase(std::unique(configs.begin(), configs.end()), configs.end());
    Basis b;
    b.grid_ = grid;
    b.particles_ = particles;
    b.full_ = false;
    b.configs_ = std::move(configs);
    for (std::size_t i = 0; i < b.configs_.size(); ++i) b.lookup_.emplace(b.configs_[i], i);
    return b;
}

/// Coordinates of every particle in a configuration.
inline std::vector<Coord> coordinates(const GridSpec& grid, const Configuration& c) {
    std::vector<Coord> out;
    out.reserve(c.labels.size());
    for (const auto& p : c.labels) out.push_back(label_to_coord(grid, p));
    return out;
}

}  // namespace mergo

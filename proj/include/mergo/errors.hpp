#pragma once

#include <stdexcept>
#include <string>

namespace mergo {

/// Base class for every error raised by the library. `code()` is a stable,
/// machine-readable identifier used by the CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define MERGO_DEFINE_ERROR(Name, Code)                                         \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& message) : Error(Code, message) {}    \
    }

MERGO_DEFINE_ERROR(InvalidArgument, "invalid_argument");
MERGO_DEFINE_ERROR(DimensionCapExceeded, "dimension_cap_exceeded");
MERGO_DEFINE_ERROR(LabelOutOfRange, "label_out_of_range");
MERGO_DEFINE_ERROR(SingularCoulomb, "singular_coulomb");
MERGO_DEFINE_ERROR(CenterOutsideBox, "center_outside_box");
MERGO_DEFINE_ERROR(ScheduleOutOfRange, "schedule_out_of_range");
MERGO_DEFINE_ERROR(NonpositiveDistance, "nonpositive_distance");
MERGO_DEFINE_ERROR(NonHermitianHamiltonian, "non_hermitian_hamiltonian");
MERGO_DEFINE_ERROR(UnnormalizedInput, "unnormalized_input");
MERGO_DEFINE_ERROR(NonuniformGrid, "nonuniform_grid");
MERGO_DEFINE_ERROR(InvalidPermutation, "invalid_permutation");
MERGO_DEFINE_ERROR(VanishingNorm, "vanishing_norm");
MERGO_DEFINE_ERROR(PairIndexOutOfRange, "pair_index_out_of_range");
MERGO_DEFINE_ERROR(ZeroProbabilityBranch, "zero_probability_branch");
MERGO_DEFINE_ERROR(Degenerate, "degenerate");
MERGO_DEFINE_ERROR(MaxItersExceeded, "max_iters_exceeded");
MERGO_DEFINE_ERROR(EmptySector, "empty_sector");
MERGO_DEFINE_ERROR(UnsupportedUnit, "unsupported_unit");
MERGO_DEFINE_ERROR(ConfigError, "config_error");
MERGO_DEFINE_ERROR(InvalidState, "invalid_state");

#undef MERGO_DEFINE_ERROR

}  // namespace mergo

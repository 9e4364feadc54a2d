#include <gtest/gtest.h>

#include "mergo/lzcost.hpp"
#include "mergo/units.hpp"
#include "oracles.hpp"

using namespace mergo;

TEST(Units, KcalPerMolToWavenumbers) {
    const double x = unit_convert(100.0, "kcal/mol", "cm-1");
    EXPECT_NEAR(x, 100.0 * oracle::kCmPerKcalMol, 0.05);
    // Quoted as roughly 34,960 and rounded further to 35,000.
    EXPECT_NEAR(x, 34960.0, 0.001 * 34960.0);
    EXPECT_NEAR(x, 35000.0, 0.001 * 35000.0);
}

TEST(Units, WavenumbersToKilohertz) {
    const double khz = unit_convert(35000.0, "cm-1", "kHz");
    EXPECT_NEAR(khz, 35000.0 * oracle::kHzPerCm / 1e3, 1e-6 * khz);
    EXPECT_NEAR(khz, 1.05e12, 0.01e12);
}

TEST(Units, BohrToPicometres) {
    EXPECT_NEAR(unit_convert(1.0, "bohr", "pm"), 52.918, 1e-3);
    EXPECT_NEAR(unit_convert(oracle::kPmPerBohr, "pm", "a0"), 1.0, 1e-12);
}

TEST(Units, AtomicMassAndRoundTrips) {
    EXPECT_NEAR(unit_convert(1.0, "u", "me"), oracle::kMePerDalton, 1e-6);
    for (const char* u : {"kHz", "cm-1", "kcal/mol", "hartree", "Hz"})
        EXPECT_NEAR(unit_convert(unit_convert(3.7, u, "a.u."), "a.u.", u), 3.7, 1e-12);
    EXPECT_NEAR(unit_convert(1.0, "hartree", "kcal/mol"), 627.5095, 1e-4);
    EXPECT_NEAR(unit_convert(1.0, "Hartree", "CM^-1"), 219474.63, 1e-2);
}

TEST(Units, RejectsUnknownAndMismatchedUnits) {
    EXPECT_THROW(unit_convert(1.0, "furlong", "pm"), UnsupportedUnit);
    EXPECT_THROW(unit_convert(1.0, "pm", "kHz"), UnsupportedUnit);
    EXPECT_THROW(unit_convert(1.0, "u", "bohr"), UnsupportedUnit);
}

#include <cmath>

#include <gtest/gtest.h>

#include "srgm/erlang.hpp"

namespace srgm {
namespace {

// Reference values from 40-digit evaluation of the regularized lower
// incomplete gamma function.
struct Reference {
    int n;
    double x;
    double lower;
    double upper;
};

constexpr Reference kReference[] = {
    {1, 1e-3, 0.00099950016662500835274, 0.99900049983337499165},
    {2, 1e-3, 4.9966679163334029738e-7, 0.99999950033320836666},
    {6, 1e-3, 1.3876989333774599333e-21, 1.0},
    {6, 0.5, 0.000014164937322342490715, 0.99998583506267765751},
    {6, 6.0, 0.55432035863538875554, 0.44567964136461124446},
    {6, 30.0, 0.99999997742651253604, 2.2573487463962841601e-8},
    {3, 45.0, 0.9999999999999999697, 3.0299759175115331727e-17},
    {6, 80.0, 1.0, 5.2524690635187462925e-28},
    {6, 2.5, 0.042021038195306118354, 0.95797896180469388165},
    {2, 1e-8, 4.9999999666666670009e-17, 0.99999999999999995},
    {5, 12.0, 0.99239960931893300453, 0.0076003906810669954715},
};

TEST(ErlangStageCdf, MatchesHighPrecisionReference) {
    for (const auto& r : kReference) {
        SCOPED_TRACE(testing::Message() << "n=" << r.n << " x=" << r.x);
        EXPECT_NEAR(erlang_stage_cdf(r.n, r.x), r.lower, 1e-14 * r.lower + 1e-300);
        EXPECT_NEAR(erlang_stage_survival(r.n, r.x), r.upper, 1e-14 * r.upper + 1e-300);
    }
}

TEST(ErlangStageCdf, SingleStageIsExponential) {
    for (double x : {0.0, 1e-9, 0.3, 1.0, 7.5, 40.0})
        EXPECT_NEAR(erlang_stage_cdf(1, x), 1.0 - std::exp(-x), 1e-15);
    EXPECT_EQ(erlang_stage_cdf(1, 0.0), 0.0);
}

TEST(ErlangStageCdf, TwoStagesAtOne) { EXPECT_NEAR(erlang_stage_cdf(2, 1.0), 0.2642411, 1e-7); }

TEST(ErlangStageCdf, ZeroArgument) {
    for (int n = 1; n <= 6; ++n) EXPECT_EQ(erlang_stage_cdf(n, 0.0), 0.0);
}

TEST(ErlangStageCdf, DomainErrors) {
    EXPECT_THROW(erlang_stage_cdf(0, 1.0), DomainError);
    EXPECT_THROW(erlang_stage_cdf(2, -0.1), DomainError);
    EXPECT_THROW(erlang_stage_survival(2, std::nan("")), DomainError);
}

TEST(ErlangStageCdf, MonotoneInArgumentAndStages) {
    for (int n = 1; n <= 8; ++n) {
        double prev = 0.0;
        for (double x = 0.0; x <= 60.0; x += 0.01) {
            const double p = erlang_stage_cdf(n, x);
            ASSERT_GE(p, prev) << "n=" << n << " x=" << x;
            ASSERT_LE(p, 1.0);
            prev = p;
        }
    }
    for (double x = 0.0; x <= 60.0; x += 0.37)
        for (int n = 1; n < 8; ++n) ASSERT_GE(erlang_stage_cdf(n, x), erlang_stage_cdf(n + 1, x));
}

TEST(ErlangStageCdf, TailsAreComplementary) {
    for (int n = 1; n <= 6; ++n)
        for (double x = 0.05; x < 50.0; x *= 1.3)
            EXPECT_NEAR(erlang_stage_cdf(n, x) + erlang_stage_survival(n, x), 1.0, 1e-15);
}

TEST(ErlangStageCdf, DensityIsDerivative) {
    for (int n = 1; n <= 6; ++n)
        for (double x = 0.2; x < 30.0; x += 0.9) {
            const double h = 1e-5;
            const double fd = (erlang_stage_cdf(n, x + h) - erlang_stage_cdf(n, x - h)) / (2 * h);
            EXPECT_NEAR(erlang_stage_pdf(n, x), fd, 1e-8);
        }
}

}  // namespace
}  // namespace srgm

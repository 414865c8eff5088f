#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "msdc/csa.hpp"
#include "msdc/error.hpp"
#include "test_helpers.hpp"

using namespace msdc;
using msdc::test_util::appendix_geometry;
using msdc::test_util::random_pattern;
using msdc::test_util::range_pattern;

namespace {

// Dense reference: explicit set of learned (pixel, unit) pairs.
struct DenseWeights {
    std::set<std::pair<std::uint32_t, std::uint32_t>> on;
    std::uint32_t quantum = 127;

    std::vector<std::uint64_t> u(const InputPattern& x, std::size_t units) const {
        std::vector<std::uint64_t> out(units, 0);
        for (auto p : x.active()) {
            for (std::uint32_t j = 0; j < units; ++j) {
                if (on.count({p, j})) out[j] += quantum;
            }
        }
        return out;
    }
};

ModelGeometry fig2_geometry() {
    ModelGeometry g;
    g.input_width = 8;
    g.input_height = 8;
    g.num_active = 5;
    g.num_cms = 5;
    g.units_per_cm = 3;
    return g;
}

Code random_code(const ModelGeometry& g, std::mt19937_64& rng) {
    std::vector<std::uint32_t> w(g.num_cms);
    for (auto& x : w) x = static_cast<std::uint32_t>(rng() % g.units_per_cm);
    return Code(std::move(w));
}

}  // namespace

// ---- compute_u / normalize_u -------------------------------------------------

TEST(ComputeU, ZeroWeightsGiveZeroSums) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    const auto u = compute_u(range_pattern(10, 12), w);
    ASSERT_EQ(u.size(), g.num_units());
    for (auto x : u) EXPECT_EQ(x, 0u);
}

TEST(ComputeU, RepresentingStoredPatternHitsMaximumAtWinners) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    std::mt19937_64 rng(3);
    const auto a = random_pattern(g, rng);
    const auto code = random_code(g, rng);
    apply_learning(a, code, g, w);
    const auto u = compute_u(a, w);
    for (std::uint32_t q = 0; q < g.num_cms; ++q) {
        for (std::uint32_t k = 0; k < g.units_per_cm; ++k) {
            EXPECT_EQ(u[g.unit_index(q, k)], k == code[q] ? 1524u : 0u);
        }
    }
}

TEST(ComputeU, FourOfFiveSharedPixelsWithUnitQuantum) {
    const auto g = fig2_geometry();
    WeightMatrix w(g, 1);
    const auto a = InputPattern({0, 1, 2, 3, 4});
    const auto b = InputPattern({0, 1, 2, 3, 60});
    const Code code({0, 2, 1, 1, 0});
    apply_learning(a, code, g, w);
    const auto u = compute_u(b, w);
    const auto U = normalize_u(u, g.num_active, w.quantum());
    for (std::uint32_t q = 0; q < g.num_cms; ++q) {
        for (std::uint32_t k = 0; k < g.units_per_cm; ++k) {
            const bool winner = k == code[q];
            EXPECT_EQ(u[g.unit_index(q, k)], winner ? 4u : 0u);
            EXPECT_DOUBLE_EQ(U[g.unit_index(q, k)], winner ? 0.8 : 0.0);
        }
    }
}

TEST(ComputeU, MatchesDenseReferenceOnRandomStates) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 30; ++round) {
        ModelGeometry g;
        g.input_width = 1 + static_cast<std::uint32_t>(rng() % 10);
        g.input_height = 1 + static_cast<std::uint32_t>(rng() % 10);
        g.num_active = 1 + static_cast<std::uint32_t>(rng() % g.num_pixels());
        g.num_cms = 1 + static_cast<std::uint32_t>(rng() % 12);
        g.units_per_cm = 1 + static_cast<std::uint32_t>(rng() % 12);
        const auto quantum = 1 + static_cast<std::uint32_t>(rng() % 255);
        WeightMatrix w(g, quantum);
        DenseWeights dense;
        dense.quantum = quantum;
        const int stores = static_cast<int>(rng() % 8);
        for (int s = 0; s < stores; ++s) {
            const auto x = random_pattern(g, rng);
            const auto c = random_code(g, rng);
            apply_learning(x, c, g, w);
            for (auto p : x.active()) {
                for (std::uint32_t q = 0; q < g.num_cms; ++q) {
                    dense.on.insert({p, static_cast<std::uint32_t>(g.unit_index(q, c[q]))});
                }
            }
        }
        const auto probe = random_pattern(g, rng);
        const auto u = compute_u(probe, w);
        const auto ref = dense.u(probe, g.num_units());
        ASSERT_EQ(u.size(), ref.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
            ASSERT_EQ(u[j], ref[j]);
            ASSERT_LE(u[j], static_cast<std::uint64_t>(g.num_active) * quantum);
        }
    }
}

TEST(ComputeU, PixelOutsideMatrixIsStructuralError) {
    WeightMatrix w(10, 4);
    EXPECT_THROW(compute_u(InputPattern({2, 10}), w), StructuralError);
}

TEST(NormalizeU, Examples) {
    const std::vector<std::uint32_t> u{0, 1524, 762};
    const auto U = normalize_u(u, 12, 127);
    EXPECT_EQ(U[0], 0.0);
    EXPECT_EQ(U[1], 1.0);
    EXPECT_DOUBLE_EQ(U[2], 0.5);
    const std::vector<std::uint32_t> small{4};
    EXPECT_DOUBLE_EQ(normalize_u(small, 5, 1)[0], 0.8);
}

TEST(NormalizeU, RejectsSumsAboveCeiling) {
    const std::vector<std::uint32_t> u{1525};
    EXPECT_THROW(normalize_u(u, 12, 127), StructuralError);
}

// ---- familiarity ------------------------------------------------------------

TEST(Familiarity, ZeroAndFullyFamiliar) {
    const auto g = appendix_geometry();
    std::vector<double> U(g.num_units(), 0.0);
    EXPECT_EQ(familiarity(U, g), 0.0);

    WeightMatrix w(g);
    std::mt19937_64 rng(5);
    const auto a = random_pattern(g, rng);
    apply_learning(a, random_code(g, rng), g, w);
    const auto Ua = normalize_u(compute_u(a, w), g.num_active, w.quantum());
    EXPECT_EQ(familiarity(Ua, g), 1.0);
}

TEST(Familiarity, AveragesPerModuleMaxima) {
    ModelGeometry g = fig2_geometry();
    g.num_cms = 2;
    const std::vector<double> U{0.2, 0.8, 0.4, 0.0, 0.0, 0.6};
    EXPECT_DOUBLE_EQ(familiarity(U, g), 0.7);
    EXPECT_THROW(familiarity(std::vector<double>(5, 0.0), g), StructuralError);
}

TEST(Familiarity, InvariantUnderUnitAndModulePermutation) {
    std::mt19937_64 rng(17);
    const auto g = appendix_geometry();
    for (int round = 0; round < 50; ++round) {
        std::vector<double> U(g.num_units());
        for (auto& x : U) x = static_cast<double>(rng() % 13) / 12.0;
        const double base = familiarity(U, g);
        ASSERT_GE(base, 0.0);
        ASSERT_LE(base, 1.0);

        auto within = U;
        for (std::uint32_t q = 0; q < g.num_cms; ++q) {
            auto first = within.begin() + static_cast<std::ptrdiff_t>(q * g.units_per_cm);
            std::shuffle(first, first + g.units_per_cm, rng);
        }
        EXPECT_EQ(familiarity(within, g), base);

        std::vector<std::uint32_t> perm(g.num_cms);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> across(U.size());
        for (std::uint32_t q = 0; q < g.num_cms; ++q) {
            for (std::uint32_t k = 0; k < g.units_per_cm; ++k) {
                across[g.unit_index(q, k)] = U[g.unit_index(perm[q], k)];
            }
        }
        EXPECT_NEAR(familiarity(across, g), base, 1e-12);
    }
}

// ---- eta_of_g ----------------------------------------------------------------

TEST(EtaOfG, Examples) {
    const CsaParams p;
    EXPECT_EQ(eta_of_g(0.0, p), 0.0);
    EXPECT_DOUBLE_EQ(eta_of_g(1.0, p), 299.0);
    EXPECT_DOUBLE_EQ(eta_of_g(0.5, p), 149.5);

    CsaParams shaped;
    shaped.g_exponent = 2.0;
    EXPECT_DOUBLE_EQ(eta_of_g(0.5, shaped), 74.75);

    CsaParams floored;
    floored.g_floor = 0.2;
    EXPECT_EQ(eta_of_g(0.2, floored), 0.0);
    EXPECT_EQ(eta_of_g(0.1, floored), 0.0);
    EXPECT_DOUBLE_EQ(eta_of_g(0.6, floored), 149.5);
    EXPECT_DOUBLE_EQ(eta_of_g(1.0, floored), 299.0);
}

TEST(EtaOfG, MonotoneAndZeroAtZeroForRandomParams) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 200; ++round) {
        CsaParams p;
        p.eta_max = 1.0 + 500.0 * unit(rng);
        p.g_floor = 0.9 * unit(rng);
        p.g_exponent = 0.1 + 4.0 * unit(rng);
        ASSERT_NO_THROW(p.validate());
        EXPECT_EQ(eta_of_g(0.0, p), 0.0);
        EXPECT_NEAR(eta_of_g(1.0, p), p.eta_max, 1e-9 * p.eta_max);
        double prev = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double eta = eta_of_g(i / 100.0, p);
            EXPECT_GE(eta, prev);
            prev = eta;
        }
    }
}

// ---- u_to_mu ------------------------------------------------------------------

TEST(UToMu, ZeroEtaIsUniform) {
    const std::vector<double> U{0.0, 0.3, 1.0, 0.5};
    const auto mu = u_to_mu(U, 0.0, CsaParams{});
    for (auto m : mu) EXPECT_EQ(m, 1.0);
}

TEST(UToMu, FullRangeAtMaximumEta) {
    const std::vector<double> U{0.0, 1.0};
    const auto mu = u_to_mu(U, 299.0, CsaParams{});
    EXPECT_NEAR(mu[0], 1.0002486268802715, 1e-12);
    EXPECT_NEAR(mu[1], 299.9997513731197, 1e-9);
}

TEST(UToMu, HighEvidenceFavouredLowEvidenceNearFloor) {
    // At G = 0.65 a unit with U = 0.74 sits near the ceiling while U = 0.19 stays near 1.
    const CsaParams p;
    const double eta = eta_of_g(0.65, p);
    const std::vector<double> U{0.74, 0.19};
    const auto mu = u_to_mu(U, eta, p);
    EXPECT_NEAR(mu[0], 195.11579187916504, 1e-9);
    EXPECT_NEAR(mu[1], 1.033024377459665, 1e-12);
    EXPECT_GT(mu[0] / mu[1], 150.0);
}

TEST(UToMu, MonotoneAndFlooredAtOne) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 100; ++round) {
        CsaParams p;
        p.sigmoid_steepness = 0.5 + 50.0 * unit(rng);
        p.sigmoid_midpoint = unit(rng);
        const double eta = 400.0 * unit(rng);
        std::vector<double> U(64);
        for (std::size_t i = 0; i < U.size(); ++i) U[i] = static_cast<double>(i) / 63.0;
        const auto mu = u_to_mu(U, eta, p);
        for (std::size_t i = 0; i < mu.size(); ++i) {
            EXPECT_GE(mu[i], 1.0);
            EXPECT_LE(mu[i], 1.0 + eta + 1e-9);
            if (i > 0) EXPECT_GE(mu[i], mu[i - 1]);
        }
    }
}

// ---- mu_to_rho -----------------------------------------------------------------

TEST(MuToRho, UniformAndPeaked) {
    ModelGeometry g = fig2_geometry();
    g.num_cms = 1;
    const auto rho = mu_to_rho(std::vector<double>(3, 7.0), g);
    for (auto r : rho) EXPECT_DOUBLE_EQ(r, 1.0 / 3.0);

    g.units_per_cm = 8;
    std::vector<double> mu(8, 1.0);
    mu[0] = 250.0;
    const auto peaked = mu_to_rho(mu, g);
    EXPECT_NEAR(peaked[0], 0.9727626459143969, 1e-12);
    for (std::size_t k = 1; k < 8; ++k) EXPECT_NEAR(peaked[k], 0.0038910505836575876, 1e-12);
}

TEST(MuToRho, DegenerateModuleFallsBackToUniform) {
    ModelGeometry g = fig2_geometry();
    g.num_cms = 2;
    const std::vector<double> mu{0.0, 0.0, 0.0, 1.0, 2.0, 1.0};
    const auto rho = mu_to_rho(mu, g);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(rho[k], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(rho[4], 0.5);
}

TEST(MuToRho, EveryModuleSumsToOneAcrossRandomModelStates) {
    const auto g = appendix_geometry();
    std::mt19937_64 rng(31);
    WeightMatrix w(g);
    for (int round = 0; round < 200; ++round) {
        if (round % 2 == 0) apply_learning(random_pattern(g, rng), random_code(g, rng), g, w);
        Rng draw(round);
        const auto s = select_code(random_pattern(g, rng), w, g, CsaParams{}, SelectionMode::soft,
                                   draw);
        for (std::uint32_t q = 0; q < g.num_cms; ++q) {
            double sum = 0.0;
            for (std::uint32_t k = 0; k < g.units_per_cm; ++k) {
                const double r = s.trace.rho[g.unit_index(q, k)];
                ASSERT_GE(r, 0.0);
                sum += r;
            }
            ASSERT_NEAR(sum, 1.0, 1e-9);
        }
        ASSERT_GE(s.trace.familiarity, 0.0);
        ASSERT_LE(s.trace.familiarity, 1.0);
    }
}

// ---- draw_winners / hard_max_winners -----------------------------------------------

TEST(DrawWinners, DegenerateDistributionAlwaysPicksTheCertainUnit) {
    ModelGeometry g = fig2_geometry();
    std::vector<double> rho(g.num_units(), 0.0);
    for (std::uint32_t q = 0; q < g.num_cms; ++q) rho[g.unit_index(q, q % 3)] = 1.0;
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto code = draw_winners(rho, g, rng);
        for (std::uint32_t q = 0; q < g.num_cms; ++q) ASSERT_EQ(code[q], q % 3);
    }
}

TEST(DrawWinners, DeterministicForFixedSeed) {
    const auto g = appendix_geometry();
    std::vector<double> rho(g.num_units(), 1.0 / g.units_per_cm);
    Rng a(99), b(99);
    EXPECT_EQ(draw_winners(rho, g, a), draw_winners(rho, g, b));
}

TEST(DrawWinners, ZeroEtaWinFrequenciesAreUniform) {
    const auto g = appendix_geometry();
    const WeightMatrix w(g);
    const auto x = range_pattern(0, 12);
    const int n = 50000;
    std::vector<std::vector<int>> counts(g.num_cms, std::vector<int>(g.units_per_cm, 0));
    Rng rng(2024);
    for (int i = 0; i < n; ++i) {
        const auto s = select_code(x, w, g, CsaParams{}, SelectionMode::soft, rng);
        for (std::uint32_t q = 0; q < g.num_cms; ++q) ++counts[q][s.code[q]];
    }
    const double p = 1.0 / g.units_per_cm;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (const auto& cm : counts) {
        for (int c : cm) EXPECT_LE(std::abs(c - n * p), 4.0 * sigma);
    }
}

TEST(DrawWinners, IndependentCodesOnZeroWeightsMeetAtChance) {
    const auto g = appendix_geometry();
    const WeightMatrix w(g);
    Rng rng(7);
    std::mt19937_64 patterns(8);
    const int pairs = 10000;
    double total = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const auto x = select_code(random_pattern(g, patterns), w, g, CsaParams{},
                                   SelectionMode::soft, rng);
        const auto y = select_code(random_pattern(g, patterns), w, g, CsaParams{},
                                   SelectionMode::soft, rng);
        total += static_cast<double>(x.code.intersection(y.code));
    }
    const double expected = static_cast<double>(g.num_cms) / g.units_per_cm;  // 3
    EXPECT_NEAR(total / pairs, expected, 0.05 * expected);
}

TEST(HardMax, ReturnsTheStoredCodeForTheStoredPattern) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    std::mt19937_64 rng(41);
    const auto a = random_pattern(g, rng);
    const auto code = random_code(g, rng);
    apply_learning(a, code, g, w);
    Rng draw(0);
    const auto U = normalize_u(compute_u(a, w), g.num_active, w.quantum());
    EXPECT_EQ(hard_max_winners(U, g, draw), code);
}

TEST(HardMax, TiesSplitEvenly) {
    ModelGeometry g = fig2_geometry();
    g.num_cms = 1;
    const std::vector<double> U{0.5, 0.5, 0.1};
    Rng rng(5);
    int first = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto w = hard_max_winners(U, g, rng)[0];
        ASSERT_LT(w, 2u);
        first += w == 0 ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.05);
}

TEST(HardMax, AllZeroEvidenceIsUniform) {
    ModelGeometry g = appendix_geometry();
    g.num_cms = 1;
    const std::vector<double> U(g.units_per_cm, 0.0);
    Rng rng(6);
    const int n = 8000;
    std::vector<int> counts(g.units_per_cm, 0);
    for (int i = 0; i < n; ++i) ++counts[hard_max_winners(U, g, rng)[0]];
    const double p = 1.0 / g.units_per_cm;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int c : counts) EXPECT_LE(std::abs(c - n * p), 4.0 * sigma);
}

// ---- apply_learning ---------------------------------------------------------------

TEST(ApplyLearning, SetsOneWeightPerActivePixelAndWinner) {
    const auto g5 = fig2_geometry();
    WeightMatrix w5(g5, 1);
    EXPECT_EQ(apply_learning(InputPattern({1, 9, 17, 25, 33}), Code({0, 1, 2, 0, 1}), g5, w5), 25u);
    EXPECT_EQ(w5.count_set(), 25u);

    const auto g = appendix_geometry();
    WeightMatrix w(g);
    std::mt19937_64 rng(43);
    const auto a = random_pattern(g, rng);
    const auto c = random_code(g, rng);
    EXPECT_EQ(apply_learning(a, c, g, w), 288u);
    const auto snapshot = w;
    EXPECT_EQ(apply_learning(a, c, g, w), 0u);
    EXPECT_EQ(w, snapshot);
}

TEST(ApplyLearning, WeightsNeverDecrease) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    std::mt19937_64 rng(47);
    for (int i = 0; i < 100; ++i) {
        const auto before = w;
        apply_learning(random_pattern(g, rng), random_code(g, rng), g, w);
        for (std::uint32_t p = 0; p < g.num_pixels(); ++p) {
            for (std::uint32_t j = 0; j < g.num_units(); ++j) {
                if (before.is_set(p, j)) ASSERT_TRUE(w.is_set(p, j));
            }
        }
    }
}

TEST(ApplyLearning, RejectsMismatchedShapes) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    EXPECT_THROW(apply_learning(range_pattern(0, 11), Code(std::vector<std::uint32_t>(24, 0)), g, w),
                 PatternError);
    EXPECT_THROW(apply_learning(range_pattern(0, 12), Code(std::vector<std::uint32_t>(23, 0)), g, w),
                 StructuralError);
    WeightMatrix wrong(10, 10);
    EXPECT_THROW(apply_learning(range_pattern(0, 12), Code(std::vector<std::uint32_t>(24, 0)), g,
                                wrong),
                 StructuralError);
}

// ---- whole pipeline ----------------------------------------------------------------

TEST(SelectCode, BitExactReplayForSameStateAndSeed) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    std::mt19937_64 rng(53);
    for (int i = 0; i < 6; ++i) apply_learning(random_pattern(g, rng), random_code(g, rng), g, w);
    const auto probe = random_pattern(g, rng);
    for (auto mode : {SelectionMode::soft, SelectionMode::hard}) {
        Rng a(77), b(77);
        const auto s1 = select_code(probe, w, g, CsaParams{}, mode, a);
        const auto s2 = select_code(probe, w, g, CsaParams{}, mode, b);
        EXPECT_EQ(s1.code, s2.code);
        EXPECT_EQ(s1.trace, s2.trace);
    }
}

TEST(SelectCode, OperationCountDependsOnlyOnGeometry) {
    const auto g = appendix_geometry();
    WeightMatrix w(g);
    std::mt19937_64 rng(59);
    Rng draw(1);
    const auto probe = random_pattern(g, rng);

    apply_learning(random_pattern(g, rng), random_code(g, rng), g, w);
    OpCounter after_one;
    (void)select_code(probe, w, g, CsaParams{}, SelectionMode::soft, draw, &after_one);

    for (int i = 1; i < 100; ++i) {
        apply_learning(random_pattern(g, rng), random_code(g, rng), g, w);
    }
    OpCounter after_hundred;
    (void)select_code(probe, w, g, CsaParams{}, SelectionMode::soft, draw, &after_hundred);

    EXPECT_EQ(after_one, after_hundred);
    EXPECT_EQ(after_one.weight_reads, 12u * 192u);
    EXPECT_EQ(after_one.sigmoid_evals, 192u);
    EXPECT_EQ(after_one.rng_draws, 24u);
}

TEST(CsaParams, ValidationRejectsOutOfRangeValues) {
    EXPECT_NO_THROW(CsaParams{}.validate());
    CsaParams p;
    p.eta_max = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.sigmoid_steepness = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.sigmoid_midpoint = 1.5;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.g_floor = 1.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.g_exponent = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(SelectionMode, ParsesNames) {
    EXPECT_EQ(parse_selection_mode("soft"), SelectionMode::soft);
    EXPECT_EQ(parse_selection_mode("hard"), SelectionMode::hard);
    EXPECT_THROW(parse_selection_mode("medium"), ConfigError);
}

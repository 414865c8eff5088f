#pragma once

// Code selection: the per-trial pipeline that maps an input pattern to one
// winner per competitive module.
//
//   u   = raw weighted input summation per unit
//   U   = u / (S * quantum)
//   G   = mean over modules of the per-module max U   (familiarity)
//   eta = eta_max * max(0, (G - g_floor) / (1 - g_floor))^gamma
//   mu  = 1 + eta / (1 + exp(-steepness * (U - midpoint)))
//   rho = mu normalized within each module
//
// Winners are drawn from rho (soft) or taken as argmax U (hard). All vectors
// are flat, indexed cm * K + k.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "msdc/geometry.hpp"
#include "msdc/pattern.hpp"
#include "msdc/rng.hpp"
#include "msdc/weight_matrix.hpp"

namespace msdc {

struct CsaParams {
    double eta_max = 299.0;
    double sigmoid_steepness = 28.0;
    double sigmoid_midpoint = 0.5;
    double g_floor = 0.0;
    double g_exponent = 1.0;

    void validate() const;

    friend bool operator==(const CsaParams&, const CsaParams&) = default;
};

enum class SelectionMode { soft, hard };

const char* to_string(SelectionMode mode) noexcept;
/// Accepts "soft" or "hard"; throws ConfigError otherwise.
SelectionMode parse_selection_mode(std::string_view text);

/// Counts the elementary steps taken by the selection pipeline.
struct OpCounter {
    std::uint64_t weight_reads = 0;
    std::uint64_t normalizations = 0;
    std::uint64_t max_comparisons = 0;
    std::uint64_t sigmoid_evals = 0;
    std::uint64_t rho_divisions = 0;
    std::uint64_t cumulative_steps = 0;
    std::uint64_t rng_draws = 0;

    [[nodiscard]] std::uint64_t total() const noexcept {
        return weight_reads + normalizations + max_comparisons + sigmoid_evals + rho_divisions +
               cumulative_steps + rng_draws;
    }
    friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

struct CsaTrace {
    std::vector<std::uint32_t> u;
    std::vector<double> U;
    std::vector<double> mu;
    std::vector<double> rho;
    double familiarity = 0.0;  // G
    double eta = 0.0;

    friend bool operator==(const CsaTrace&, const CsaTrace&) = default;
};

struct Selection {
    Code code;
    CsaTrace trace;
};

std::vector<std::uint32_t> compute_u(const InputPattern& input, const WeightMatrix& weights,
                                     OpCounter* ops = nullptr);

/// Throws StructuralError if any entry exceeds num_active * quantum.
std::vector<double> normalize_u(std::span<const std::uint32_t> u, std::uint32_t num_active,
                                std::uint32_t quantum, OpCounter* ops = nullptr);

double familiarity(std::span<const double> U, const ModelGeometry& geometry,
                   OpCounter* ops = nullptr);

double eta_of_g(double g, const CsaParams& params);

std::vector<double> u_to_mu(std::span<const double> U, double eta, const CsaParams& params,
                            OpCounter* ops = nullptr);

/// Falls back to uniform 1/K in any module whose mu sum is not positive.
std::vector<double> mu_to_rho(std::span<const double> mu, const ModelGeometry& geometry,
                              OpCounter* ops = nullptr);

/// One categorical draw per module, module 0 first, one engine call each.
Code draw_winners(std::span<const double> rho, const ModelGeometry& geometry, Rng& rng,
                  OpCounter* ops = nullptr);

/// Argmax U per module with uniform tie-breaking; always one engine call per module.
Code hard_max_winners(std::span<const double> U, const ModelGeometry& geometry, Rng& rng,
                      OpCounter* ops = nullptr);

/// Sets every (active pixel, winner) weight. Returns how many bits were newly set.
std::size_t apply_learning(const InputPattern& input, const Code& code,
                           const ModelGeometry& geometry, WeightMatrix& weights);

/// Full pipeline without the weight update.
Selection select_code(const InputPattern& input, const WeightMatrix& weights,
                      const ModelGeometry& geometry, const CsaParams& params, SelectionMode mode,
                      Rng& rng, OpCounter* ops = nullptr);

}  // namespace msdc

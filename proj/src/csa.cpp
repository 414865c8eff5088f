#include "msdc/csa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msdc/error.hpp"

namespace msdc {
namespace {

void check_flat_size(std::size_t n, const ModelGeometry& geometry, const char* what) {
    if (n != geometry.num_units()) {
        throw StructuralError(std::string(what) + " has " + std::to_string(n) +
                              " entries, expected Q*K = " + std::to_string(geometry.num_units()));
    }
}

}  // namespace

void CsaParams::validate() const {
    if (!(eta_max > 0.0) || !std::isfinite(eta_max)) {
        throw ConfigError("eta_max must be positive and finite");
    }
    if (!(sigmoid_steepness > 0.0) || !std::isfinite(sigmoid_steepness)) {
        throw ConfigError("sigmoid_steepness must be positive and finite");
    }
    if (!(sigmoid_midpoint >= 0.0 && sigmoid_midpoint <= 1.0)) {
        throw ConfigError("sigmoid_midpoint must lie in [0, 1]");
    }
    if (!(g_floor >= 0.0 && g_floor < 1.0)) {
        throw ConfigError("g_floor must lie in [0, 1)");
    }
    if (!(g_exponent > 0.0) || !std::isfinite(g_exponent)) {
        throw ConfigError("g_exponent must be positive and finite");
    }
}

const char* to_string(SelectionMode mode) noexcept {
    return mode == SelectionMode::soft ? "soft" : "hard";
}

SelectionMode parse_selection_mode(std::string_view text) {
    if (text == "soft") return SelectionMode::soft;
    if (text == "hard") return SelectionMode::hard;
    throw ConfigError("unknown selection mode '" + std::string(text) + "' (expected soft|hard)");
}

std::vector<std::uint32_t> compute_u(const InputPattern& input, const WeightMatrix& weights,
                                     OpCounter* ops) {
    const std::size_t units = weights.num_units();
    std::vector<std::uint32_t> u(units, 0);
    const std::uint32_t quantum = weights.quantum();
    for (auto pixel : input.active()) {
        if (pixel >= weights.num_pixels()) {
            throw StructuralError("pixel index " + std::to_string(pixel) +
                                  " outside weight matrix with " +
                                  std::to_string(weights.num_pixels()) + " rows");
        }
        const auto row = weights.row(pixel);
        // Branch-free so the cost does not depend on how dense the row is.
        for (std::size_t j = 0; j < units; ++j) {
            const auto bit = static_cast<std::uint32_t>((row[j >> 6] >> (j & 63)) & 1u);
            u[j] += bit * quantum;
        }
        if (ops) ops->weight_reads += units;
    }
    return u;
}

std::vector<double> normalize_u(std::span<const std::uint32_t> u, std::uint32_t num_active,
                                std::uint32_t quantum, OpCounter* ops) {
    const auto ceiling = static_cast<std::uint64_t>(num_active) * quantum;
    if (ceiling == 0) {
        throw StructuralError("normalization ceiling S * quantum must be positive");
    }
    std::vector<double> U(u.size());
    const double denom = static_cast<double>(ceiling);
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j] > ceiling) {
            throw StructuralError("u = " + std::to_string(u[j]) + " exceeds S * quantum = " +
                                  std::to_string(ceiling));
        }
        U[j] = static_cast<double>(u[j]) / denom;
    }
    if (ops) ops->normalizations += u.size();
    return U;
}

double familiarity(std::span<const double> U, const ModelGeometry& geometry, OpCounter* ops) {
    check_flat_size(U.size(), geometry, "U");
    const std::size_t K = geometry.units_per_cm;
    double sum = 0.0;
    for (std::size_t q = 0; q < geometry.num_cms; ++q) {
        const auto cm = U.subspan(q * K, K);
        sum += *std::max_element(cm.begin(), cm.end());
    }
    if (ops) ops->max_comparisons += U.size();
    return std::clamp(sum / static_cast<double>(geometry.num_cms), 0.0, 1.0);
}

double eta_of_g(double g, const CsaParams& params) {
    const double x = (std::clamp(g, 0.0, 1.0) - params.g_floor) / (1.0 - params.g_floor);
    if (x <= 0.0) {
        return 0.0;
    }
    return params.eta_max * std::pow(x, params.g_exponent);
}

std::vector<double> u_to_mu(std::span<const double> U, double eta, const CsaParams& params,
                            OpCounter* ops) {
    std::vector<double> mu(U.size());
    for (std::size_t j = 0; j < U.size(); ++j) {
        const double s =
            1.0 / (1.0 + std::exp(-params.sigmoid_steepness * (U[j] - params.sigmoid_midpoint)));
        mu[j] = 1.0 + eta * s;
    }
    if (ops) ops->sigmoid_evals += U.size();
    return mu;
}

std::vector<double> mu_to_rho(std::span<const double> mu, const ModelGeometry& geometry,
                              OpCounter* ops) {
    check_flat_size(mu.size(), geometry, "mu");
    const std::size_t K = geometry.units_per_cm;
    std::vector<double> rho(mu.size());
    for (std::size_t q = 0; q < geometry.num_cms; ++q) {
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) total += mu[q * K + k];
        if (!(total > 0.0) || !std::isfinite(total)) {
            std::fill_n(rho.begin() + static_cast<std::ptrdiff_t>(q * K), K,
                        1.0 / static_cast<double>(K));
            continue;
        }
        for (std::size_t k = 0; k < K; ++k) rho[q * K + k] = mu[q * K + k] / total;
    }
    if (ops) ops->rho_divisions += mu.size();
    return rho;
}

Code draw_winners(std::span<const double> rho, const ModelGeometry& geometry, Rng& rng,
                  OpCounter* ops) {
    check_flat_size(rho.size(), geometry, "rho");
    const std::size_t K = geometry.units_per_cm;
    std::vector<std::uint32_t> winners(geometry.num_cms);
    for (std::size_t q = 0; q < geometry.num_cms; ++q) {
        const double r = uniform01(rng);
        // Full scan: the first unit whose cumulative mass exceeds r wins, and
        // the last unit absorbs any rounding shortfall.
        std::uint32_t winner = static_cast<std::uint32_t>(K - 1);
        bool found = false;
        double cumulative = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            cumulative += rho[q * K + k];
            if (!found && r < cumulative) {
                winner = static_cast<std::uint32_t>(k);
                found = true;
            }
        }
        winners[q] = winner;
    }
    if (ops) {
        ops->rng_draws += geometry.num_cms;
        ops->cumulative_steps += rho.size();
    }
    return Code(std::move(winners));
}

Code hard_max_winners(std::span<const double> U, const ModelGeometry& geometry, Rng& rng,
                      OpCounter* ops) {
    check_flat_size(U.size(), geometry, "U");
    const std::size_t K = geometry.units_per_cm;
    std::vector<std::uint32_t> winners(geometry.num_cms);
    for (std::size_t q = 0; q < geometry.num_cms; ++q) {
        const auto cm = U.subspan(q * K, K);
        const double best = *std::max_element(cm.begin(), cm.end());
        const auto ties = static_cast<std::size_t>(std::count(cm.begin(), cm.end(), best));
        auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ties));
        pick = std::min(pick, ties - 1);
        for (std::size_t k = 0; k < K; ++k) {
            if (cm[k] == best) {
                if (pick == 0) {
                    winners[q] = static_cast<std::uint32_t>(k);
                    break;
                }
                --pick;
            }
        }
    }
    if (ops) {
        ops->rng_draws += geometry.num_cms;
        ops->cumulative_steps += U.size();
    }
    return Code(std::move(winners));
}

std::size_t apply_learning(const InputPattern& input, const Code& code,
                           const ModelGeometry& geometry, WeightMatrix& weights) {
    input.check_against(geometry);
    code.check_against(geometry);
    if (weights.num_pixels() != geometry.num_pixels() ||
        weights.num_units() != geometry.num_units()) {
        throw StructuralError("weight matrix shape does not match geometry");
    }
    std::size_t newly_set = 0;
    for (auto pixel : input.active()) {
        for (std::uint32_t q = 0; q < geometry.num_cms; ++q) {
            newly_set += weights.set(pixel, geometry.unit_index(q, code[q])) ? 1 : 0;
        }
    }
    return newly_set;
}

Selection select_code(const InputPattern& input, const WeightMatrix& weights,
                      const ModelGeometry& geometry, const CsaParams& params, SelectionMode mode,
                      Rng& rng, OpCounter* ops) {
    input.check_against(geometry);
    if (weights.num_pixels() != geometry.num_pixels() ||
        weights.num_units() != geometry.num_units()) {
        throw StructuralError("weight matrix shape does not match geometry");
    }
    Selection s;
    s.trace.u = compute_u(input, weights, ops);
    s.trace.U = normalize_u(s.trace.u, geometry.num_active, weights.quantum(), ops);
    s.trace.familiarity = familiarity(s.trace.U, geometry, ops);
    s.trace.eta = eta_of_g(s.trace.familiarity, params);
    s.trace.mu = u_to_mu(s.trace.U, s.trace.eta, params, ops);
    s.trace.rho = mu_to_rho(s.trace.mu, geometry, ops);
    s.code = mode == SelectionMode::soft ? draw_winners(s.trace.rho, geometry, rng, ops)
                                         : hard_max_winners(s.trace.U, geometry, rng, ops);
    return s;
}

}  // namespace msdc

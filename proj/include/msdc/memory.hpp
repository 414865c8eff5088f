#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msdc/csa.hpp"
#include "msdc/geometry.hpp"
#include "msdc/pattern.hpp"
#include "msdc/rng.hpp"
#include "msdc/weight_matrix.hpp"

namespace msdc {

/// Evaluation-side record of what was stored. The selection pipeline never reads it.
struct LedgerEntry {
    std::string label;
    InputPattern input;
    Code code;

    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

using StoredItemLedger = std::vector<LedgerEntry>;

struct BeliefItem {
    std::string label;
    double input_similarity = 0.0;   // |X ∩ Y| / S
    std::size_t code_intersection = 0;
    double likelihood = 0.0;         // code_intersection / Q
};

struct BeliefReport {
    Selection selection;  // phi(X) and its trace
    std::vector<BeliefItem> items;
};

/// A coding field plus its learned weights and random stream.
///
/// Single writer: store() mutates weights and the internal generator. The
/// const retrieve()/belief_update() overloads take a caller-owned generator
/// and are safe to run concurrently with each other.
class MemoryModel {
public:
    MemoryModel(ModelGeometry geometry, CsaParams params, std::uint64_t seed,
                bool ledger_enabled = false, std::uint32_t weight_quantum = kDefaultWeightQuantum);

    /// Selects a code for `input`, learns it, and records it in the ledger
    /// when enabled. Throws PatternError (model unchanged) on a bad pattern.
    Selection store(const InputPattern& input, const std::string& label = {},
                    OpCounter* ops = nullptr);

    [[nodiscard]] Selection retrieve(const InputPattern& input, SelectionMode mode, Rng& rng,
                                     OpCounter* ops = nullptr) const;
    /// Uses (and advances) the model's own generator.
    Selection retrieve(const InputPattern& input, SelectionMode mode, OpCounter* ops = nullptr);

    /// Throws UnsupportedOperation when the ledger is disabled or empty.
    [[nodiscard]] BeliefReport belief_update(const InputPattern& input, SelectionMode mode,
                                             Rng& rng) const;
    BeliefReport belief_update(const InputPattern& input,
                               SelectionMode mode = SelectionMode::soft);

    [[nodiscard]] const ModelGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] const CsaParams& params() const noexcept { return params_; }
    void set_params(const CsaParams& params);
    [[nodiscard]] const WeightMatrix& weights() const noexcept { return weights_; }
    [[nodiscard]] const Rng& rng() const noexcept { return rng_; }
    void reseed(std::uint64_t seed) { rng_.seed(seed); }
    [[nodiscard]] bool ledger_enabled() const noexcept { return ledger_.has_value(); }
    [[nodiscard]] const StoredItemLedger* ledger() const noexcept {
        return ledger_ ? &*ledger_ : nullptr;
    }
    [[nodiscard]] std::size_t stored_count() const noexcept { return stored_count_; }

    // Used by snapshot loading.
    static MemoryModel restore(ModelGeometry geometry, CsaParams params, WeightMatrix weights,
                               Rng rng, std::optional<StoredItemLedger> ledger,
                               std::uint64_t stored_count);

    friend bool operator==(const MemoryModel&, const MemoryModel&) = default;

private:
    MemoryModel() = default;

    ModelGeometry geometry_;
    CsaParams params_;
    WeightMatrix weights_;
    Rng rng_;
    std::optional<StoredItemLedger> ledger_;
    std::uint64_t stored_count_ = 0;
};

}  // namespace msdc

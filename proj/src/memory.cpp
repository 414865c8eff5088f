#include "msdc/memory.hpp"

#include <utility>

#include "msdc/error.hpp"

namespace msdc {

MemoryModel::MemoryModel(ModelGeometry geometry, CsaParams params, std::uint64_t seed,
                         bool ledger_enabled, std::uint32_t weight_quantum)
    : geometry_(geometry), params_(params), rng_(seed) {
    geometry_.validate();
    params_.validate();
    weights_ = WeightMatrix(geometry_, weight_quantum);
    if (ledger_enabled) {
        ledger_.emplace();
    }
}

MemoryModel MemoryModel::restore(ModelGeometry geometry, CsaParams params, WeightMatrix weights,
                                 Rng rng, std::optional<StoredItemLedger> ledger,
                                 std::uint64_t stored_count) {
    geometry.validate();
    params.validate();
    if (weights.num_pixels() != geometry.num_pixels() ||
        weights.num_units() != geometry.num_units()) {
        throw StructuralError("weight matrix shape does not match geometry");
    }
    MemoryModel m;
    m.geometry_ = geometry;
    m.params_ = params;
    m.weights_ = std::move(weights);
    m.rng_ = rng;
    m.ledger_ = std::move(ledger);
    m.stored_count_ = stored_count;
    return m;
}

void MemoryModel::set_params(const CsaParams& params) {
    params.validate();
    params_ = params;
}

Selection MemoryModel::store(const InputPattern& input, const std::string& label,
                             OpCounter* ops) {
    input.check_against(geometry_);
    auto selection =
        select_code(input, weights_, geometry_, params_, SelectionMode::soft, rng_, ops);
    apply_learning(input, selection.code, geometry_, weights_);
    ++stored_count_;
    if (ledger_) {
        ledger_->push_back({label, input, selection.code});
    }
    return selection;
}

Selection MemoryModel::retrieve(const InputPattern& input, SelectionMode mode, Rng& rng,
                                OpCounter* ops) const {
    return select_code(input, weights_, geometry_, params_, mode, rng, ops);
}

Selection MemoryModel::retrieve(const InputPattern& input, SelectionMode mode, OpCounter* ops) {
    return select_code(input, weights_, geometry_, params_, mode, rng_, ops);
}

BeliefReport MemoryModel::belief_update(const InputPattern& input, SelectionMode mode,
                                        Rng& rng) const {
    if (!ledger_) {
        throw UnsupportedOperation("belief_update requires the stored-item ledger");
    }
    if (ledger_->empty()) {
        throw UnsupportedOperation("belief_update requires at least one stored item");
    }
    BeliefReport report;
    report.selection = retrieve(input, mode, rng);
    // Evaluation-side readout; the code selection above never touches the ledger.
    const double S = geometry_.num_active;
    const double Q = geometry_.num_cms;
    report.items.reserve(ledger_->size());
    for (const auto& entry : *ledger_) {
        BeliefItem item;
        item.label = entry.label;
        item.input_similarity = static_cast<double>(input.overlap(entry.input)) / S;
        item.code_intersection = report.selection.code.intersection(entry.code);
        item.likelihood = static_cast<double>(item.code_intersection) / Q;
        report.items.push_back(std::move(item));
    }
    return report;
}

BeliefReport MemoryModel::belief_update(const InputPattern& input, SelectionMode mode) {
    // Validate before consuming randomness so a rejected call leaves the stream untouched.
    if (!ledger_ || ledger_->empty()) {
        Rng scratch;
        return std::as_const(*this).belief_update(input, mode, scratch);
    }
    return std::as_const(*this).belief_update(input, mode, rng_);
}

}  // namespace msdc

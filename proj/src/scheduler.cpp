#include "moscl/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace moscl {

namespace {

void check_batch_size(std::size_t b, std::size_t min_b) {
    if (b < min_b) throw std::invalid_argument("batch size must be >= " + std::to_string(min_b));
}

std::vector<std::vector<SampleId>> chunk(std::span<const SampleId> seq, std::size_t b) {
    std::vector<std::vector<SampleId>> out;
    for (std::size_t k = 0; k < seq.size(); k += b) {
        const auto end = std::min(seq.size(), k + b);
        out.emplace_back(seq.begin() + static_cast<std::ptrdiff_t>(k), seq.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

std::vector<SampleId> hardest_first(std::span<const ScoredId> scored) {
    std::vector<ScoredId> sorted(scored.begin(), scored.end());
    std::sort(sorted.begin(), sorted.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.hardness != b.hardness) return a.hardness < b.hardness;
        return a.id < b.id;
    });
    std::vector<SampleId> ids;
    ids.reserve(sorted.size());
    for (const auto& s : sorted) ids.push_back(s.id);
    return ids;
}

}  // namespace

std::size_t BatchPlan::slot_count() const {
    std::size_t n = 0;
    for (const auto& b : batches) n += b.size();
    return n;
}

std::vector<SampleId> BatchPlan::flattened() const {
    std::vector<SampleId> out;
    out.reserve(slot_count());
    for (const auto& b : batches) out.insert(out.end(), b.begin(), b.end());
    return out;
}

bool BatchPlan::covers_exactly(std::span<const SampleId> ids) const {
    auto got = flattened();
    std::vector<SampleId> want(ids.begin(), ids.end());
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    return got == want && std::adjacent_find(want.begin(), want.end()) == want.end();
}

std::vector<ScoredId> scored_ids(std::span<const SampleId> ids, std::span<const DifficultyRecord> records,
                                 DifficultySource source) {
    std::unordered_map<SampleId, std::size_t> by_id;
    for (const auto& r : records) by_id[r.sample_id] = hardness(r, source);
    std::vector<ScoredId> out;
    out.reserve(ids.size());
    for (const auto id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw std::invalid_argument("no difficulty score for sample " + std::to_string(id));
        out.push_back({id, it->second});
    }
    return out;
}

BatchPlan random_plan(std::span<const SampleId> ids, std::size_t batch_size, Rng& rng) {
    if (ids.empty()) throw std::invalid_argument("random_plan: no ids");
    check_batch_size(batch_size, 1);
    std::vector<SampleId> order(ids.begin(), ids.end());
    std::shuffle(order.begin(), order.end(), rng);
    return {0, batch_size, chunk(order, batch_size), false};
}

BatchPlan mixed_order_plan(std::span<const ScoredId> scored, std::size_t batch_size) {
    if (scored.empty()) throw std::invalid_argument("mixed_order_plan: no scores");
    check_batch_size(batch_size, 2);
    const auto sorted = hardest_first(scored);

    std::vector<SampleId> interleaved;
    interleaved.reserve(sorted.size());
    std::size_t lo = 0;
    std::size_t hi = sorted.size();
    bool take_hard = true;
    while (lo < hi) {
        interleaved.push_back(take_hard ? sorted[lo++] : sorted[--hi]);
        take_hard = !take_hard;
    }
    return {0, batch_size, chunk(interleaved, batch_size), false};
}

BatchPlan anti_mixed_plan(std::span<const ScoredId> scored, std::size_t batch_size) {
    if (scored.empty()) throw std::invalid_argument("anti_mixed_plan: no scores");
    check_batch_size(batch_size, 1);
    return {0, batch_size, chunk(hardest_first(scored), batch_size), false};
}

BatchPlan ohem_plan(std::span<const LossEntry> losses, std::size_t batch_size, double ratio, Rng& rng) {
    if (losses.empty()) throw std::invalid_argument("ohem_plan: no losses");
    if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("ohem_plan: ratio must lie in (0, 1]");
    check_batch_size(batch_size, 1);

    std::vector<LossEntry> sorted(losses.begin(), losses.end());
    std::sort(sorted.begin(), sorted.end(), [](const LossEntry& a, const LossEntry& b) {
        if (a.loss != b.loss) return a.loss > b.loss;
        return a.id < b.id;
    });
    const auto n = sorted.size();
    const auto hard = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))),
                                              1, n);

    std::vector<SampleId> slots;
    slots.reserve(n + hard);
    for (const auto& e : sorted) slots.push_back(e.id);
    for (std::size_t k = 0; k < hard; ++k) slots.push_back(sorted[k].id);
    std::shuffle(slots.begin(), slots.end(), rng);
    return {0, batch_size, chunk(slots, batch_size), true};
}

SpRegularizer parse_sp_regularizer(std::string_view name) {
    if (name == "hard") return SpRegularizer::hard;
    if (name == "linear") return SpRegularizer::linear;
    throw std::invalid_argument("unknown SP regularizer '" + std::string(name) + "'");
}

std::string_view to_string(SpRegularizer r) { return r == SpRegularizer::hard ? "hard" : "linear"; }

void SpConfig::validate() const {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("sp: lambda0 must be > 0");
    if (!(growth >= 0.0)) throw std::invalid_argument("sp: growth must be >= 0");
}

double sp_weight(double loss, SpRegularizer regularizer, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sp_weight: lambda must be > 0");
    if (regularizer == SpRegularizer::hard) return loss < lambda ? 1.0 : 0.0;
    return std::max(0.0, 1.0 - loss / lambda);
}

double age_schedule(int epoch, const SpConfig& cfg) {
    if (epoch < 0) throw std::invalid_argument("age_schedule: epoch must be >= 0");
    return cfg.lambda0 + cfg.growth * epoch;
}

double batch_sum_spread(const BatchPlan& plan, const std::map<SampleId, std::size_t>& hardness_by_id) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& batch : plan.batches) {
        if (batch.size() != plan.batch_size) continue;
        double sum = 0.0;
        for (const auto id : batch) sum += static_cast<double>(hardness_by_id.at(id));
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
    }
    return hi >= lo ? hi - lo : 0.0;
}

std::string plans_to_json(std::span<const BatchPlan> plans) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : plans) {
        arr.push_back({{"epoch", p.epoch}, {"duplicates", p.allows_duplicates}, {"batches", p.batches}});
    }
    return arr.dump();
}

}  // namespace moscl

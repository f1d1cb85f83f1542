#include "pors/framework.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "pors/parallel.hpp"

namespace pors {

void PorsConfig::validate() const {
    if (ssf.k < 1) throw std::invalid_argument("k must be >= 1");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
}

std::size_t PorsTrace::best_snapshot() const {
    if (snapshots.empty()) throw std::logic_error("empty trace");
    std::size_t best = snapshots.size() - 1;
    std::optional<double> best_hv;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const auto& v = snapshots[i].validation_hv;
        if (v && (!best_hv || *v > *best_hv)) {
            best_hv = v;
            best = i;
        }
    }
    return best;
}

namespace {

// Fills coverage for entries created from counts only.
ParetoFront materialize(ParetoFront front, const PoolCoverage& train) {
    bool missing = false;
    for (const auto& e : front.entries()) missing = missing || e.coverage.n_rows() != train.n_rows;
    if (!missing) return front;
    std::vector<RuleSubset> entries = front.entries();
    for (auto& e : entries) {
        if (e.coverage.n_rows() != train.n_rows) e.coverage = union_coverage(e.members, train);
    }
    return make_pareto_front(std::move(entries));
}

}  // namespace

ParetoFront initial_front(const PoolCoverage& train) {
    std::vector<RuleSubset> singles;
    singles.reserve(train.size());
    for (std::size_t r = 0; r < train.size(); ++r) {
        singles.push_back(make_subset({static_cast<RuleIndex>(r)}, train));
    }
    return make_pareto_front(std::move(singles));
}

ParetoFront expand_front(const ParetoFront& front, std::span<const std::size_t> selected, const PoolCoverage& train,
                         std::size_t threads, std::size_t* candidates) {
    std::vector<std::vector<RuleSubset>> grown(selected.size());
    parallel_for(selected.size(), threads, [&](std::size_t s) {
        const RuleSubset& base = front.entries().at(selected[s]);
        auto& out = grown[s];
        for (std::size_t r = 0; r < train.size(); ++r) {
            const auto id = static_cast<RuleIndex>(r);
            if (std::binary_search(base.members.begin(), base.members.end(), id)) continue;
            const Bitset& rb = train.rules[r].bits();
            RuleSubset c;
            c.members = base.members;
            c.members.insert(std::upper_bound(c.members.begin(), c.members.end(), id), id);
            // Coverage is built later for survivors only.
            c.objective = ObjectivePoint::from_counts(or_count(base.coverage.bits(), rb),
                                                      or_and_count(base.coverage.bits(), rb, train.positives),
                                                      train.n_positive);
            out.push_back(std::move(c));
        }
    });
    std::vector<RuleSubset> all = front.entries();
    std::size_t generated = 0;
    for (auto& g : grown) {
        generated += g.size();
        std::move(g.begin(), g.end(), std::back_inserter(all));
    }
    if (candidates != nullptr) *candidates = generated;
    return materialize(make_pareto_front(std::move(all)), train);
}

std::vector<RuleSubset> evaluate_on(std::span<const RuleSubset> solutions, const PoolCoverage& split) {
    std::vector<RuleSubset> out;
    out.reserve(solutions.size());
    for (const auto& s : solutions) out.push_back(make_subset(s.members, split));
    return out;
}

double split_hypervolume(const ParetoFront& front, const PoolCoverage& split) {
    std::vector<ObjectivePoint> pts;
    pts.reserve(front.size());
    for (const auto& s : front.entries()) {
        pts.push_back(evaluate_metrics(union_coverage(s.members, split), split.n_positive));
    }
    return hypervolume(pts);
}

ParetoFront reevaluate_front(const ParetoFront& front, const PoolCoverage& split) {
    return make_pareto_front(evaluate_on(front.entries(), split));
}

PorsTrace run_pors(const PoolCoverage& train, const PoolCoverage* validation, const PorsConfig& cfg,
                   const SnapshotCallback& on_snapshot) {
    cfg.validate();
    if (train.size() == 0) throw std::invalid_argument("rule pool is empty");
    if (train.n_positive == 0) throw std::invalid_argument("training split has no positive rows");
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    PorsTrace trace;
    const auto record = [&](PorsSnapshot snap) {
        snap.train_hv = snap.front.hypervolume();
        if (validation != nullptr) snap.validation_hv = split_hypervolume(snap.front, *validation);
        snap.elapsed_seconds = elapsed();
        if (on_snapshot) on_snapshot(snap);
        trace.snapshots.push_back(std::move(snap));
    };

    PorsSnapshot first;
    first.front = initial_front(train);
    record(std::move(first));

    for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
        const ParetoFront& current = trace.snapshots.back().front;
        const ParetoFront* previous =
            trace.snapshots.size() >= 2 ? &trace.snapshots[trace.snapshots.size() - 2].front : nullptr;
        PorsSnapshot snap;
        snap.iteration = round;
        snap.selected = select_ssf(current, cfg.ssf, previous);
        snap.front = expand_front(current, snap.selected, train, cfg.threads, &snap.candidates);
        const bool converged = snap.front == current;
        record(std::move(snap));
        if (converged) {
            trace.converged_at = round;
            break;
        }
    }
    return trace;
}

}  // namespace pors

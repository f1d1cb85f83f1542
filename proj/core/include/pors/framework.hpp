#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pors/pareto.hpp"
#include "pors/ssf.hpp"

namespace pors {

inline constexpr std::size_t kDefaultMaxRounds = 30;

struct PorsConfig {
    SsfMethod ssf;
    std::size_t max_rounds = kDefaultMaxRounds;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    void validate() const;
};

struct PorsSnapshot {
    std::size_t iteration = 0;  // 0 is the singleton front
    ParetoFront front;          // training objectives
    double train_hv = 0.0;
    std::optional<double> validation_hv;
    std::size_t candidates = 0;            // expansions generated this round
    std::vector<std::size_t> selected;     // indices into the previous front
    double elapsed_seconds = 0.0;          // wall clock since the run started
};

struct PorsTrace {
    std::vector<PorsSnapshot> snapshots;
    std::optional<std::size_t> converged_at;

    /// First snapshot with the highest validation HV (the last one when no
    /// validation split was given).
    [[nodiscard]] std::size_t best_snapshot() const;
    [[nodiscard]] const ParetoFront& final_front() const { return snapshots.back().front; }
};

/// makePF over every singleton {r} of the pool.
ParetoFront initial_front(const PoolCoverage& train);

/// For each selected entry S and rule r not in S, S ∪ {r}; merged with the
/// front through make_pareto_front. `candidates` receives the number generated.
ParetoFront expand_front(const ParetoFront& front, std::span<const std::size_t> selected, const PoolCoverage& train,
                         std::size_t threads = 1, std::size_t* candidates = nullptr);

/// The front's solutions re-evaluated on another split's coverage.
std::vector<RuleSubset> evaluate_on(std::span<const RuleSubset> solutions, const PoolCoverage& split);
/// HV of the front's solutions re-evaluated on `split` (dominated ones ignored).
double split_hypervolume(const ParetoFront& front, const PoolCoverage& split);
/// Re-evaluates the front on `split` and keeps its non-dominated part.
ParetoFront reevaluate_front(const ParetoFront& front, const PoolCoverage& split);

using SnapshotCallback = std::function<void(const PorsSnapshot&)>;

/// Iterates select / expand until the front is unchanged or max_rounds
/// expansions ran. Throws std::invalid_argument on an empty pool.
PorsTrace run_pors(const PoolCoverage& train, const PoolCoverage* validation, const PorsConfig& cfg,
                   const SnapshotCallback& on_snapshot = {});

}  // namespace pors

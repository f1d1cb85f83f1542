#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pors/pareto.hpp"

namespace pors {

enum class SsfKind {
    kEquiSpaced,
    kEquiDist,
    kEquiJaccard,
    kHv,
    kIgd,
    kIgdPlus,
    kHvc,
    kKMedoidsPr,
    kKMedoidsJaccard,
};

inline constexpr std::array<SsfKind, 9> kAllSsfKinds = {
    SsfKind::kEquiSpaced, SsfKind::kEquiDist, SsfKind::kEquiJaccard, SsfKind::kHv,               SsfKind::kIgd,
    SsfKind::kIgdPlus,    SsfKind::kHvc,      SsfKind::kKMedoidsPr,  SsfKind::kKMedoidsJaccard,
};

/// "equi-spaced", "equi-dist", "equi-jaccard", "hv-ss", "igd-ss", "igd+-ss",
/// "hvc-ss", "k-medoids-pr", "k-medoids-jaccard".
std::string_view ssf_name(SsfKind kind);
/// Throws std::invalid_argument("unknown SSF method: ...").
SsfKind parse_ssf(std::string_view name);

struct SsfMethod {
    SsfKind kind = SsfKind::kHvc;
    std::size_t k = 10;
    /// hvc-ss only: measure contributions against the previous iteration's
    /// front instead of the current one (falls back to current when absent).
    bool hvc_previous_front = false;
};

enum class ArcMetric { kManhattan, kEuclidean };
enum class Indicator { kHv, kHvc, kIgd, kIgdPlus };

/// Picks min(k, |front|) distinct entries; returns their indices ascending.
/// Throws std::invalid_argument on an empty front or k = 0.
std::vector<std::size_t> select_ssf(const ParetoFront& front, const SsfMethod& method,
                                    const ParetoFront* previous = nullptr);

/// Equal arc-length sampling along a curve given by consecutive positions
/// `cumulative` (non-decreasing, starting at 0). Targets i*L/(k-1) map to the
/// nearest position (ties to the lower index); duplicates are topped up with
/// the unselected entries nearest to their targets. Both ends are kept.
/// k = 1 keeps the entry nearest to L/2.
std::vector<std::size_t> sample_by_arc(std::span<const double> cumulative, std::size_t k);

/// `points` sorted by recall ascending.
std::vector<std::size_t> sample_equi_arc(std::span<const ObjectivePoint> points, std::size_t k, ArcMetric metric);

/// Tour over a symmetric distance matrix: nearest neighbour from node 0,
/// then 2-opt to a local optimum (at most `max_passes` passes).
std::vector<std::size_t> tsp_tour(const std::vector<std::vector<double>>& dist, std::size_t max_passes = 1000);

/// Equal-length sampling along the TSP tour with its largest edge cut.
/// Node 0 should be the lowest-recall entry.
std::vector<std::size_t> sample_equi_tour(const std::vector<std::vector<double>>& dist, std::size_t k);

/// Greedy forward selection on `points` (sorted by recall ascending).
/// hv maximizes HV(selected); hvc maximizes HVC(selected, reference);
/// igd / igd+ minimize the indicator of the selection against `points`.
/// `reference` defaults to `points` when empty. Ties go to the lower index.
std::vector<std::size_t> select_greedy_indicator(std::span<const ObjectivePoint> points, std::size_t k,
                                                 Indicator indicator,
                                                 std::span<const ObjectivePoint> reference = {});

/// PAM k-medoids: BUILD then best-improvement SWAP (at most `max_iter` swaps).
std::vector<std::size_t> kmedoids_select(const std::vector<std::vector<double>>& dist, std::size_t k,
                                         std::size_t max_iter = 100);

/// Sum over entries of the distance to the nearest medoid.
double medoid_cost(const std::vector<std::vector<double>>& dist, std::span<const std::size_t> medoids);

std::vector<std::vector<double>> euclidean_matrix(std::span<const ObjectivePoint> points);
std::vector<std::vector<double>> jaccard_matrix(const ParetoFront& front);

}  // namespace pors

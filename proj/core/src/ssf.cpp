#include "pors/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pors {

namespace {

constexpr std::array<std::string_view, 9> kNames = {
    "equi-spaced", "equi-dist", "equi-jaccard", "hv-ss", "igd-ss", "igd+-ss", "hvc-ss", "k-medoids-pr",
    "k-medoids-jaccard",
};

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

}  // namespace

std::string_view ssf_name(SsfKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

SsfKind parse_ssf(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return kAllSsfKinds[i];
    }
    throw std::invalid_argument("unknown SSF method: " + std::string(name));
}

std::vector<std::size_t> sample_by_arc(std::span<const double> cumulative, std::size_t k) {
    const std::size_t n = cumulative.size();
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (n <= k) return all_indices(n);
    const double total = cumulative.back();

    const auto nearest = [&](double target, const std::vector<bool>& taken) {
        std::size_t best = n;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (taken[j]) continue;
            const double gap = std::abs(cumulative[j] - target);
            if (gap < best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        return best;
    };

    std::vector<double> targets;
    if (k == 1) {
        targets.push_back(total / 2.0);
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            targets.push_back(total * static_cast<double>(i) / static_cast<double>(k - 1));
        }
    }
    const std::vector<bool> none(n, false);
    std::vector<bool> taken(n, false);
    std::vector<std::size_t> unfilled;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        std::size_t j = nearest(targets[i], none);
        if (k > 1 && i == 0) j = 0;
        if (k > 1 && i + 1 == targets.size()) j = n - 1;
        if (taken[j]) {
            unfilled.push_back(i);
        } else {
            taken[j] = true;
        }
    }
    for (const std::size_t i : unfilled) {
        taken[nearest(targets[i], taken)] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
        if (taken[j]) out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> sample_equi_arc(std::span<const ObjectivePoint> points, std::size_t k, ArcMetric metric) {
    std::vector<double> cumulative(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double dp = std::abs(points[i].precision - points[i - 1].precision);
        const double dr = std::abs(points[i].recall - points[i - 1].recall);
        cumulative[i] = cumulative[i - 1] + (metric == ArcMetric::kManhattan ? dp + dr : std::hypot(dp, dr));
    }
    return sample_by_arc(cumulative, k);
}

std::vector<std::size_t> tsp_tour(const std::vector<std::vector<double>>& dist, std::size_t max_passes) {
    const std::size_t n = dist.size();
    std::vector<std::size_t> tour;
    if (n == 0) return tour;
    std::vector<bool> visited(n, false);
    tour.push_back(0);
    visited[0] = true;
    while (tour.size() < n) {
        const std::size_t cur = tour.back();
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!visited[j] && (best == n || dist[cur][j] < dist[cur][best])) best = j;
        }
        visited[best] = true;
        tour.push_back(best);
    }
    if (n < 4) return tour;
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i + 2 < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;  // edges share node tour[0]
                const std::size_t a = tour[i];
                const std::size_t b = tour[i + 1];
                const std::size_t c = tour[j];
                const std::size_t d = tour[(j + 1) % n];
                const double delta = dist[a][c] + dist[b][d] - dist[a][b] - dist[c][d];
                if (delta < -1e-12) {
                    std::reverse(tour.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                 tour.begin() + static_cast<std::ptrdiff_t>(j + 1));
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return tour;
}

std::vector<std::size_t> sample_equi_tour(const std::vector<std::vector<double>>& dist, std::size_t k) {
    const std::size_t n = dist.size();
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (n <= k) return all_indices(n);
    const auto tour = tsp_tour(dist);
    // Cut the longest closing edge (first one on ties); the path starts after it.
    std::size_t cut = 0;
    double longest = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = dist[tour[i]][tour[(i + 1) % n]];
        if (e > longest) {
            longest = e;
            cut = i;
        }
    }
    std::vector<std::size_t> path;
    for (std::size_t i = 1; i <= n; ++i) path.push_back(tour[(cut + i) % n]);
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) cumulative[i] = cumulative[i - 1] + dist[path[i - 1]][path[i]];
    std::vector<std::size_t> out;
    for (const std::size_t pos : sample_by_arc(cumulative, k)) out.push_back(path[pos]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> select_greedy_indicator(std::span<const ObjectivePoint> points, std::size_t k,
                                                 Indicator indicator, std::span<const ObjectivePoint> reference) {
    const std::size_t n = points.size();
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (n <= k) return all_indices(n);
    if (reference.empty()) reference = points;

    std::vector<bool> taken(n, false);
    std::vector<ObjectivePoint> chosen;
    std::vector<std::size_t> out;
    const bool maximize = indicator == Indicator::kHv || indicator == Indicator::kHvc;
    for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = n;
        double best_value = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (taken[j]) continue;
            chosen.push_back(points[j]);
            double value = 0.0;
            switch (indicator) {
                case Indicator::kHv: value = hypervolume(chosen); break;
                case Indicator::kHvc: value = hv_contribution(chosen, reference); break;
                case Indicator::kIgd: value = igd(chosen, points); break;
                case Indicator::kIgdPlus: value = igd_plus(chosen, points); break;
            }
            chosen.pop_back();
            if (best == n || (maximize ? value > best_value : value < best_value)) {
                best = j;
                best_value = value;
            }
        }
        taken[best] = true;
        chosen.push_back(points[best]);
        out.push_back(best);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double medoid_cost(const std::vector<std::vector<double>>& dist, std::span<const std::size_t> medoids) {
    double total = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (const std::size_t m : medoids) best = std::min(best, dist[m][j]);
        total += best;
    }
    return total;
}

std::vector<std::size_t> kmedoids_select(const std::vector<std::vector<double>>& dist, std::size_t k,
                                         std::size_t max_iter) {
    const std::size_t n = dist.size();
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (n <= k) return all_indices(n);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // BUILD
    std::vector<std::size_t> medoids;
    std::vector<bool> is_medoid(n, false);
    std::vector<double> nearest(n, kInf);
    {
        std::size_t first = 0;
        double best = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double total = std::accumulate(dist[i].begin(), dist[i].end(), 0.0);
            if (total < best) {
                best = total;
                first = i;
            }
        }
        medoids.push_back(first);
        is_medoid[first] = true;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = dist[first][j];
    }
    while (medoids.size() < k) {
        std::size_t pick = n;
        double best_gain = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_medoid[i]) continue;
            double gain = 0.0;
            for (std::size_t j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - dist[i][j]);
            if (gain > best_gain) {
                best_gain = gain;
                pick = i;
            }
        }
        medoids.push_back(pick);
        is_medoid[pick] = true;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], dist[pick][j]);
    }

    // SWAP
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::vector<double> first(n, kInf);
        std::vector<double> second(n, kInf);
        std::vector<std::size_t> owner(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t m = 0; m < medoids.size(); ++m) {
                const double d = dist[medoids[m]][j];
                if (d < first[j]) {
                    second[j] = first[j];
                    first[j] = d;
                    owner[j] = m;
                } else if (d < second[j]) {
                    second[j] = d;
                }
            }
        }
        double best_delta = -1e-12;
        std::size_t best_m = medoids.size();
        std::size_t best_o = n;
        for (std::size_t m = 0; m < medoids.size(); ++m) {
            for (std::size_t o = 0; o < n; ++o) {
                if (is_medoid[o]) continue;
                double delta = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double keep = owner[j] == m ? second[j] : first[j];
                    delta += std::min(keep, dist[o][j]) - first[j];
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_m = m;
                    best_o = o;
                }
            }
        }
        if (best_m == medoids.size()) break;
        is_medoid[medoids[best_m]] = false;
        medoids[best_m] = best_o;
        is_medoid[best_o] = true;
    }
    std::sort(medoids.begin(), medoids.end());
    return medoids;
}

std::vector<std::vector<double>> euclidean_matrix(std::span<const ObjectivePoint> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = euclidean(points[i], points[j]);
    }
    return d;
}

std::vector<std::vector<double>> jaccard_matrix(const ParetoFront& front) {
    const std::size_t n = front.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i][j] = d[j][i] = jaccard_distance(front[i].coverage, front[j].coverage);
        }
    }
    return d;
}

std::vector<std::size_t> select_ssf(const ParetoFront& front, const SsfMethod& method, const ParetoFront* previous) {
    if (front.empty()) throw std::invalid_argument("cannot select from an empty front");
    if (method.k == 0) throw std::invalid_argument("k must be >= 1");
    if (front.size() <= method.k) return all_indices(front.size());
    const auto points = front.points();
    switch (method.kind) {
        case SsfKind::kEquiSpaced: return sample_equi_arc(points, method.k, ArcMetric::kManhattan);
        case SsfKind::kEquiDist: return sample_equi_arc(points, method.k, ArcMetric::kEuclidean);
        case SsfKind::kEquiJaccard: return sample_equi_tour(jaccard_matrix(front), method.k);
        case SsfKind::kHv: return select_greedy_indicator(points, method.k, Indicator::kHv);
        case SsfKind::kIgd: return select_greedy_indicator(points, method.k, Indicator::kIgd);
        case SsfKind::kIgdPlus: return select_greedy_indicator(points, method.k, Indicator::kIgdPlus);
        case SsfKind::kHvc: {
            if (method.hvc_previous_front && previous != nullptr && !previous->empty()) {
                const auto ref = previous->points();
                return select_greedy_indicator(points, method.k, Indicator::kHvc, ref);
            }
            return select_greedy_indicator(points, method.k, Indicator::kHvc);
        }
        case SsfKind::kKMedoidsPr: return kmedoids_select(euclidean_matrix(points), method.k);
        case SsfKind::kKMedoidsJaccard: return kmedoids_select(jaccard_matrix(front), method.k);
    }
    throw std::invalid_argument("unknown SSF method");
}

}  // namespace pors

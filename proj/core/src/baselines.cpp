#include "pors/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pors/parallel.hpp"
#include "pors/random.hpp"

namespace pors {

void NsgaConfig::validate() const {
    if (population < 4 || population % 2 != 0) throw std::invalid_argument("population must be even and >= 4");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw std::invalid_argument("mutation_rate outside [0,1]");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
        throw std::invalid_argument("crossover_rate outside [0,1]");
    }
}

namespace {

struct Individual {
    std::vector<bool> genes;
    std::vector<RuleIndex> members;
    ObjectivePoint objective;
    std::size_t rank = 0;
    double crowding = 0.0;
};

void evaluate(Individual& ind, const PoolCoverage& train) {
    ind.members.clear();
    Bitset bits(train.n_rows);
    for (std::size_t i = 0; i < ind.genes.size(); ++i) {
        if (ind.genes[i]) {
            ind.members.push_back(static_cast<RuleIndex>(i));
            bits |= train.rules[i].bits();
        }
    }
    ind.objective = ObjectivePoint::from_counts(bits.count(), and_count(bits, train.positives), train.n_positive);
}

// Global non-dominated set of everything offered, one entry per objective
// point (smallest member list wins).
class Archive {
  public:
    void offer(const Individual& ind) {
        for (auto& e : entries_) {
            if (same_point(e.objective, ind.objective)) {
                if (ind.members < e.members) e.members = ind.members;
                return;
            }
            if (dominates(e.objective, ind.objective)) return;
        }
        std::erase_if(entries_, [&](const RuleSubset& e) { return dominates(ind.objective, e.objective); });
        RuleSubset s;
        s.members = ind.members;
        s.objective = ind.objective;
        entries_.push_back(std::move(s));
    }

    [[nodiscard]] double hypervolume() const {
        std::vector<ObjectivePoint> pts;
        pts.reserve(entries_.size());
        for (const auto& e : entries_) pts.push_back(e.objective);
        return pors::hypervolume(pts);
    }

    [[nodiscard]] ParetoFront front(const PoolCoverage& train) const {
        std::vector<RuleSubset> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(make_subset(e.members, train));
        return make_pareto_front(std::move(out));
    }

  private:
    std::vector<RuleSubset> entries_;
};

// Fast non-dominated sort; returns fronts as index lists and sets ranks.
std::vector<std::vector<std::size_t>> nondominated_sort(std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pop[i].objective, pop[j].objective)) {
                dominated_by[i].push_back(j);
            } else if (dominates(pop[j].objective, pop[i].objective)) {
                ++count[i];
            }
        }
        if (count[i] == 0) {
            pop[i].rank = 0;
            fronts[0].push_back(i);
        }
    }
    for (std::size_t f = 0; !fronts[f].empty(); ++f) {
        std::vector<std::size_t> next;
        for (const std::size_t i : fronts[f]) {
            for (const std::size_t j : dominated_by[i]) {
                if (--count[j] == 0) {
                    pop[j].rank = f + 1;
                    next.push_back(j);
                }
            }
        }
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (const std::size_t i : front) pop[i].crowding = 0.0;
    if (front.size() <= 2) {
        for (const std::size_t i : front) pop[i].crowding = kInf;
        return;
    }
    for (int obj = 0; obj < 2; ++obj) {
        const auto value = [&](std::size_t i) { return obj == 0 ? pop[i].objective.precision : pop[i].objective.recall; };
        std::vector<std::size_t> order = front;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        const double lo = value(order.front());
        const double hi = value(order.back());
        pop[order.front()].crowding = kInf;
        pop[order.back()].crowding = kInf;
        if (hi <= lo) continue;
        for (std::size_t k = 1; k + 1 < order.size(); ++k) {
            pop[order[k]].crowding += (value(order[k + 1]) - value(order[k - 1])) / (hi - lo);
        }
    }
}

// Ranks and crowding for `pop`, then truncates it to `keep` by (rank, crowding).
void survive(std::vector<Individual>& pop, std::size_t keep) {
    const auto fronts = nondominated_sort(pop);
    std::vector<std::size_t> chosen;
    for (const auto& f : fronts) {
        assign_crowding(pop, f);
        if (chosen.size() + f.size() <= keep) {
            chosen.insert(chosen.end(), f.begin(), f.end());
            continue;
        }
        std::vector<std::size_t> order = f;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].crowding > pop[b].crowding; });
        order.resize(keep - chosen.size());
        chosen.insert(chosen.end(), order.begin(), order.end());
        break;
    }
    std::vector<Individual> next;
    next.reserve(chosen.size());
    for (const std::size_t i : chosen) next.push_back(std::move(pop[i]));
    pop = std::move(next);
}

std::size_t tournament(const std::vector<Individual>& pop, Rng& rng) {
    const auto a = static_cast<std::size_t>(rng.below(pop.size()));
    const auto b = static_cast<std::size_t>(rng.below(pop.size()));
    const auto better = [&](std::size_t x, std::size_t y) {
        if (pop[x].rank != pop[y].rank) return pop[x].rank < pop[y].rank;
        if (pop[x].crowding != pop[y].crowding) return pop[x].crowding > pop[y].crowding;
        return x < y;
    };
    return better(a, b) ? a : b;
}

}  // namespace

NsgaResult nsga2_run(const PoolCoverage& train, const NsgaConfig& cfg, const NsgaCallback& on_generation) {
    cfg.validate();
    const std::size_t m = train.size();
    if (m == 0) throw std::invalid_argument("rule pool is empty");
    if (train.n_positive == 0) throw std::invalid_argument("training split has no positive rows");
    const auto start = std::chrono::steady_clock::now();
    Rng rng(cfg.seed);
    Archive archive;
    NsgaResult result;

    const auto evaluate_all = [&](std::vector<Individual>& batch) {
        parallel_for(batch.size(), cfg.threads, [&](std::size_t i) { evaluate(batch[i], train); });
        for (const auto& ind : batch) archive.offer(ind);
        result.evaluations += batch.size();
    };
    const auto progress = [&](std::size_t gen) {
        NsgaProgress p;
        p.generation = gen;
        p.evaluations = result.evaluations;
        p.archive_hv = archive.hypervolume();
        p.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.timeline.push_back(p);
        if (on_generation) on_generation(p);
    };

    std::vector<Individual> pop(cfg.population);
    const double density = 1.0 / static_cast<double>(m);
    for (auto& ind : pop) {
        ind.genes.assign(m, false);
        bool any = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (rng.bernoulli(density)) {
                ind.genes[i] = true;
                any = true;
            }
        }
        if (!any) ind.genes[rng.below(m)] = true;
    }
    evaluate_all(pop);
    survive(pop, cfg.population);
    progress(0);

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Individual> children;
        children.reserve(cfg.population);
        while (children.size() < cfg.population) {
            Individual c1;
            Individual c2;
            c1.genes = pop[tournament(pop, rng)].genes;
            c2.genes = pop[tournament(pop, rng)].genes;
            if (rng.bernoulli(cfg.crossover_rate)) {
                for (std::size_t i = 0; i < m; ++i) {
                    if (rng.bernoulli(0.5)) {
                        const bool t = c1.genes[i];
                        c1.genes[i] = c2.genes[i];
                        c2.genes[i] = t;
                    }
                }
            }
            for (auto* c : {&c1, &c2}) {
                for (std::size_t i = 0; i < m; ++i) {
                    if (rng.bernoulli(cfg.mutation_rate)) c->genes[i] = !c->genes[i];
                }
            }
            children.push_back(std::move(c1));
            children.push_back(std::move(c2));
        }
        evaluate_all(children);
        std::move(children.begin(), children.end(), std::back_inserter(pop));
        survive(pop, cfg.population);
        progress(gen);
    }

    result.archive = archive.front(train);
    std::vector<RuleSubset> last;
    for (const auto& ind : pop) last.push_back(make_subset(ind.members, train));
    result.population_front = make_pareto_front(std::move(last));
    return result;
}

GreedyResult greedy_fbeta(const PoolCoverage& train, double beta, std::size_t beam, const PoolCoverage* validation) {
    if (train.size() == 0) throw std::invalid_argument("rule pool is empty");
    if (beam == 0) throw std::invalid_argument("beam must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (train.n_positive == 0) throw std::invalid_argument("training split has no positive rows");

    struct Node {
        std::vector<RuleIndex> members;
        Bitset bits;
        double score = 0.0;
    };
    const auto score_of = [&](std::size_t covered, std::size_t covered_pos) {
        const double p = covered == 0 ? 0.0 : static_cast<double>(covered_pos) / static_cast<double>(covered);
        const double r = static_cast<double>(covered_pos) / static_cast<double>(train.n_positive);
        return f_beta(p, r, beta);
    };

    std::vector<Node> frontier(1);
    frontier[0].bits = Bitset(train.n_rows);
    Node best = frontier[0];
    GreedyResult result;

    while (true) {
        struct Ext {
            std::size_t parent;
            RuleIndex rule;
            std::vector<RuleIndex> members;
            double score;
        };
        std::vector<std::vector<Ext>> per_parent(frontier.size());
        for (std::size_t b = 0; b < frontier.size(); ++b) {
            const Node& node = frontier[b];
            for (std::size_t r = 0; r < train.size(); ++r) {
                const auto id = static_cast<RuleIndex>(r);
                if (std::binary_search(node.members.begin(), node.members.end(), id)) continue;
                const Bitset& rb = train.rules[r].bits();
                Ext e{b, id, node.members, score_of(or_count(node.bits, rb), or_and_count(node.bits, rb, train.positives))};
                e.members.insert(std::upper_bound(e.members.begin(), e.members.end(), id), id);
                per_parent[b].push_back(std::move(e));
            }
        }
        std::vector<Ext> exts;
        for (auto& v : per_parent) std::move(v.begin(), v.end(), std::back_inserter(exts));
        if (exts.empty()) break;
        std::sort(exts.begin(), exts.end(), [](const Ext& a, const Ext& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.members < b.members;
        });
        std::vector<Node> next;
        std::set<std::vector<RuleIndex>> seen;
        for (auto& e : exts) {
            if (next.size() == beam) break;
            if (!seen.insert(e.members).second) continue;
            Node n;
            n.bits = frontier[e.parent].bits | train.rules[e.rule].bits();
            n.members = std::move(e.members);
            n.score = e.score;
            next.push_back(std::move(n));
        }
        if (!(next.front().score > best.score)) break;
        best = next.front();
        result.step_scores.push_back(best.score);
        frontier = std::move(next);
    }

    result.subset = make_subset(best.members, train);
    result.train_score = best.score;
    if (validation != nullptr) {
        const auto v = make_subset(best.members, *validation).objective;
        result.validation_score = f_beta(v.precision, v.recall, beta);
    }
    return result;
}

std::optional<std::size_t> front_select(const ParetoFront& front, const SelectCriterion& criterion) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < front.size(); ++i) {
        const ObjectivePoint& p = front[i].objective;
        if (criterion.mode == SelectCriterion::Mode::kMinPrecision) {
            if (p.precision < criterion.value) continue;
            if (!best) {
                best = i;
                continue;
            }
            const ObjectivePoint& b = front[*best].objective;
            const auto r = compare_recall(p, b);
            if (r > 0 || (r == 0 && compare_precision(p, b) > 0)) best = i;
        } else {
            const double f = f_beta(p.precision, p.recall, criterion.value);
            if (!best) {
                best = i;
                continue;
            }
            const ObjectivePoint& b = front[*best].objective;
            const double fb = f_beta(b.precision, b.recall, criterion.value);
            if (f > fb || (f == fb && compare_precision(p, b) > 0)) best = i;
        }
    }
    return best;
}

}  // namespace pors

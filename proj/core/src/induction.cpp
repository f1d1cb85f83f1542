#include "pors/induction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "pors/parallel.hpp"
#include "pors/random.hpp"

namespace pors {

void InductionConfig::validate() const {
    if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
    if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
}

BetaSpectrum BetaSpectrum::defaults() {
    return BetaSpectrum{{0.01, 0.02, 0.04, 0.06, 0.08, 0.10, 0.20, 0.40, 0.60, 0.80}};
}

void BetaSpectrum::validate() const {
    if (betas.empty()) throw std::invalid_argument("beta spectrum is empty");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw std::invalid_argument("beta spectrum values must be positive");
        if (i > 0 && !(betas[i] > betas[i - 1])) {
            throw std::invalid_argument("beta spectrum must be strictly increasing");
        }
    }
}

InductionData prepare_induction(const Dataset& d, SplitView train, std::size_t max_bins) {
    InductionData data;
    data.dataset = &d;
    data.conditions = derive_conditions(d, train, max_bins);
    data.train = std::move(train);
    return data;
}

Rule make_rule(const InductionData& data, std::span<const std::size_t> condition_ids, std::string provenance) {
    Bitset bits(data.train.size(), true);
    std::vector<Condition> conditions;
    conditions.reserve(condition_ids.size());
    for (const std::size_t id : condition_ids) {
        const CoveredCondition& cc = data.conditions.at(id);
        bits &= cc.coverage.bits();
        conditions.push_back(cc.condition);
    }
    Rule r;
    r.conditions = canonical_conditions(std::move(conditions));
    r.coverage = Coverage(std::move(bits), data.train.positives);
    r.provenance = std::move(provenance);
    return r;
}

namespace {

struct Candidate {
    std::vector<std::size_t> ids;  // sorted
    Bitset bits;                   // full training coverage
    std::size_t res_pos = 0;
    double score = 0.0;
};

struct Extension {
    std::size_t parent = 0;
    std::size_t condition = 0;
    std::vector<std::size_t> ids;
    std::size_t res_pos = 0;
    double score = 0.0;
};

bool better(const Extension& a, const Extension& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
    if (a.res_pos != b.res_pos) return a.res_pos > b.res_pos;
    return a.ids < b.ids;
}

bool conflicts(const Condition& c, const std::vector<std::size_t>& ids, const InductionData& data) {
    return std::any_of(ids.begin(), ids.end(), [&](std::size_t id) {
        const Condition& o = data.conditions[id].condition;
        return o.feature == c.feature && o.op == c.op;
    });
}

}  // namespace

std::optional<InducedRule> induce_rule(const InductionData& data, const Bitset& residual, const InductionConfig& cfg) {
    cfg.validate();
    if (data.conditions.empty()) throw std::invalid_argument("empty condition pool");
    const Bitset& positives = data.train.positives;
    const std::size_t res_positives = and_count(residual, positives);
    if (res_positives == 0) return std::nullopt;

    std::vector<Candidate> beam(1);
    beam[0].bits = Bitset(data.train.size(), true);
    std::optional<Candidate> best;

    for (std::size_t depth = 1; depth <= cfg.max_len; ++depth) {
        std::vector<Extension> exts;
        for (std::size_t b = 0; b < beam.size(); ++b) {
            const Bitset masked = beam[b].bits & residual;
            const Bitset masked_pos = masked & positives;
            for (std::size_t j = 0; j < data.conditions.size(); ++j) {
                const CoveredCondition& cc = data.conditions[j];
                if (conflicts(cc.condition, beam[b].ids, data)) continue;
                const std::size_t cov = and_count(masked, cc.coverage.bits());
                const std::size_t pos = and_count(masked_pos, cc.coverage.bits());
                const double precision = cov == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(cov);
                const double recall = static_cast<double>(pos) / static_cast<double>(res_positives);
                Extension e;
                e.parent = b;
                e.condition = j;
                e.ids = beam[b].ids;
                e.ids.insert(std::upper_bound(e.ids.begin(), e.ids.end(), j), j);
                e.res_pos = pos;
                e.score = f_beta(precision, recall, cfg.beta);
                exts.push_back(std::move(e));
            }
        }
        if (exts.empty()) break;
        std::sort(exts.begin(), exts.end(), better);
        // Equal id sets reached from different parents are the same conjunction.
        std::vector<Extension> kept;
        std::set<std::vector<std::size_t>> seen;
        for (auto& e : exts) {
            if (kept.size() == cfg.beam_width) break;
            if (seen.insert(e.ids).second) kept.push_back(std::move(e));
        }
        if (best && !(kept.front().score > best->score)) break;

        std::vector<Candidate> next;
        next.reserve(kept.size());
        for (auto& e : kept) {
            Candidate c;
            c.bits = beam[e.parent].bits & data.conditions[e.condition].coverage.bits();
            c.ids = std::move(e.ids);
            c.res_pos = e.res_pos;
            c.score = e.score;
            next.push_back(std::move(c));
        }
        best = next.front();
        beam = std::move(next);
    }
    if (!best || best->res_pos == 0) return std::nullopt;
    InducedRule out;
    out.condition_ids = std::move(best->ids);
    out.coverage = Coverage(std::move(best->bits), positives);
    out.score = best->score;
    return out;
}

namespace {

std::vector<Rule> covering_with_provenance(const InductionData& data, std::size_t n, const InductionConfig& cfg,
                                           const std::string& provenance) {
    std::vector<Rule> rules;
    Bitset residual(data.train.size(), true);
    for (std::size_t i = 0; i < n; ++i) {
        if (and_count(residual, data.train.positives) == 0) break;
        auto induced = induce_rule(data, residual, cfg);
        if (!induced) break;
        residual.subtract(induced->coverage.bits());
        Rule r = make_rule(data, induced->condition_ids, provenance);
        r.id = static_cast<RuleIndex>(rules.size());
        rules.push_back(std::move(r));
    }
    return rules;
}

bool conditions_less(const std::vector<Condition>& a, const std::vector<Condition>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const Condition& x, const Condition& y) { return (x <=> y) < 0; });
}

using ConditionSet = std::set<std::vector<Condition>, decltype(&conditions_less)>;

}  // namespace

std::vector<Rule> sequential_covering(const InductionData& data, std::size_t n, const InductionConfig& cfg) {
    return covering_with_provenance(data, n, cfg, "beta=" + format_number(cfg.beta));
}

std::vector<Rule> spectral_rules(const InductionData& data, std::size_t n, const BetaSpectrum& spectrum,
                                 const InductionConfig& base, std::size_t threads) {
    spectrum.validate();
    base.validate();
    const std::size_t nb = spectrum.betas.size();
    if (n < nb) throw std::invalid_argument("n must be at least the number of betas");
    const std::size_t budget = (n + nb - 1) / nb;

    std::vector<std::vector<Rule>> per_beta(nb);
    parallel_for(nb, threads, [&](std::size_t i) {
        InductionConfig cfg = base;
        cfg.beta = spectrum.betas[i];
        per_beta[i] = sequential_covering(data, budget, cfg);
    });

    std::vector<Rule> out;
    ConditionSet seen(&conditions_less);
    for (auto& rules : per_beta) {
        for (auto& r : rules) {
            if (!seen.insert(r.conditions).second) continue;
            r.id = static_cast<RuleIndex>(out.size());
            out.push_back(std::move(r));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forest extractor

namespace {

struct SplitCandidate {
    std::size_t left = 0;                     // condition taken by the left branch
    std::optional<std::size_t> right;         // condition for the complement, if expressible
};

// Per-feature split candidates with each training row's bin.
// Numeric: row bin b means value <= threshold[j] iff j >= b (missing: past the end).
// Categorical: bin j means the row's category is candidate j (other/missing: past the end).
struct FeatureSplits {
    bool numeric = true;
    std::vector<SplitCandidate> candidates;
    std::vector<std::uint32_t> bins;
};

std::vector<FeatureSplits> build_feature_splits(const InductionData& data) {
    const Dataset& d = *data.dataset;
    std::vector<FeatureSplits> out(d.n_features());
    std::vector<std::vector<std::pair<double, std::size_t>>> le(d.n_features());
    std::vector<std::map<double, std::size_t>> gt(d.n_features());
    std::vector<std::vector<std::pair<std::int32_t, std::size_t>>> eq(d.n_features());
    for (std::size_t i = 0; i < data.conditions.size(); ++i) {
        const Condition& c = data.conditions[i].condition;
        switch (c.op) {
            case Op::kLessEq: le[c.feature].emplace_back(c.threshold, i); break;
            case Op::kGreater: gt[c.feature][c.threshold] = i; break;
            case Op::kEqual: eq[c.feature].emplace_back(c.category, i); break;
        }
    }
    for (std::size_t f = 0; f < d.n_features(); ++f) {
        const Column& col = d.feature(f);
        FeatureSplits& fs = out[f];
        fs.bins.resize(data.train.size());
        if (col.kind == ColumnKind::kNumeric) {
            std::sort(le[f].begin(), le[f].end());
            std::vector<double> thresholds;
            for (const auto& [t, id] : le[f]) {
                SplitCandidate sc{id, std::nullopt};
                if (auto it = gt[f].find(t); it != gt[f].end()) sc.right = it->second;
                fs.candidates.push_back(sc);
                thresholds.push_back(t);
            }
            for (std::size_t i = 0; i < data.train.size(); ++i) {
                const double v = col.numeric[data.train.rows[i]];
                fs.bins[i] = std::isnan(v) ? static_cast<std::uint32_t>(thresholds.size())
                                           : static_cast<std::uint32_t>(
                                                 std::lower_bound(thresholds.begin(), thresholds.end(), v) -
                                                 thresholds.begin());
            }
        } else {
            fs.numeric = false;
            std::map<std::int32_t, std::uint32_t> slot;
            for (const auto& [code, id] : eq[f]) {
                slot[code] = static_cast<std::uint32_t>(fs.candidates.size());
                fs.candidates.push_back({id, std::nullopt});
            }
            for (std::size_t i = 0; i < data.train.size(); ++i) {
                const auto it = slot.find(col.codes[data.train.rows[i]]);
                fs.bins[i] = it == slot.end() ? static_cast<std::uint32_t>(fs.candidates.size()) : it->second;
            }
        }
    }
    return out;
}

// Twice the weighted Gini impurity of a node: 2 p (t - p) / t.
double gini_cost(double t, double p) { return t <= 0.0 ? 0.0 : 2.0 * p * (t - p) / t; }

class TreeBuilder {
  public:
    TreeBuilder(const InductionData& data, const std::vector<FeatureSplits>& splits, const ForestConfig& cfg,
                std::uint64_t seed)
        : data_(data), splits_(splits), cfg_(cfg), rng_(seed) {
        for (std::size_t f = 0; f < splits_.size(); ++f) {
            if (!splits_[f].candidates.empty()) usable_.push_back(f);
        }
        mtry_ = cfg.max_features != 0
                    ? cfg.max_features
                    : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(splits_.size()))));
        mtry_ = std::max<std::size_t>(1, std::min(mtry_, usable_.size()));
    }

    std::vector<std::vector<std::size_t>> grow() {
        const std::size_t n = data_.train.size();
        std::vector<std::uint32_t> sample(n);
        for (auto& s : sample) s = static_cast<std::uint32_t>(rng_.below(n));
        std::vector<std::size_t> path;
        if (!usable_.empty()) node(std::move(sample), path, 0);
        return std::move(paths_);
    }

  private:
    void node(std::vector<std::uint32_t> sample, std::vector<std::size_t>& path, std::size_t depth) {
        const double t = static_cast<double>(sample.size());
        double p = 0.0;
        for (const auto i : sample) p += data_.train.positives.test(i) ? 1.0 : 0.0;

        const bool stop = depth >= cfg_.max_depth || p == 0.0 || p == t || sample.size() < 2 * cfg_.min_leaf;
        std::optional<std::pair<std::size_t, std::size_t>> split;  // (feature, candidate)
        if (!stop) split = best_split(sample, t, p);
        if (!split) {
            if (2.0 * p > t && !path.empty()) paths_.push_back(path);
            return;
        }
        const auto [f, j] = *split;
        const FeatureSplits& fs = splits_[f];
        std::vector<std::uint32_t> left;
        std::vector<std::uint32_t> right;
        for (const auto i : sample) {
            const bool goes_left = fs.numeric ? fs.bins[i] <= j : fs.bins[i] == j;
            (goes_left ? left : right).push_back(i);
        }
        sample.clear();
        sample.shrink_to_fit();

        path.push_back(fs.candidates[j].left);
        node(std::move(left), path, depth + 1);
        path.pop_back();
        if (fs.candidates[j].right) {
            path.push_back(*fs.candidates[j].right);
            node(std::move(right), path, depth + 1);
            path.pop_back();
        } else {
            // "not equal to category" has no condition form; the branch adds none.
            node(std::move(right), path, depth + 1);
        }
    }

    std::optional<std::pair<std::size_t, std::size_t>> best_split(const std::vector<std::uint32_t>& sample, double t,
                                                                  double p) {
        std::vector<std::size_t> feats = usable_;
        for (std::size_t i = 0; i < mtry_; ++i) {
            const auto j = i + rng_.below(feats.size() - i);
            std::swap(feats[i], feats[j]);
        }
        feats.resize(mtry_);
        std::sort(feats.begin(), feats.end());

        const double parent = gini_cost(t, p);
        double best_cost = parent - 1e-12;
        std::optional<std::pair<std::size_t, std::size_t>> best;
        const auto min_leaf = static_cast<double>(cfg_.min_leaf);
        for (const std::size_t f : feats) {
            const FeatureSplits& fs = splits_[f];
            const std::size_t m = fs.candidates.size();
            std::vector<double> tot(m + 1, 0.0);
            std::vector<double> pos(m + 1, 0.0);
            for (const auto i : sample) {
                tot[fs.bins[i]] += 1.0;
                if (data_.train.positives.test(i)) pos[fs.bins[i]] += 1.0;
            }
            double lt = 0.0;
            double lp = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (fs.numeric) {
                    lt += tot[j];
                    lp += pos[j];
                } else {
                    lt = tot[j];
                    lp = pos[j];
                }
                const double rt = t - lt;
                if (lt < min_leaf || rt < min_leaf) continue;
                const double cost = gini_cost(lt, lp) + gini_cost(rt, p - lp);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = std::make_pair(f, j);
                }
            }
        }
        return best;
    }

    const InductionData& data_;
    const std::vector<FeatureSplits>& splits_;
    const ForestConfig& cfg_;
    Rng rng_;
    std::vector<std::size_t> usable_;
    std::size_t mtry_ = 1;
    std::vector<std::vector<std::size_t>> paths_;
};

// Keeps the tightest condition per (feature, operator) along a path.
std::vector<std::size_t> simplify_path(const InductionData& data, const std::vector<std::size_t>& path) {
    std::map<std::pair<std::uint32_t, Op>, std::size_t> tightest;
    for (const std::size_t id : path) {
        const Condition& c = data.conditions[id].condition;
        const auto key = std::make_pair(c.feature, c.op);
        auto it = tightest.find(key);
        if (it == tightest.end()) {
            tightest.emplace(key, id);
            continue;
        }
        const Condition& o = data.conditions[it->second].condition;
        if ((c.op == Op::kLessEq && c.threshold < o.threshold) || (c.op == Op::kGreater && c.threshold > o.threshold)) {
            it->second = id;
        }
    }
    std::vector<std::size_t> out;
    for (const auto& [key, id] : tightest) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<Rule> tree_rules(const InductionData& data, std::size_t n, const ForestConfig& cfg, std::size_t threads) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (cfg.n_trees < 1 || cfg.max_depth < 1 || cfg.min_leaf < 1) {
        throw std::invalid_argument("forest needs n_trees, max_depth and min_leaf >= 1");
    }
    const auto splits = build_feature_splits(data);
    std::vector<std::vector<std::vector<std::size_t>>> per_tree(cfg.n_trees);
    parallel_for(cfg.n_trees, threads, [&](std::size_t t) {
        TreeBuilder builder(data, splits, cfg, substream_seed(cfg.seed, "tree", t));
        per_tree[t] = builder.grow();
    });

    std::set<std::vector<std::size_t>> seen;
    std::vector<Rule> rules;
    std::vector<double> scores;
    for (const auto& paths : per_tree) {
        for (const auto& path : paths) {
            auto ids = simplify_path(data, path);
            if (!seen.insert(ids).second) continue;
            Rule r = make_rule(data, ids, "tree");
            const double precision =
                r.coverage.covered() == 0
                    ? 0.0
                    : static_cast<double>(r.coverage.covered_positive()) / static_cast<double>(r.coverage.covered());
            const double recall = data.train.n_positive == 0 ? 0.0
                                                             : static_cast<double>(r.coverage.covered_positive()) /
                                                                   static_cast<double>(data.train.n_positive);
            scores.push_back(f_beta(precision, recall, 0.1));
            rules.push_back(std::move(r));
        }
    }
    std::vector<std::size_t> order(rules.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return conditions_less(rules[a].conditions, rules[b].conditions);
    });
    std::vector<Rule> out;
    for (const std::size_t i : order) {
        if (out.size() == n) break;
        rules[i].id = static_cast<RuleIndex>(out.size());
        out.push_back(std::move(rules[i]));
    }
    return out;
}

}  // namespace pors

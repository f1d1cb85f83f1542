#include "pors/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "pors/error.hpp"
#include "pors/random.hpp"

namespace pors {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_missing_token(std::string_view s) {
    static constexpr std::array<std::string_view, 8> kTokens = {"", "na", "nan", "?", "null", "n/a", "none", "-"};
    const std::string l = lower(s);
    return std::find(kTokens.begin(), kTokens.end(), l) != kTokens.end();
}

std::optional<double> parse_number(std::string_view s) {
    double value = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

// Splits one record; honors double-quoted fields with "" escapes. Returns
// false when a quoted field runs past the end of `text`.
bool next_record(std::string_view text, std::size_t& pos, char delim, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                field.push_back(c);
            }
            ++pos;
            continue;
        }
        if (c == '"' && trim(field).empty()) {
            in_quotes = true;
            quoted = true;
            field.clear();
            ++pos;
        } else if (c == delim) {
            fields.push_back(quoted ? field : std::string(trim(field)));
            field.clear();
            quoted = false;
            ++pos;
        } else if (c == '\n') {
            ++pos;
            break;
        } else {
            field.push_back(c);
            ++pos;
        }
    }
    if (in_quotes) {
        return false;
    }
    fields.push_back(quoted ? field : std::string(trim(field)));
    return true;
}

bool is_blank_record(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields[0].empty();
}

std::uint8_t map_label(const std::string& raw, const std::string& positive) { return raw == positive ? 1 : 0; }

std::string choose_positive_label(const std::vector<std::string>& distinct) {
    static constexpr std::array<std::string_view, 8> kPositive = {"1", "yes", "true", "y", "t", "positive", "pos", "1.0"};
    for (const auto& v : distinct) {
        const std::string l = lower(v);
        if (std::find(kPositive.begin(), kPositive.end(), l) != kPositive.end()) {
            return v;
        }
    }
    throw DataError("cannot map label values '" + distinct[0] + "' / '" + distinct[1] +
                    "' to {0,1}; pass an explicit positive label");
}

}  // namespace

bool Column::is_missing(RowId row) const {
    return kind == ColumnKind::kNumeric ? std::isnan(numeric[row]) : codes[row] < 0;
}

Dataset::Dataset(std::vector<Column> features, std::vector<std::uint8_t> labels, std::string label_name)
    : features_(std::move(features)), labels_(std::move(labels)), label_name_(std::move(label_name)) {
    for (const auto& col : features_) {
        const std::size_t n = col.kind == ColumnKind::kNumeric ? col.numeric.size() : col.codes.size();
        if (n != labels_.size()) {
            throw DataError("column '" + col.name + "' has " + std::to_string(n) + " entries, expected " +
                            std::to_string(labels_.size()));
        }
    }
    for (RowId i = 0; i < labels_.size(); ++i) {
        if (labels_[i] > 1) {
            throw DataError("labels must be 0 or 1");
        }
        if (labels_[i] != 0) {
            positives_.push_back(i);
        }
    }
}

std::optional<std::size_t> Dataset::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (features_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

double Dataset::positive_ratio() const noexcept {
    return labels_.empty() ? 0.0 : static_cast<double>(positives_.size()) / static_cast<double>(labels_.size());
}

Dataset parse_dataset(std::string_view text, const LoadOptions& options) {
    std::size_t pos = 0;
    std::vector<std::string> header;
    if (!next_record(text, pos, options.delimiter, header) || is_blank_record(header)) {
        throw DataError("missing header row");
    }
    const auto label_it = std::find(header.begin(), header.end(), options.label_column);
    if (label_it == header.end()) {
        throw DataError("label column '" + options.label_column + "' not found");
    }
    const auto label_col = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::vector<std::string>> cells(header.size());
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (pos < text.size()) {
        ++line;
        if (!next_record(text, pos, options.delimiter, fields)) {
            throw DataError("unterminated quoted field at record " + std::to_string(line));
        }
        if (is_blank_record(fields)) {
            continue;
        }
        if (fields.size() != header.size()) {
            throw DataError("record " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            cells[c].push_back(std::move(fields[c]));
        }
    }
    const std::size_t n_rows = cells[label_col].size();
    if (n_rows == 0) {
        throw DataError("dataset has zero rows");
    }

    // Labels.
    std::vector<std::string> distinct;
    for (const auto& v : cells[label_col]) {
        if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) {
            distinct.push_back(v);
            if (distinct.size() > 2) {
                throw DataError("non-binary label: column '" + options.label_column +
                                "' has more than two distinct values");
            }
        }
    }
    std::string positive;
    if (options.positive_label) {
        positive = *options.positive_label;
        if (std::find(distinct.begin(), distinct.end(), positive) == distinct.end() && distinct.size() == 2) {
            throw DataError("positive label '" + positive + "' does not occur in label column");
        }
    } else if (distinct.size() == 2) {
        positive = choose_positive_label(distinct);
    } else {
        positive = lower(distinct[0]) == "1" || lower(distinct[0]) == "yes" || lower(distinct[0]) == "true"
                       ? distinct[0]
                       : std::string("\x01");
    }
    std::vector<std::uint8_t> labels(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        labels[r] = map_label(cells[label_col][r], positive);
    }

    // Features.
    std::vector<Column> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_col ||
            std::find(options.drop_columns.begin(), options.drop_columns.end(), header[c]) !=
                options.drop_columns.end()) {
            continue;
        }
        Column col;
        col.name = header[c];
        const bool forced = std::find(options.categorical_columns.begin(), options.categorical_columns.end(),
                                      header[c]) != options.categorical_columns.end();
        bool numeric = !forced;
        std::vector<double> values(n_rows, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t r = 0; numeric && r < n_rows; ++r) {
            const std::string& v = cells[c][r];
            if (is_missing_token(v)) {
                continue;
            }
            if (auto x = parse_number(v)) {
                values[r] = *x;
            } else {
                numeric = false;
            }
        }
        if (numeric) {
            col.kind = ColumnKind::kNumeric;
            col.numeric = std::move(values);
        } else {
            col.kind = ColumnKind::kCategorical;
            col.codes.resize(n_rows, -1);
            std::unordered_map<std::string, std::int32_t> dict;
            for (std::size_t r = 0; r < n_rows; ++r) {
                const std::string& v = cells[c][r];
                if (v.empty()) {
                    continue;
                }
                auto [it, inserted] = dict.emplace(v, static_cast<std::int32_t>(col.categories.size()));
                if (inserted) {
                    col.categories.push_back(v);
                }
                col.codes[r] = it->second;
            }
        }
        columns.push_back(std::move(col));
    }
    return Dataset(std::move(columns), std::move(labels), options.label_column);
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read dataset file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
        text.erase(0, 3);
    }
    return parse_dataset(text, options);
}

// ---------------------------------------------------------------------------

Splits split_dataset(std::size_t n_rows, const SplitSpec& spec) {
    if (n_rows < 5) {
        throw std::invalid_argument("split_dataset requires at least 5 rows");
    }
    const double sum = spec.train + spec.validation + spec.test;
    if (spec.train < 0 || spec.validation < 0 || spec.test < 0 || std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must be non-negative and sum to 1");
    }
    std::vector<RowId> ids(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) ids[i] = static_cast<RowId>(i);
    Rng rng(spec.seed);
    rng.shuffle(ids.begin(), ids.end());

    const auto n = static_cast<double>(n_rows);
    const auto n_train = static_cast<std::size_t>(std::floor(spec.train * n + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(spec.validation * n + 1e-9));

    Splits out;
    out.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                          ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

void write_split_manifest(const std::filesystem::path& path, const Splits& splits, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write split manifest '" + path.string() + "'");
    }
    out << "# split manifest seed=" << seed << "\n";
    const auto emit = [&](std::string_view name, const std::vector<RowId>& rows) {
        out << name << ":";
        for (const RowId r : rows) out << ' ' << r;
        out << '\n';
    };
    emit("train", splits.train);
    emit("validation", splits.validation);
    emit("test", splits.test);
}

Splits read_split_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read split manifest '" + path.string() + "'");
    }
    Splits out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw DataError("malformed split manifest line");
        const std::string name = line.substr(0, colon);
        std::vector<RowId>* target = name == "train"        ? &out.train
                                     : name == "validation" ? &out.validation
                                     : name == "test"       ? &out.test
                                                            : nullptr;
        if (target == nullptr) throw DataError("unknown split '" + name + "' in manifest");
        std::istringstream ss(line.substr(colon + 1));
        RowId r = 0;
        while (ss >> r) target->push_back(r);
    }
    return out;
}

SplitView make_view(const Dataset& d, std::vector<RowId> rows, std::string name) {
    SplitView v;
    v.name = std::move(name);
    v.rows = std::move(rows);
    v.positives = Bitset(v.rows.size());
    for (std::size_t i = 0; i < v.rows.size(); ++i) {
        if (v.rows[i] >= d.n_rows()) {
            throw std::out_of_range("row id out of range in split view");
        }
        if (d.label(v.rows[i])) {
            v.positives.set(i);
            ++v.n_positive;
        }
    }
    return v;
}

SplitView full_view(const Dataset& d, std::string name) {
    std::vector<RowId> rows(d.n_rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<RowId>(i);
    return make_view(d, std::move(rows), std::move(name));
}

// ---------------------------------------------------------------------------

Coverage::Coverage(Bitset bits, const Bitset& positives)
    : bits_(std::move(bits)), covered_(bits_.count()), covered_positive_(and_count(bits_, positives)) {}

Coverage unite(const Coverage& a, const Coverage& b, const Bitset& positives) {
    return Coverage(a.bits() | b.bits(), positives);
}

std::string_view op_symbol(Op op) {
    switch (op) {
        case Op::kLessEq:
            return "<=";
        case Op::kGreater:
            return ">";
        case Op::kEqual:
            return "=";
    }
    return "?";
}

bool Condition::matches(const Dataset& d, RowId row) const {
    const Column& col = d.feature(feature);
    switch (op) {
        case Op::kLessEq: {
            const double x = col.numeric[row];
            return !std::isnan(x) && x <= threshold;
        }
        case Op::kGreater: {
            const double x = col.numeric[row];
            return !std::isnan(x) && x > threshold;
        }
        case Op::kEqual:
            return col.codes[row] >= 0 && col.codes[row] == category;
    }
    return false;
}

std::string format_number(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return ec == std::errc{} ? std::string(buf.data(), ptr) : std::to_string(x);
}

std::string describe(const Condition& c, const Dataset& d) {
    const Column& col = d.feature(c.feature);
    std::string out = col.name;
    out += ' ';
    out += op_symbol(c.op);
    out += ' ';
    if (c.op == Op::kEqual) {
        out += c.category >= 0 && static_cast<std::size_t>(c.category) < col.categories.size()
                   ? col.categories[static_cast<std::size_t>(c.category)]
                   : std::string("<unknown>");
    } else {
        out += format_number(c.threshold);
    }
    return out;
}

Bitset condition_bits(const Condition& c, const Dataset& d, const SplitView& view) {
    Bitset bits(view.size());
    for (std::size_t i = 0; i < view.rows.size(); ++i) {
        if (c.matches(d, view.rows[i])) {
            bits.set(i);
        }
    }
    return bits;
}

std::vector<double> quantile_thresholds(const std::vector<double>& sorted_distinct, std::size_t max_bins) {
    if (max_bins < 2) {
        throw std::invalid_argument("max_bins must be >= 2");
    }
    const std::size_t m = sorted_distinct.size();
    if (m < 2) {
        return {};
    }
    const std::size_t t = std::min(max_bins - 1, m - 1);
    std::vector<double> out;
    out.reserve(t);
    // Lower empirical quantile j/(t+1) of the distinct values: index
    // floor(j*(m-1)/(t+1)), strictly increasing and always below m-1.
    for (std::size_t j = 1; j <= t; ++j) {
        const std::size_t idx = j * (m - 1) / (t + 1);
        if (out.empty() || sorted_distinct[idx] > out.back()) {
            out.push_back(sorted_distinct[idx]);
        }
    }
    return out;
}

std::vector<CoveredCondition> derive_conditions(const Dataset& d, const SplitView& view, std::size_t max_bins) {
    if (max_bins < 2) {
        throw std::invalid_argument("max_bins must be >= 2");
    }
    std::vector<CoveredCondition> out;
    const auto add = [&](const Condition& c) {
        out.push_back({c, Coverage(condition_bits(c, d, view), view.positives)});
    };
    for (std::uint32_t f = 0; f < d.n_features(); ++f) {
        const Column& col = d.feature(f);
        if (col.kind == ColumnKind::kNumeric) {
            std::vector<double> values;
            values.reserve(view.size());
            for (const RowId r : view.rows) {
                if (!std::isnan(col.numeric[r])) values.push_back(col.numeric[r]);
            }
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (const double t : quantile_thresholds(values, max_bins)) {
                add(Condition{f, Op::kLessEq, t, -1});
                add(Condition{f, Op::kGreater, t, -1});
            }
        } else {
            std::map<std::int32_t, std::size_t> freq;
            for (const RowId r : view.rows) {
                if (col.codes[r] >= 0) ++freq[col.codes[r]];
            }
            if (freq.size() < 2) {
                continue;  // constant (or empty) column
            }
            std::vector<std::pair<std::int32_t, std::size_t>> ranked(freq.begin(), freq.end());
            std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return col.categories[static_cast<std::size_t>(a.first)] <
                       col.categories[static_cast<std::size_t>(b.first)];
            });
            if (ranked.size() > max_bins) ranked.resize(max_bins);
            for (const auto& [code, count] : ranked) {
                add(Condition{f, Op::kEqual, 0.0, code});
            }
        }
    }
    return out;
}

}  // namespace pors

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pors/bitset.hpp"

namespace pors {

using RowId = std::uint32_t;

enum class ColumnKind { kNumeric, kCategorical };

/// One feature column. Numeric columns store NaN for missing values;
/// categorical columns store a code into `categories`, or -1 when missing.
struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::kNumeric;
    std::vector<double> numeric;
    std::vector<std::int32_t> codes;
    std::vector<std::string> categories;

    [[nodiscard]] bool is_missing(RowId row) const;
};

/// Labeled tabular data with binary labels. Immutable after loading.
class Dataset {
  public:
    Dataset(std::vector<Column> features, std::vector<std::uint8_t> labels, std::string label_name);

    [[nodiscard]] std::size_t n_rows() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return features_.size(); }
    [[nodiscard]] const std::vector<Column>& features() const noexcept { return features_; }
    [[nodiscard]] const Column& feature(std::size_t i) const { return features_.at(i); }
    [[nodiscard]] std::optional<std::size_t> feature_index(std::string_view name) const;
    [[nodiscard]] const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
    [[nodiscard]] bool label(RowId row) const { return labels_[row] != 0; }
    [[nodiscard]] const std::vector<RowId>& positive_index() const noexcept { return positives_; }
    [[nodiscard]] const std::string& label_name() const noexcept { return label_name_; }
    [[nodiscard]] double positive_ratio() const noexcept;

  private:
    std::vector<Column> features_;
    std::vector<std::uint8_t> labels_;
    std::vector<RowId> positives_;
    std::string label_name_;
};

struct LoadOptions {
    std::string label_column;
    char delimiter = ',';
    /// Raw label value mapped to 1. When unset, the usual spellings of a
    /// positive outcome ("1", "yes", "true", ...) are recognized.
    std::optional<std::string> positive_label;
    std::vector<std::string> categorical_columns;  // forced categorical
    std::vector<std::string> drop_columns;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options);
Dataset parse_dataset(std::string_view text, const LoadOptions& options);

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
    std::uint64_t seed = 0;
    double train = 0.60;
    double validation = 0.20;
    double test = 0.20;
};

struct Splits {
    std::vector<RowId> train;
    std::vector<RowId> validation;
    std::vector<RowId> test;
};

/// Seeded shuffle of row ids cut into floor(train*N) / floor(validation*N) /
/// remainder. Each part is returned sorted ascending.
Splits split_dataset(std::size_t n_rows, const SplitSpec& spec);
inline Splits split_dataset(const Dataset& d, const SplitSpec& spec) { return split_dataset(d.n_rows(), spec); }

void write_split_manifest(const std::filesystem::path& path, const Splits& splits, std::uint64_t seed);
Splits read_split_manifest(const std::filesystem::path& path);

/// A subset of dataset rows; bit i of any coverage over this view refers to rows[i].
struct SplitView {
    std::string name;
    std::vector<RowId> rows;
    Bitset positives;
    std::size_t n_positive = 0;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
};

SplitView make_view(const Dataset& d, std::vector<RowId> rows, std::string name);
SplitView full_view(const Dataset& d, std::string name = "all");

// ---------------------------------------------------------------------------
// Coverage

/// Rows of a view covered by a rule or rule subset, with cached counts that
/// always equal the popcounts of `bits` (and of `bits & positives`).
class Coverage {
  public:
    Coverage() = default;
    Coverage(Bitset bits, const Bitset& positives);
    static Coverage empty(std::size_t n_rows) { return Coverage(Bitset(n_rows), Bitset(n_rows)); }

    [[nodiscard]] const Bitset& bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t covered() const noexcept { return covered_; }
    [[nodiscard]] std::size_t covered_positive() const noexcept { return covered_positive_; }
    [[nodiscard]] std::size_t n_rows() const noexcept { return bits_.size(); }

    friend bool operator==(const Coverage&, const Coverage&) = default;

  private:
    Bitset bits_;
    std::size_t covered_ = 0;
    std::size_t covered_positive_ = 0;
};

Coverage unite(const Coverage& a, const Coverage& b, const Bitset& positives);

// ---------------------------------------------------------------------------
// Conditions

enum class Op : std::uint8_t { kLessEq, kGreater, kEqual };

std::string_view op_symbol(Op op);

/// (feature, operator, value). `threshold` is used by <= and >, `category`
/// (a code into the column's dictionary) by =.
struct Condition {
    std::uint32_t feature = 0;
    Op op = Op::kLessEq;
    double threshold = 0.0;
    std::int32_t category = -1;

    /// Missing values never satisfy a condition.
    [[nodiscard]] bool matches(const Dataset& d, RowId row) const;

    friend bool operator==(const Condition&, const Condition&) = default;
    friend std::partial_ordering operator<=>(const Condition& a, const Condition& b) {
        if (auto c = a.feature <=> b.feature; c != 0) return c;
        if (auto c = a.op <=> b.op; c != 0) return c;
        if (auto c = a.category <=> b.category; c != 0) return c;
        return a.threshold <=> b.threshold;
    }
};

/// Shortest round-trip decimal rendering of a threshold.
std::string format_number(double x);

/// Human-readable form, e.g. "age <= 30" or "job = admin.".
std::string describe(const Condition& c, const Dataset& d);

Bitset condition_bits(const Condition& c, const Dataset& d, const SplitView& view);

struct CoveredCondition {
    Condition condition;
    Coverage coverage;
};

inline constexpr std::size_t kDefaultMaxBins = 32;

/// Candidate conditions over `view`: up to max_bins-1 quantile thresholds of
/// each numeric column's distinct values (one <= and one > each) and one =
/// per category, keeping the max_bins most frequent.
std::vector<CoveredCondition> derive_conditions(const Dataset& d, const SplitView& view,
                                                std::size_t max_bins = kDefaultMaxBins);

/// Thresholds used for a sorted list of distinct values.
std::vector<double> quantile_thresholds(const std::vector<double>& sorted_distinct, std::size_t max_bins);

}  // namespace pors

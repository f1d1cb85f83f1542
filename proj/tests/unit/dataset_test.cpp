#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "pors/bitset.hpp"
#include "pors/dataset.hpp"
#include "pors/error.hpp"
#include "synthetic.hpp"

namespace pors {
namespace {

LoadOptions label(const std::string& name) {
    LoadOptions o;
    o.label_column = name;
    return o;
}

TEST(Bitset, CountsAndTailStaysClear) {
    Bitset b(70, true);
    EXPECT_EQ(b.count(), 70u);
    Bitset c(70);
    c.set(0);
    c.set(69);
    EXPECT_EQ(and_count(b, c), 2u);
    EXPECT_EQ(or_count(b, c), 70u);
    b.subtract(c);
    EXPECT_EQ(b.count(), 68u);
    EXPECT_FALSE(b.test(69));
    EXPECT_EQ(c.ones(), (std::vector<std::size_t>{0, 69}));
    EXPECT_THROW(and_count(Bitset(3), Bitset(4)), std::invalid_argument);
}

TEST(LoadDataset, FourRowsHalfPositive) {
    const Dataset d = parse_dataset("a,y\n1,0\n2,0\n3,1\n4,1\n", label("y"));
    EXPECT_EQ(d.n_rows(), 4u);
    EXPECT_EQ(d.positive_index().size(), 2u);
    EXPECT_DOUBLE_EQ(d.positive_ratio(), 0.5);
}

TEST(LoadDataset, ThreeLabelValuesIsNonBinary) {
    try {
        parse_dataset("a,y\n1,0\n2,1\n3,2\n", label("y"));
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("non-binary label"), std::string::npos);
    }
}

TEST(LoadDataset, Errors) {
    EXPECT_THROW(parse_dataset("a,y\n", label("y")), DataError);
    EXPECT_THROW(parse_dataset("a,b\n1,0\n", label("y")), DataError);
    EXPECT_THROW(load_dataset("/nonexistent/file.csv", label("y")), DataError);
    EXPECT_THROW(parse_dataset("a,y\n1,0\n2\n", label("y")), DataError);
}

TEST(LoadDataset, InfersKindsAndMissingValues) {
    const Dataset d = parse_dataset("num,cat,y\n1.5,\"a,b\",yes\n?,c,no\n3,,no\n", label("y"));
    const Column& num = d.feature(*d.feature_index("num"));
    const Column& cat = d.feature(*d.feature_index("cat"));
    EXPECT_EQ(num.kind, ColumnKind::kNumeric);
    EXPECT_TRUE(std::isnan(num.numeric[1]));
    EXPECT_EQ(cat.kind, ColumnKind::kCategorical);
    EXPECT_EQ(cat.categories[static_cast<std::size_t>(cat.codes[0])], "a,b");
    EXPECT_TRUE(cat.is_missing(2));
    EXPECT_EQ(d.positive_index(), (std::vector<RowId>{0}));
}

TEST(LoadDataset, DelimiterDropAndExplicitPositive) {
    LoadOptions o = label("y");
    o.delimiter = ';';
    o.drop_columns = {"skip"};
    o.positive_label = "no";
    const Dataset d = parse_dataset("\xEF\xBB\xBF" "a;skip;y\n1;x;yes\n2;x;no\n", o);
    EXPECT_EQ(d.n_features(), 1u);
    EXPECT_EQ(d.positive_index(), (std::vector<RowId>{1}));
}

TEST(SplitDataset, SizesFollowFloorArithmetic) {
    const auto s100 = split_dataset(100, SplitSpec{7});
    EXPECT_EQ(s100.train.size(), 60u);
    EXPECT_EQ(s100.validation.size(), 20u);
    EXPECT_EQ(s100.test.size(), 20u);
    const auto s10 = split_dataset(10, SplitSpec{7});
    EXPECT_EQ(s10.train.size(), 6u);
    EXPECT_EQ(s10.validation.size(), 2u);
    EXPECT_EQ(s10.test.size(), 2u);
    const auto s7 = split_dataset(7, SplitSpec{1});
    EXPECT_EQ(s7.train.size(), 4u);
    EXPECT_EQ(s7.validation.size(), 1u);
    EXPECT_EQ(s7.test.size(), 2u);
}

TEST(SplitDataset, DeterministicPartition) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = split_dataset(123, SplitSpec{seed});
        const auto b = split_dataset(123, SplitSpec{seed});
        EXPECT_EQ(a.train, b.train);
        EXPECT_EQ(a.validation, b.validation);
        EXPECT_EQ(a.test, b.test);
        std::set<RowId> all(a.train.begin(), a.train.end());
        all.insert(a.validation.begin(), a.validation.end());
        all.insert(a.test.begin(), a.test.end());
        EXPECT_EQ(all.size(), 123u);
        EXPECT_EQ(*all.rbegin(), 122u);
    }
    EXPECT_NE(split_dataset(123, SplitSpec{1}).train, split_dataset(123, SplitSpec{2}).train);
}

TEST(SplitDataset, RejectsTinyInputs) {
    EXPECT_THROW(split_dataset(4, SplitSpec{}), std::invalid_argument);
    EXPECT_THROW(split_dataset(10, SplitSpec{0, 0.5, 0.5, 0.5}), std::invalid_argument);
}

TEST(SplitDataset, ManifestRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "pors_manifest_test.txt";
    const auto s = split_dataset(40, SplitSpec{3});
    write_split_manifest(path, s, 3);
    const auto r = read_split_manifest(path);
    EXPECT_EQ(r.train, s.train);
    EXPECT_EQ(r.validation, s.validation);
    EXPECT_EQ(r.test, s.test);
    std::filesystem::remove(path);
}

TEST(QuantileThresholds, LowerMedianForFourValues) {
    EXPECT_EQ(quantile_thresholds({1, 2, 3, 4}, 2), (std::vector<double>{2}));
    EXPECT_TRUE(quantile_thresholds({5}, 8).empty());
    EXPECT_THROW(quantile_thresholds({1, 2}, 1), std::invalid_argument);
}

TEST(QuantileThresholds, StrictlyIncreasingAndBounded) {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(i * 0.5);
    for (std::size_t bins = 2; bins < 70; ++bins) {
        const auto t = quantile_thresholds(v, bins);
        EXPECT_LE(t.size(), bins - 1);
        EXPECT_TRUE(std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) == t.end());
    }
}

TEST(DeriveConditions, NumericMedianSplit) {
    const Dataset d = parse_dataset("x,y\n1,0\n2,0\n3,1\n4,1\n", label("y"));
    const auto conds = derive_conditions(d, full_view(d), 2);
    ASSERT_EQ(conds.size(), 2u);
    EXPECT_EQ(describe(conds[0].condition, d), "x <= 2");
    EXPECT_EQ(describe(conds[1].condition, d), "x > 2");
    EXPECT_EQ(conds[0].coverage.covered(), 2u);
    EXPECT_EQ(conds[1].coverage.covered_positive(), 2u);
}

TEST(DeriveConditions, CategoricalAndConstantColumns) {
    const Dataset d = parse_dataset("c,k,y\na,z,0\na,z,1\nb,z,0\n", label("y"));
    const auto conds = derive_conditions(d, full_view(d), 8);
    ASSERT_EQ(conds.size(), 2u);
    EXPECT_EQ(describe(conds[0].condition, d), "c = a");
    EXPECT_EQ(describe(conds[1].condition, d), "c = b");
}

TEST(DeriveConditions, CategoricalCapKeepsMostFrequent) {
    const Dataset d = parse_dataset("c,y\na,0\nb,1\nb,0\nc,0\nc,1\nc,0\n", label("y"));
    const auto conds = derive_conditions(d, full_view(d), 2);
    ASSERT_EQ(conds.size(), 2u);
    EXPECT_EQ(describe(conds[0].condition, d), "c = c");
    EXPECT_EQ(describe(conds[1].condition, d), "c = b");
}

TEST(DeriveConditions, CoverageMatchesRowScanOnSplit) {
    const Dataset d = testing::synthetic_fraud(5, 700);
    const auto splits = split_dataset(d, SplitSpec{5});
    const SplitView train = make_view(d, splits.train, "train");
    const auto conds = derive_conditions(d, train, 16);
    ASSERT_FALSE(conds.empty());
    for (const auto& cc : conds) {
        std::size_t covered = 0;
        std::size_t positive = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const bool m = cc.condition.matches(d, train.rows[i]);
            EXPECT_EQ(m, cc.coverage.bits().test(i));
            covered += m ? 1 : 0;
            positive += (m && d.label(train.rows[i])) ? 1 : 0;
        }
        EXPECT_EQ(covered, cc.coverage.covered());
        EXPECT_EQ(positive, cc.coverage.covered_positive());
    }
}

TEST(Condition, MissingNeverMatches) {
    const Dataset d = parse_dataset("x,c,y\nNA,,1\n1,a,0\n", label("y"));
    const Condition le{0, Op::kLessEq, 5.0, -1};
    const Condition gt{0, Op::kGreater, -5.0, -1};
    EXPECT_FALSE(le.matches(d, 0));
    EXPECT_FALSE(gt.matches(d, 0));
    EXPECT_TRUE(le.matches(d, 1));
    const Condition eq{1, Op::kEqual, 0.0, 0};
    EXPECT_FALSE(eq.matches(d, 0));
    EXPECT_TRUE(eq.matches(d, 1));
}

}  // namespace
}  // namespace pors

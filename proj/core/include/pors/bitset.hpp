#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pors {

/// Fixed-length bitset over row positions of a split. Length is set at
/// construction; all binary operations require equal lengths.
class Bitset {
  public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    Bitset() = default;
    explicit Bitset(std::size_t n_bits, bool value = false);

    [[nodiscard]] std::size_t size() const noexcept { return n_bits_; }
    [[nodiscard]] std::size_t word_count() const noexcept { return words_.size(); }
    [[nodiscard]] std::span<const Word> words() const noexcept { return words_; }

    [[nodiscard]] bool test(std::size_t i) const noexcept {
        return (words_[i / kWordBits] >> (i % kWordBits)) & Word{1};
    }
    void set(std::size_t i) noexcept { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
    void reset(std::size_t i) noexcept { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }

    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] bool any() const noexcept;
    [[nodiscard]] bool none() const noexcept { return !any(); }

    Bitset& operator&=(const Bitset& other);
    Bitset& operator|=(const Bitset& other);
    /// this &= ~other
    Bitset& subtract(const Bitset& other);

    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
    friend bool operator==(const Bitset&, const Bitset&) = default;

    /// Positions of set bits in ascending order.
    [[nodiscard]] std::vector<std::size_t> ones() const;

    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word word = words_[w];
            while (word != 0) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(word));
                fn(w * kWordBits + bit);
                word &= word - 1;
            }
        }
    }

  private:
    void clear_tail() noexcept;

    std::size_t n_bits_ = 0;
    std::vector<Word> words_;
};

// Fused counting kernels; none of them materialize an intermediate bitset.
std::size_t and_count(const Bitset& a, const Bitset& b);
std::size_t and_count(const Bitset& a, const Bitset& b, const Bitset& c);
std::size_t or_count(const Bitset& a, const Bitset& b);
/// popcount((a | b) & c)
std::size_t or_and_count(const Bitset& a, const Bitset& b, const Bitset& c);

}  // namespace pors

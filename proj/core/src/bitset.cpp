#include "pors/bitset.hpp"

#include <stdexcept>

namespace pors {

namespace {

void require_same_size(const Bitset& a, const Bitset& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("bitset length mismatch");
    }
}

}  // namespace

Bitset::Bitset(std::size_t n_bits, bool value)
    : n_bits_(n_bits), words_((n_bits + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}) {
    clear_tail();
}

void Bitset::clear_tail() noexcept {
    const std::size_t tail = n_bits_ % kWordBits;
    if (tail != 0 && !words_.empty()) {
        words_.back() &= (Word{1} << tail) - 1;
    }
}

std::size_t Bitset::count() const noexcept {
    std::size_t total = 0;
    for (const Word w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

bool Bitset::any() const noexcept {
    for (const Word w : words_) {
        if (w != 0) {
            return true;
        }
    }
    return false;
}

Bitset& Bitset::operator&=(const Bitset& other) {
    require_same_size(*this, other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] &= other.words_[i];
    }
    return *this;
}

Bitset& Bitset::operator|=(const Bitset& other) {
    require_same_size(*this, other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] |= other.words_[i];
    }
    return *this;
}

Bitset& Bitset::subtract(const Bitset& other) {
    require_same_size(*this, other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] &= ~other.words_[i];
    }
    return *this;
}

std::vector<std::size_t> Bitset::ones() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each_set([&](std::size_t i) { out.push_back(i); });
    return out;
}

std::size_t and_count(const Bitset& a, const Bitset& b) {
    require_same_size(a, b);
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
    }
    return total;
}

std::size_t and_count(const Bitset& a, const Bitset& b, const Bitset& c) {
    require_same_size(a, b);
    require_same_size(a, c);
    const auto wa = a.words();
    const auto wb = b.words();
    const auto wc = c.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(wa[i] & wb[i] & wc[i]));
    }
    return total;
}

std::size_t or_count(const Bitset& a, const Bitset& b) {
    require_same_size(a, b);
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(wa[i] | wb[i]));
    }
    return total;
}

std::size_t or_and_count(const Bitset& a, const Bitset& b, const Bitset& c) {
    require_same_size(a, b);
    require_same_size(a, c);
    const auto wa = a.words();
    const auto wb = b.words();
    const auto wc = c.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount((wa[i] | wb[i]) & wc[i]));
    }
    return total;
}

}  // namespace pors

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace lr1 {

using SymbolId = int;

/// Dense bitset over terminal ids. Terminals occupy ids [0, T) in every
/// grammar model, so a set only needs T bits.
class TerminalSet {
public:
    TerminalSet() = default;
    explicit TerminalSet(int universe) : bits_((universe + 63) / 64, 0), universe_(universe) {}

    int universe() const { return universe_; }

    void insert(SymbolId t) { bits_[t >> 6] |= std::uint64_t{1} << (t & 63); }
    void erase(SymbolId t) { bits_[t >> 6] &= ~(std::uint64_t{1} << (t & 63)); }
    bool contains(SymbolId t) const {
        return t >= 0 && t < universe_ && (bits_[t >> 6] >> (t & 63)) & 1;
    }

    // Returns true when this set grew.
    bool merge(const TerminalSet& other) {
        bool grew = false;
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            auto next = bits_[i] | other.bits_[i];
            grew |= next != bits_[i];
            bits_[i] = next;
        }
        return grew;
    }

    bool intersects(const TerminalSet& other) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & other.bits_[i]) return true;
        return false;
    }

    bool subset_of(const TerminalSet& other) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & ~other.bits_[i]) return false;
        return true;
    }

    bool empty() const {
        for (auto w : bits_)
            if (w) return false;
        return true;
    }

    int size() const {
        int n = 0;
        for (auto w : bits_) n += __builtin_popcountll(w);
        return n;
    }

    std::vector<SymbolId> members() const {
        std::vector<SymbolId> out;
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            auto w = bits_[i];
            while (w) {
                int b = __builtin_ctzll(w);
                out.push_back(static_cast<SymbolId>(i * 64 + b));
                w &= w - 1;
            }
        }
        return out;
    }

    std::size_t hash() const {
        std::size_t h = 1469598103934665603ull;
        for (auto w : bits_) h = (h ^ std::hash<std::uint64_t>{}(w)) * 1099511628211ull;
        return h;
    }

    friend bool operator==(const TerminalSet&, const TerminalSet&) = default;
    friend auto operator<=>(const TerminalSet& a, const TerminalSet& b) { return a.bits_ <=> b.bits_; }

private:
    std::vector<std::uint64_t> bits_;
    int universe_ = 0;
};

}  // namespace lr1

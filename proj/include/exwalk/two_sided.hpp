#pragma once

#include <cstdint>
#include <vector>

namespace exwalk {

/// Array indexed by a signed site coordinate. Nearest-neighbour walks visit
/// exactly the integer interval [min,max], so two grow-only vectors (one per
/// sign) cover the visited set with O(1) access and O(range) memory.
template <class T>
class TwoSided {
public:
    void ensure(std::int64_t x) {
        if (x >= 0) {
            if (pos_.size() <= static_cast<std::size_t>(x)) pos_.resize(x + 1);
        } else {
            std::size_t i = static_cast<std::size_t>(-1 - x);
            if (neg_.size() <= i) neg_.resize(i + 1);
        }
    }

    T& ref(std::int64_t x) {
        return x >= 0 ? pos_[static_cast<std::size_t>(x)]
                      : neg_[static_cast<std::size_t>(-1 - x)];
    }

    T get(std::int64_t x) const {
        if (x >= 0) {
            std::size_t i = static_cast<std::size_t>(x);
            return i < pos_.size() ? pos_[i] : T{};
        }
        std::size_t i = static_cast<std::size_t>(-1 - x);
        return i < neg_.size() ? neg_[i] : T{};
    }

    std::int64_t lo() const { return -static_cast<std::int64_t>(neg_.size()); }
    std::int64_t hi() const { return static_cast<std::int64_t>(pos_.size()) - 1; }

    void clear() {
        pos_.clear();
        neg_.clear();
    }

private:
    std::vector<T> pos_;  // x >= 0
    std::vector<T> neg_;  // x < 0, index -1-x
};

}  // namespace exwalk

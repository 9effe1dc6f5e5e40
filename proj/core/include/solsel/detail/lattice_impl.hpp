#pragma once

#include <cstdlib>

namespace solsel {

namespace detail {
template <class F>
void for_each_index_rec(std::vector<int>& cur, int slot, int budget, F& f) {
    if (slot + 1 == static_cast<int>(cur.size())) {
        for (int v = -budget; v <= budget; ++v) {
            cur[slot] = v;
            f(cur);
        }
        return;
    }
    for (int v = -budget; v <= budget; ++v) {
        cur[slot] = v;
        for_each_index_rec(cur, slot + 1, budget - std::abs(v), f);
    }
}
} // namespace detail

// Visits every integer vector with l1-norm <= radius (all degrees).
template <class F>
void for_each_index(int dim, int radius, F&& f) {
    std::vector<int> cur(dim, 0);
    detail::for_each_index_rec(cur, 0, radius, f);
}

} // namespace solsel

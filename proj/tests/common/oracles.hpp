#ifndef MOSCL_TEST_ORACLES_HPP
#define MOSCL_TEST_ORACLES_HPP

// Brute-force references used by the unit and acceptance suites. These do not
// call into the scheduler; they enumerate the search space directly.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace moscl::oracle {

namespace detail {

inline void matchings(std::vector<std::size_t>& free_items, const std::vector<std::size_t>& weight,
                      std::size_t current_max, std::size_t& best) {
    if (current_max >= best) return;
    if (free_items.empty()) {
        best = current_max;
        return;
    }
    const auto first = free_items.front();
    for (std::size_t k = 1; k < free_items.size(); ++k) {
        const auto partner = free_items[k];
        std::vector<std::size_t> rest;
        rest.reserve(free_items.size() - 2);
        for (std::size_t m = 1; m < free_items.size(); ++m) {
            if (m != k) rest.push_back(free_items[m]);
        }
        matchings(rest, weight, std::max(current_max, weight[first] + weight[partner]), best);
    }
}

}  // namespace detail

/// Minimum over all perfect matchings of the largest pair sum (N even).
inline std::size_t min_max_pair_sum(const std::vector<std::size_t>& weight) {
    std::vector<std::size_t> items(weight.size());
    for (std::size_t k = 0; k < items.size(); ++k) items[k] = k;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    detail::matchings(items, weight, 0, best);
    return best;
}

/// Number of perfect matchings of n items, (n - 1)!!.
inline std::size_t perfect_matching_count(std::size_t n) {
    std::size_t c = 1;
    for (std::size_t k = n; k > 1; k -= 2) c *= k - 1;
    return c;
}

}  // namespace moscl::oracle

#endif

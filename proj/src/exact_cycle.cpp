#include "longcycle/exact_cycle.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

namespace longcycle {

std::uint32_t longest_cycle_exact(const Digraph& d, std::uint32_t max_n) {
    if (max_n > 20) throw std::invalid_argument("oracle cap is 20 vertices");
    if (d.n > max_n) throw std::invalid_argument("digraph exceeds oracle cap");
    const std::uint32_t n = d.n;

    std::vector<std::uint32_t> out_mask(n, 0), in_mask(n, 0);
    for (const auto& [v, w] : d.edges) {
        out_mask[v] |= 1u << w;
        in_mask[w] |= 1u << v;
    }

    std::uint32_t best = 0;
    std::vector<std::uint32_t> dp;
    for (std::uint32_t a = 0; a + 1 < n; ++a) {
        const std::uint32_t m = n - a - 1; // vertices a+1..n-1, bit i = a+1+i
        dp.assign(std::size_t{1} << m, 0);
        const std::uint32_t a_out = out_mask[a] >> (a + 1);
        const std::uint32_t a_in = in_mask[a] >> (a + 1);
        // paths a -> w seed the single-vertex masks
        for (std::uint32_t rest = a_out; rest; rest &= rest - 1) {
            std::uint32_t bit = rest & (0u - rest);
            dp[bit] = bit;
        }
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            std::uint32_t ends = dp[mask];
            if (!ends) continue;
            // close the cycle through any endpoint with an edge back to a
            if (ends & a_in)
                best = std::max(best, std::popcount(mask) + 1u);
            for (std::uint32_t rest = ends; rest; rest &= rest - 1) {
                std::uint32_t e = std::countr_zero(rest);
                std::uint32_t ext = (out_mask[a + 1 + e] >> (a + 1)) & ~mask;
                for (std::uint32_t r2 = ext; r2; r2 &= r2 - 1) {
                    std::uint32_t bit = r2 & (0u - r2);
                    dp[mask | bit] |= bit;
                }
            }
        }
    }
    return best;
}

} // namespace longcycle

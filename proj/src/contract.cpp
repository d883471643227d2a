#include "longcycle/contract.hpp"

#include <algorithm>
#include <string>

namespace longcycle {

namespace {

constexpr std::uint64_t kContractSalt = 0x43; // choice sampling
constexpr std::uint64_t kRoleSalt = 0x4C;     // role re-splits

// draws 5 without replacement; the order of the draw assigns the roles
void draw_five(std::vector<std::uint32_t>& cand, SplitMix64& rng,
               std::uint32_t* out) {
    for (std::size_t i = 0; i < 5; ++i) {
        std::size_t j = i + rng.next_below(cand.size() - i);
        std::swap(cand[i], cand[j]);
        out[i] = cand[i];
    }
}

} // namespace

ContractedDigraph contract(const PeelResult& pr,
                           const std::vector<PackingResult>& packings,
                           const ColoredDigraph& cd, std::uint64_t seed) {
    ContractedDigraph d;
    d.v1 = pr.v1;
    d.n_base = static_cast<std::uint32_t>(d.v1.size());
    for (const PackingResult& pk : packings)
        for (const auto& path : pk.paths) d.super_paths.push_back(path);
    d.n = d.n_base + static_cast<std::uint32_t>(d.super_paths.size());
    d.in_choice.resize(std::size_t{d.n} * 5);
    d.out_choice.resize(std::size_t{d.n} * 5);

    SplitMix64 rng(derive_seed(seed, kContractSalt));
    std::vector<std::uint32_t> cand;
    auto base_index = [&](Vertex g) {
        return static_cast<std::uint32_t>(
            std::lower_bound(d.v1.begin(), d.v1.end(), g) - d.v1.begin());
    };
    auto gather = [&](Vertex g, ColorSide side) {
        cand.clear();
        for (Vertex w : color_neighbors(cd, g, side, d.v1))
            cand.push_back(base_index(w));
    };
    for (std::uint32_t v = 0; v < d.n; ++v) {
        Vertex head = v < d.n_base ? d.v1[v] : d.super_paths[v - d.n_base].front();
        Vertex tail = v < d.n_base ? d.v1[v] : d.super_paths[v - d.n_base].back();
        gather(head, ColorSide::BlueIn);
        if (cand.size() < 5)
            throw InsufficientNeighbors(
                "vertex " + std::to_string(v) + ": only " +
                std::to_string(cand.size()) + " usable in-neighbors");
        draw_five(cand, rng, &d.in_choice[std::size_t{v} * 5]);
        gather(tail, ColorSide::RedOut);
        if (cand.size() < 5)
            throw InsufficientNeighbors(
                "vertex " + std::to_string(v) + ": only " +
                std::to_string(cand.size()) + " usable out-neighbors");
        draw_five(cand, rng, &d.out_choice[std::size_t{v} * 5]);
    }
    return d;
}

ContractedDigraph synthetic_dstar(std::uint32_t n_base, std::uint32_t n_super,
                                  std::uint64_t seed) {
    if (n_base < 6)
        throw std::invalid_argument("need at least 6 base vertices");
    ContractedDigraph d;
    d.n_base = n_base;
    d.n = n_base + n_super;
    d.v1.resize(n_base);
    for (std::uint32_t v = 0; v < n_base; ++v) d.v1[v] = v;
    d.super_paths.resize(n_super);
    for (std::uint32_t s = 0; s < n_super; ++s)
        d.super_paths[s] = {n_base + s};
    d.in_choice.resize(std::size_t{d.n} * 5);
    d.out_choice.resize(std::size_t{d.n} * 5);

    SplitMix64 rng(derive_seed(seed, kContractSalt));
    auto draw = [&](std::uint32_t v, std::uint32_t* out) {
        std::size_t got = 0;
        while (got < 5) {
            std::uint32_t w = static_cast<std::uint32_t>(rng.next_below(n_base));
            if (w == v) continue;
            bool dup = false;
            for (std::size_t i = 0; i < got; ++i) dup |= out[i] == w;
            if (!dup) out[got++] = w;
        }
    };
    for (std::uint32_t v = 0; v < d.n; ++v) {
        draw(v, &d.in_choice[std::size_t{v} * 5]);
        draw(v, &d.out_choice[std::size_t{v} * 5]);
    }
    return d;
}

void resplit_roles(ContractedDigraph& d, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, kRoleSalt));
    auto shuffle5 = [&](std::uint32_t* slots) {
        for (std::size_t i = 0; i < 4; ++i) {
            std::size_t j = i + rng.next_below(5 - i);
            std::swap(slots[i], slots[j]);
        }
    };
    for (std::uint32_t v = 0; v < d.n; ++v) {
        shuffle5(&d.in_choice[std::size_t{v} * 5]);
        shuffle5(&d.out_choice[std::size_t{v} * 5]);
    }
}

} // namespace longcycle

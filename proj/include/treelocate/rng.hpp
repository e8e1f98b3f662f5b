#pragma once

#include <cstdint>
#include <random>

namespace treelocate {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to turn (master seed, stream index) into
/// statistically independent engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept
{
    return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Engine for one independent trial. Results depend only on (master, trial),
/// never on which worker runs the trial.
inline Rng trial_rng(std::uint64_t master, std::uint64_t trial)
{
    return Rng(derive_seed(master, trial));
}

} // namespace treelocate

#pragma once

#include <cstdint>
#include <random>

namespace uavcomp {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based sub-seed: the stream for (master, a, b) does not depend on
// how work is split across threads.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return Engine(derive_seed(master, a, b));
}

// Fixed stream tags so that independent consumers of one master seed never collide.
namespace stream {
inline constexpr std::uint64_t deployment = 0x01;
inline constexpr std::uint64_t heights = 0x02;
inline constexpr std::uint64_t fading = 0x03;
inline constexpr std::uint64_t formation = 0x04;
inline constexpr std::uint64_t noise = 0x05;
inline constexpr std::uint64_t lipschitz = 0x06;
inline constexpr std::uint64_t trial = 0x10;
}  // namespace stream

}  // namespace uavcomp

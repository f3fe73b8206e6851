#include "msssn/sim/rng.hpp"

#include <fmt/format.h>

#include "msssn/error.hpp"

namespace msssn::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label) {
    return splitmix64(splitmix64(master_seed) ^ fnv1a64(label));
}

RngStream::RngStream(std::uint64_t master_seed, std::string label)
    : label_(std::move(label)), engine_(derive_seed(master_seed, label_)) {}

double RngStream::uniform01() {
    // 53 high bits -> [0, 1); independent of the standard library's
    // generate_canonical implementation.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian(double mean, double stddev) {
    return mean + stddev * normal_(engine_);
}

std::int64_t RngStream::int_below(std::int64_t n) {
    if (n < 1) throw InvalidBound(fmt::format("int_below({}) on stream '{}'", n, label_));
    if (n == 1) return 0;
    std::uniform_int_distribution<std::int64_t> dist(0, n - 1);
    return dist(engine_);
}

}  // namespace msssn::sim

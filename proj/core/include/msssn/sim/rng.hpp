#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace msssn::sim {

/// A labeled random stream. The generator state is derived from
/// (master_seed, label) alone, so streams never perturb each other and
/// adding a new consumer leaves existing draw sequences untouched.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::string label);

    [[nodiscard]] const std::string& label() const { return label_; }

    /// Uniform on [0, 1).
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double gaussian(double mean, double stddev);
    /// Uniform integer on [0, n). Throws InvalidBound when n < 1.
    std::int64_t int_below(std::int64_t n);
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::string label_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Hands out labeled streams derived from one master seed.
class RngFactory {
public:
    explicit RngFactory(std::uint64_t master_seed) : seed_(master_seed) {}

    [[nodiscard]] std::uint64_t master_seed() const { return seed_; }
    [[nodiscard]] RngStream stream(std::string label) const { return RngStream(seed_, std::move(label)); }

private:
    std::uint64_t seed_;
};

/// Seed mixing used by RngStream; exposed for tests.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

}  // namespace msssn::sim

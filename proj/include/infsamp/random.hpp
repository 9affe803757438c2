#pragma once

#include <cstdint>
#include <random>

namespace infsamp {

/** A seeded source of random numbers identified by (seed, stream_id).
 *
 * Two streams with the same pair reproduce the same sequence.  Substreams are derived from the
 * identity of the parent, not from its current state, so handing substreams to workers in any
 * order yields the same per-task sequences.
 */
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    RandomStream substream(std::uint64_t id) const;

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Gamma with unit scale.
    double gamma(double shape);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finaliser, used to mix identifiers into stream ids.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t combine_ids(std::uint64_t a, std::uint64_t b);

} // namespace infsamp

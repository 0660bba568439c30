#pragma once
#include <array>
#include <cstdint>

namespace dcu::rng {

// Philox4x32-10 counter-based generator. A draw is a pure function of
// (key, counter), so any path or sample index can be generated in isolation
// and the stream layout never depends on thread scheduling or on how many
// other paths exist.
struct Counter {
    std::uint32_t v[4] = {0, 0, 0, 0};
};

std::array<std::uint32_t, 4> philox4x32(const Counter& ctr, std::uint64_t key);

// Uniform on the open interval (0,1), built from two 32-bit lanes.
double uniform_open(std::uint32_t hi, std::uint32_t lo);

// Inverse standard normal CDF (Wichura's rational approximations),
// relative error below 1e-15 over (0,1). Strictly increasing.
double inverse_normal_cdf(double p);

// Substream view: path `path_id` under `seed`, producing one N(0,1) value per
// draw index. Draw j of path i is philox(counter = (j, path_hi, path_lo, salt),
// key = seed), identical no matter the ensemble size or thread count.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t path_id, std::uint32_t salt = 0)
        : seed_(seed), path_id_(path_id), salt_(salt) {}

    double normal(std::uint64_t draw_index) const;
    double uniform(std::uint64_t draw_index) const; // open (0,1)

  private:
    std::uint64_t seed_;
    std::uint64_t path_id_;
    std::uint32_t salt_;
};

} // namespace dcu::rng

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privade/common/drbg.hpp"
#include "privade/numerics/model.hpp"
#include "privade/protocol/config.hpp"
#include "privade/selection/dataset.hpp"

namespace privade::fixtures {

// Isotropic Gaussian clusters, one per class, centres on a circle of radius 3.
selection::Dataset gaussian_blobs(Drbg& rng, std::size_t n, std::size_t classes, std::size_t dim = 2);

// 8x8 seven-segment style digits with jitter and pixel noise, shape [1,8,8].
selection::Dataset digit_images(Drbg& rng, std::size_t n);

// Uniform [0,1) pixels of the given shape with uniform labels.
selection::Dataset random_images(Drbg& rng, const numerics::Shape& shape, std::size_t n, std::size_t classes);

// Smallest Q16.16 d such that every point lies strictly within d of the
// k-center greedy set on raw features.
numerics::FixedScalar covering_threshold(const std::vector<numerics::FixedTensor>& xs, std::size_t k);

struct Fixture {
  numerics::Model model;
  selection::Dataset data;
  protocol::RunConfig config;
};

// kind: "gaussians", "digits", or an architecture name ("lenet-xs", "lenet5",
// "cnn5", "mlp:i:h:c") paired with random inputs of its input shape. d is set
// to covering_threshold so honest runs are fully covered.
Fixture make_fixture(const std::string& kind, std::size_t n, std::size_t k, std::uint64_t seed);

// <dir>/model.pvdm, <dir>/dataset.pvdd, <dir>/config.json
void save_fixture(const Fixture& f, const std::string& dir);
Fixture load_fixture(const std::string& dir);

}  // namespace privade::fixtures

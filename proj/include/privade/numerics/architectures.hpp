#pragma once

#include <string>
#include <vector>

#include "privade/common/drbg.hpp"
#include "privade/numerics/model.hpp"

namespace privade::numerics {

// Reference architectures with seeded random Q16.16 weights. Conv/linear
// weights and biases are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)];
// batchnorm gets gamma, var in [0.5, 1.5] and beta, mean in [-0.1, 0.1].
// Each model carries its default split (A ends at the first activation).
Model lenet_xs(Drbg& rng);   // input [1,28,28], 3,968 parameters
Model lenet5(Drbg& rng);     // input [1,32,32], 61,706 parameters
Model cnn5(Drbg& rng);       // input [3,32,32], 1,727,588 parameters
Model mlp(Drbg& rng, std::size_t inputs, std::size_t hidden, std::size_t classes);

std::vector<std::string> architecture_names();
// "lenet-xs", "lenet5", "cnn5", or "mlp:<inputs>:<hidden>:<classes>".
Model build_architecture(const std::string& name, Drbg& rng);

// Random parameters for a spec, as described above.
std::vector<FixedTensor> random_params(const LayerSpec& spec, Drbg& rng);

}  // namespace privade::numerics

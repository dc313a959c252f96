#include "privade/scoring/oracle.hpp"

#include "privade/common/errors.hpp"
#include "privade/selection/selection.hpp"

namespace privade::scoring {

OracleResult score_multi_oracle(const numerics::Model& model, const selection::Dataset& data, std::size_t k,
                                const OracleOptions& options) {
  data.validate();
  if (k > data.size()) fail(ErrorCode::KTooLarge, "k exceeds dataset size");
  OracleResult out;
  out.rep = selection::select_representatives(data.xs, k, options.projection_dim, options.projection_seed).indices;
  std::vector<FixedTensor> labels;
  for (std::size_t i : out.rep) {
    out.logits.push_back(model.forward(data.xs[i]));
    labels.push_back(data.ys[i]);
  }
  out.report = score_components(out.logits, labels, data.xs, out.rep, options.scoring);
  out.report.checks.push_back("cleartext");
  return out;
}

}  // namespace privade::scoring

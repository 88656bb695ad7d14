#include "sta/backend.hpp"

#include <algorithm>
#include <numeric>

#include "sta/errors.hpp"

namespace sta {

void DecodingParams::validate() const {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
  if (max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
}

void FineTuneParams::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (warmup_fraction < 0.0 || warmup_fraction >= 1.0) {
    throw ConfigError("warmup_fraction must be in [0, 1)");
  }
}

std::vector<size_t> top_k_top_p_filter(const std::vector<double>& probs,
                                       int top_k, double top_p) {
  if (probs.empty()) return {};
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");

  std::vector<size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return probs[a] > probs[b]; });

  size_t k_cut = std::min<size_t>(static_cast<size_t>(top_k), order.size());

  // Minimal nucleus: smallest prefix whose cumulative mass reaches top_p.
  size_t p_cut = order.size();
  double cum = 0.0;
  for (size_t i = 0; i < order.size(); ++i) {
    cum += probs[order[i]];
    if (cum >= top_p - 1e-12) {
      p_cut = i + 1;
      break;
    }
  }
  size_t cut = std::max<size_t>(1, std::min(k_cut, p_cut));
  order.resize(cut);
  return order;
}

}  // namespace sta

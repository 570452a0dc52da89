#include "seqgap/registry.hpp"

#include <algorithm>

#include "seqgap/errors.hpp"
#include "seqgap/posterior.hpp"

namespace seqgap {

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"zero",    "gaussian-linear",  "l1min",
                                              "greedy",  "adaptive-ksparse", "bayes-mode",
                                              "identity", "marginal-mode"};
  return names;
}

bool is_registered(std::string_view name) {
  const auto& names = algorithm_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

InfoMode algorithm_mode(const std::string& name) {
  if (!is_registered(name)) throw ConfigError("unknown algorithm '" + name + "'");
  return name == "adaptive-ksparse" ? InfoMode::adaptive : InfoMode::nonadaptive;
}

bool needs_subset(const std::string& name) { return name == "bayes-mode"; }

AlgorithmFactory algorithm_factory(const std::string& name, const AlgorithmContext& ctx) {
  auto sketch = [&](LinearDecoder d) -> AlgorithmFactory {
    if (!ctx.measurement && ctx.rows == 0) throw ConfigError(name + " needs a row count");
    const std::size_t rows = ctx.measurement ? ctx.measurement->rows() : ctx.rows;
    return [d, rows, m = ctx.measurement, s = ctx.greedy_sparsity] {
      return std::make_unique<SketchDecoder>(d, rows, m, s);
    };
  };
  auto need_instance = [&] {
    if (!ctx.spec || !ctx.measurement)
      throw ConfigError(name + " needs a hard instance and a fixed measurement matrix");
  };
  if (name == "zero") return [] { return std::make_unique<ZeroAlgorithm>(InfoMode::nonadaptive); };
  if (name == "gaussian-linear") return sketch(LinearDecoder::gaussian_linear);
  if (name == "l1min") return sketch(LinearDecoder::l1min);
  if (name == "greedy") return sketch(LinearDecoder::greedy);
  if (name == "adaptive-ksparse")
    return [cfg = ctx.recovery] { return std::make_unique<AdaptiveKSparse>(cfg); };
  if (name == "bayes-mode") {
    need_instance();
    return bayes_mode_decoder(*ctx.spec, *ctx.measurement);
  }
  if (name == "identity") return [] { return std::make_unique<CoordinateReadout>(); };
  if (name == "marginal-mode") {
    need_instance();
    return [s = ctx.spec, m = ctx.measurement] { return std::make_unique<MarginalModeDecoder>(s, m); };
  }
  throw ConfigError("unknown algorithm '" + name + "'");
}

}  // namespace seqgap

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "seqgap/hard_instance.hpp"
#include "seqgap/linalg.hpp"
#include "seqgap/recovery.hpp"

namespace seqgap {

// What a named algorithm may need at construction time.
struct AlgorithmContext {
  // Rows of the non-adaptive sketches.
  std::size_t rows = 0;
  // Fixed measurement matrix for the non-adaptive decoders; null draws a
  // fresh Gaussian matrix on every run. bayes-mode and marginal-mode need it.
  std::shared_ptr<const DenseMatrix> measurement;
  // Hard instance for bayes-mode and marginal-mode.
  std::shared_ptr<const HardInstanceSpec> spec;
  RecoveryConfig recovery;
  std::size_t greedy_sparsity = 0;
};

// Names accepted by the CLI, in registration order.
const std::vector<std::string>& algorithm_names();
bool is_registered(std::string_view name);
// Throws ConfigError for an unknown name or a missing context field.
AlgorithmFactory algorithm_factory(const std::string& name, const AlgorithmContext& context);
InfoMode algorithm_mode(const std::string& name);
// True when the algorithm reads the disturbance support J as side information.
bool needs_subset(const std::string& name);

}  // namespace seqgap

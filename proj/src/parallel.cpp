#include "seqgap/parallel.hpp"

namespace seqgap {

unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace seqgap

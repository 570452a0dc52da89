#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seqgap/linalg.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

// A linear functional on R^dim, stored densely or by its nonzero entries.
class LinearFunctional {
 public:
  LinearFunctional() = default;
  explicit LinearFunctional(DenseVector weights);
  static LinearFunctional coordinate(std::size_t dim, std::size_t j);
  // Entries must have distinct indices < dim.
  static LinearFunctional sparse(std::size_t dim, std::vector<std::size_t> indices,
                                 std::vector<double> values);

  std::size_t dim() const { return dim_; }
  bool is_sparse() const { return sparse_; }
  // <L, x> accumulated in storage order.
  double apply(const DenseVector& x) const;
  DenseVector to_dense() const;
  const std::vector<std::size_t>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }
  const DenseVector& dense_weights() const { return dense_; }

 private:
  std::size_t dim_ = 0;
  bool sparse_ = false;
  DenseVector dense_;
  std::vector<std::size_t> indices_;
  std::vector<double> values_;
};

enum class InfoMode { adaptive, nonadaptive };

struct LedgerEntry {
  LinearFunctional functional;
  std::optional<double> value;  // empty until revealed (nonadaptive mode)
};

// Budgeted access to a hidden vector through linear functionals.
// Adaptive sessions answer query() immediately. Nonadaptive sessions accept
// register_functional() calls, then a single reveal() returns all values;
// any other order is a ProtocolViolation.
class InformationSession {
 public:
  InformationSession(DenseVector hidden_x, std::size_t budget, InfoMode mode);

  double query(const LinearFunctional& l);
  double query(const DenseVector& l) { return query(LinearFunctional(l)); }
  void register_functional(LinearFunctional l);
  std::vector<double> reveal();

  std::size_t dim() const { return x_.size(); }
  std::size_t budget() const { return budget_; }
  std::size_t used() const { return ledger_.size(); }
  std::size_t remaining() const { return budget_ - ledger_.size(); }
  InfoMode mode() const { return mode_; }
  bool revealed() const { return revealed_; }
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }

 private:
  void check_functional(const LinearFunctional& l) const;

  DenseVector x_;
  std::size_t budget_;
  InfoMode mode_;
  bool revealed_ = false;
  std::vector<LedgerEntry> ledger_;
};

InformationSession open_session(DenseVector x, std::size_t budget, InfoMode mode);

// Extra information an experiment may hand to an algorithm besides the
// functional values (e.g. the disturbance support in the hard instance).
struct SideInfo {
  std::optional<std::vector<std::size_t>> subset;
};

struct ProblemInfo {
  std::size_t dim = 0;
  std::size_t budget = 0;
  InfoMode mode = InfoMode::adaptive;
  SideInfo side;
};

namespace action {
struct Query {
  LinearFunctional functional;
};
struct Register {
  std::vector<LinearFunctional> functionals;
};
struct Reveal {};
struct Finish {
  DenseVector output;
};
}  // namespace action

using Action = std::variant<action::Query, action::Register, action::Reveal, action::Finish>;

// Plug-in point for reconstruction algorithms. An instance is single-use
// state for one run: begin() is called once, then next_action() until it
// returns Finish. All randomness must come from the stream passed in.
class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string name() const = 0;
  virtual InfoMode mode() const = 0;
  virtual void begin(const ProblemInfo& info, RngStream& rng);
  virtual Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) = 0;

 protected:
  ProblemInfo info_;
};

// Algorithms written as straight-line code receive the session itself; it
// still enforces the budget and the mode, and x stays hidden behind query().
class DirectAlgorithm : public Algorithm {
 public:
  virtual DenseVector run(InformationSession& session, RngStream& rng) = 0;
  Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) override;
};

struct RunResult {
  DenseVector output;
  std::size_t measurements_used = 0;
  std::vector<LedgerEntry> ledger;
};

// Executes `alg` against a fresh session on x. Throws ProtocolViolation if
// the algorithm's mode differs from `mode`.
RunResult run_algorithm(Algorithm& alg, const DenseVector& x, std::size_t budget, InfoMode mode,
                        RngStream& rng, const SideInfo& side = {});

// Output 0 without measuring anything.
class ZeroAlgorithm final : public Algorithm {
 public:
  explicit ZeroAlgorithm(InfoMode mode = InfoMode::nonadaptive) : mode_(mode) {}
  std::string name() const override { return "zero"; }
  InfoMode mode() const override { return mode_; }
  Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) override;

 private:
  InfoMode mode_;
};

// Reads every coordinate with e_j; needs budget >= dim.
class CoordinateReadout final : public Algorithm {
 public:
  std::string name() const override { return "identity"; }
  InfoMode mode() const override { return InfoMode::nonadaptive; }
  Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) override;
};

}  // namespace seqgap

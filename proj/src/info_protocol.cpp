#include "seqgap/info_protocol.hpp"

#include <algorithm>
#include <cmath>

#include "seqgap/errors.hpp"
#include "seqgap/simd.hpp"

namespace seqgap {

LinearFunctional::LinearFunctional(DenseVector weights)
    : dim_(weights.size()), sparse_(false), dense_(std::move(weights)) {}

LinearFunctional LinearFunctional::coordinate(std::size_t dim, std::size_t j) {
  return sparse(dim, {j}, {1.0});
}

LinearFunctional LinearFunctional::sparse(std::size_t dim, std::vector<std::size_t> indices,
                                          std::vector<double> values) {
  if (indices.size() != values.size())
    throw DimensionMismatch("sparse functional index/value counts differ");
  for (std::size_t idx : indices)
    if (idx >= dim) throw DimensionMismatch("sparse functional index out of range");
  for (double v : values)
    if (!std::isfinite(v)) throw NonFiniteValue("sparse functional entry");
  LinearFunctional l;
  l.dim_ = dim;
  l.sparse_ = true;
  l.indices_ = std::move(indices);
  l.values_ = std::move(values);
  return l;
}

double LinearFunctional::apply(const DenseVector& x) const {
  if (x.size() != dim_) throw DimensionMismatch("functional dimension != input dimension");
  if (!sparse_) return simd::dot(dense_, x);
  double acc = 0.0;
  for (std::size_t k = 0; k < indices_.size(); ++k) acc += values_[k] * x[indices_[k]];
  return acc;
}

DenseVector LinearFunctional::to_dense() const {
  if (!sparse_) return dense_;
  DenseVector d(dim_);
  for (std::size_t k = 0; k < indices_.size(); ++k) d[indices_[k]] += values_[k];
  return d;
}

InformationSession::InformationSession(DenseVector hidden_x, std::size_t budget, InfoMode mode)
    : x_(std::move(hidden_x)), budget_(budget), mode_(mode) {}

InformationSession open_session(DenseVector x, std::size_t budget, InfoMode mode) {
  return InformationSession(std::move(x), budget, mode);
}

void InformationSession::check_functional(const LinearFunctional& l) const {
  if (l.dim() != x_.size())
    throw DimensionMismatch("functional has dimension " + std::to_string(l.dim()) +
                            ", input has " + std::to_string(x_.size()));
  if (ledger_.size() >= budget_)
    throw BudgetExceeded("budget of " + std::to_string(budget_) + " functionals used up");
}

double InformationSession::query(const LinearFunctional& l) {
  if (mode_ != InfoMode::adaptive)
    throw ProtocolViolation("query() on a nonadaptive session; register and reveal instead");
  check_functional(l);
  const double value = l.apply(x_);
  ledger_.push_back({l, value});
  return value;
}

void InformationSession::register_functional(LinearFunctional l) {
  if (mode_ != InfoMode::nonadaptive)
    throw ProtocolViolation("register_functional() on an adaptive session");
  if (revealed_) throw ProtocolViolation("functional registered after values were revealed");
  check_functional(l);
  ledger_.push_back({std::move(l), std::nullopt});
}

std::vector<double> InformationSession::reveal() {
  if (mode_ != InfoMode::nonadaptive) throw ProtocolViolation("reveal() on an adaptive session");
  if (revealed_) throw ProtocolViolation("values already revealed");
  revealed_ = true;
  std::vector<double> values;
  values.reserve(ledger_.size());
  for (auto& entry : ledger_) {
    entry.value = entry.functional.apply(x_);
    values.push_back(*entry.value);
  }
  return values;
}

void Algorithm::begin(const ProblemInfo& info, RngStream&) { info_ = info; }

RunResult run_algorithm(Algorithm& alg, const DenseVector& x, std::size_t budget, InfoMode mode,
                        RngStream& rng, const SideInfo& side) {
  if (alg.mode() != mode)
    throw ProtocolViolation("algorithm '" + alg.name() + "' does not support the requested mode");
  InformationSession session(x, budget, mode);
  alg.begin(ProblemInfo{x.size(), budget, mode, side}, rng);
  if (auto* direct = dynamic_cast<DirectAlgorithm*>(&alg)) {
    DenseVector out = direct->run(session, rng);
    if (out.size() != x.size()) throw DimensionMismatch("algorithm output has wrong dimension");
    return {std::move(out), session.used(), session.ledger()};
  }
  // Every non-finishing action either consumes budget or is a one-shot reveal.
  const std::size_t max_steps = 2 * budget + 8;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    Action a = alg.next_action(session.ledger(), rng);
    if (auto* q = std::get_if<action::Query>(&a)) {
      session.query(q->functional);
    } else if (auto* r = std::get_if<action::Register>(&a)) {
      if (r->functionals.empty()) throw ProtocolViolation("empty registration batch");
      for (auto& l : r->functionals) session.register_functional(std::move(l));
    } else if (std::holds_alternative<action::Reveal>(a)) {
      session.reveal();
    } else {
      auto& out = std::get<action::Finish>(a).output;
      if (out.size() != x.size()) throw DimensionMismatch("algorithm output has wrong dimension");
      return {std::move(out), session.used(), session.ledger()};
    }
  }
  throw ProtocolViolation("algorithm '" + alg.name() + "' did not finish");
}

Action DirectAlgorithm::next_action(const std::vector<LedgerEntry>&, RngStream&) {
  throw ProtocolViolation("direct algorithms are driven through run()");
}

Action ZeroAlgorithm::next_action(const std::vector<LedgerEntry>&, RngStream&) {
  return action::Finish{DenseVector(info_.dim)};
}

Action CoordinateReadout::next_action(const std::vector<LedgerEntry>& history, RngStream&) {
  if (history.empty()) {
    if (info_.budget < info_.dim) throw BudgetExceeded("coordinate readout needs budget >= dim");
    action::Register reg;
    for (std::size_t j = 0; j < info_.dim; ++j)
      reg.functionals.push_back(LinearFunctional::coordinate(info_.dim, j));
    return reg;
  }
  if (!history.front().value) return action::Reveal{};
  DenseVector out(info_.dim);
  for (std::size_t j = 0; j < info_.dim; ++j) out[j] = *history[j].value;
  return action::Finish{out};
}

}  // namespace seqgap

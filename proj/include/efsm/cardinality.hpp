#pragma once

/*!
  \file cardinality.hpp
  \brief Totalizer: unary counting circuit over literals
*/

#include <efsm/sat.hpp>

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace efsm
{

/*! \brief Sorted unary sum of a set of literals

  `output(i)` (1-based) is true iff at least i inputs are true. Outputs
  are exact in both directions, so in any model they spell the popcount.
  With a cap c < #inputs only outputs 1..c are built and output(c) means
  "at least c".
*/
class totalizer
{
public:
  totalizer( sat::solver& solver, std::vector<sat::lit> inputs,
             std::size_t cap = std::numeric_limits<std::size_t>::max() );

  std::size_t num_inputs() const { return num_inputs_; }
  std::size_t num_outputs() const { return outputs_.size(); }
  sat::lit output( std::size_t i ) const { return outputs_.at( i - 1 ); }
  std::span<sat::lit const> outputs() const { return outputs_; }

  /*! \brief Literal meaning "sum <= n"; none if the bound is vacuous */
  std::optional<sat::lit> at_most( std::size_t n ) const;

  /*! \brief Permanently asserts sum <= n (no-op when vacuous) */
  void bound( std::size_t n );

private:
  std::vector<sat::lit> build( std::span<sat::lit const> inputs );

  sat::solver& solver_;
  std::size_t num_inputs_;
  std::size_t cap_;
  std::vector<sat::lit> outputs_;
};

} // namespace efsm

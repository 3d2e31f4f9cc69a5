#pragma once

/*!
  \file ltl.hpp
  \brief LTL formulas over controller steps

  Atoms are evaluated on a step: the input action just received and the
  output action it produced.

  Syntax, loosest binding first:
    f -> g          (right associative)
    f | g, f || g
    f & g, f && g
    f U g, f R g    (right associative)
    !f ~f X f F f G f
  Atoms: in=E, in!=E, out=E, out=. (empty event), out!=E, input/output
  variable names, x<i>, z<i> (1-based), true, false.
*/

#include <efsm/automaton.hpp>

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace efsm::ltl
{

class syntax_error : public std::runtime_error
{
public:
  syntax_error( std::string const& what, std::size_t position )
      : std::runtime_error( what + " at position " + std::to_string( position ) ), position_( position )
  {
  }
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

struct atom
{
  enum class kind
  {
    in_event,
    out_event,
    in_var,
    out_var
  };
  kind type = kind::in_event;
  int index = 0; // event id (epsilon allowed for out_event) or 0-based variable

  auto operator<=>( atom const& ) const = default;
};

/*! \brief What atoms are evaluated on */
using step = scenario_element;

bool holds( atom const& a, step const& s );

enum class op
{
  top,
  bottom,
  prop,
  negation,
  conjunction,
  disjunction,
  implication,
  next,
  until,
  release,
  globally,
  finally
};

struct formula;
using formula_ptr = std::shared_ptr<formula const>;

struct formula
{
  op type = op::top;
  atom a;            // prop only
  formula_ptr lhs;   // unary operand, or left of binary
  formula_ptr rhs;

  static formula_ptr make( op type, formula_ptr lhs = nullptr, formula_ptr rhs = nullptr );
  static formula_ptr make_atom( atom a );
};

bool operator==( formula const& x, formula const& y );

formula_ptr parse( std::string_view text, alphabet const& alpha );

/*! \brief Fully parenthesized text that parses back to an equal formula */
std::string to_string( formula const& f, alphabet const& alpha );

/*! \brief Negation pushed to atoms; only top, bottom, prop, negated prop,
           conjunction, disjunction, next, until and release remain */
formula_ptr nnf( formula_ptr const& f );

bool is_propositional( formula const& f );

/*! \brief Truth of a propositional formula on one step */
bool holds( formula const& f, step const& s );

std::size_t depth( formula const& f );

/*! \brief Direct semantics on the infinite word
           trace[0..n-1] (trace[cycle_begin..n-1])^omega */
bool holds_on_lasso( formula const& f, std::vector<step> const& trace, std::size_t cycle_begin );

} // namespace efsm::ltl

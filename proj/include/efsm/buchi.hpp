#pragma once

/*!
  \file buchi.hpp
  \brief Büchi automata for LTL formulas (tableau construction followed by
         counter degeneralization)

  Labels sit on states: entering state s reads a step that must satisfy
  every literal of s. State 0 is the initial pseudo-state; it has no label
  and no incoming transitions.
*/

#include <efsm/ltl.hpp>

#include <vector>

namespace efsm::ltl
{

struct buchi
{
  struct state
  {
    std::vector<atom> positive;
    std::vector<atom> negative;
    bool accepting = false;
    std::vector<std::size_t> successors;
  };

  std::vector<state> states;

  bool label_holds( std::size_t s, step const& letter ) const;

  /*! \brief Membership of trace[0..n-1] (trace[cycle_begin..n-1])^omega */
  bool accepts_lasso( std::vector<step> const& trace, std::size_t cycle_begin ) const;
};

/*! \brief Automaton accepting exactly the words satisfying `f` */
buchi to_buchi( formula_ptr const& f );

} // namespace efsm::ltl

#pragma once

/*!
  \file verifier.hpp
  \brief Explicit-state LTL checking of a controller in closed loop with a
         plant model
*/

#include <efsm/automaton.hpp>
#include <efsm/buchi.hpp>
#include <efsm/ltl.hpp>
#include <efsm/scenario_tree.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace efsm
{

class state_space_exceeded : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class plant_deadlock : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Plant response: given the last controller output, move to `to`
           and emit `emit` as the next input action */
struct plant_rule
{
  std::size_t from = 0;
  std::optional<event_id> on_event; // none matches any event; epsilon matches "no event"
  std::string on_output;            // '0' '1' '-' per output variable; empty matches any
  std::size_t to = 0;
  input_action emit;

  bool matches( std::size_t state, output_action const& last ) const;
};

/*! \brief Nondeterministic environment of the controller */
class plant_model
{
public:
  /*! \brief Single state emitting every (event, input) combination */
  static plant_model free( alphabet const& a );

  plant_model( alphabet const& a, std::size_t num_states, std::size_t initial, std::vector<plant_rule> rules );

  std::size_t num_states() const { return num_states_; }
  std::size_t initial() const { return initial_; }
  std::vector<plant_rule> const& rules() const { return rules_; }
  bool is_free() const { return free_; }

  /*! \brief True if some rule looks at output events (so the closed loop
             must remember the last one) */
  bool observes_events() const { return observes_events_; }

  /*! \brief Throws plant_deadlock if no rule applies */
  std::vector<std::pair<std::size_t, input_action>> responses( std::size_t state, output_action const& last ) const;

private:
  plant_model() = default;

  std::size_t num_states_ = 1;
  std::size_t initial_ = 0;
  std::vector<plant_rule> rules_;
  bool free_ = false;
  bool observes_events_ = false;
};

struct counterexample
{
  std::vector<scenario_element> trace;
  std::optional<std::size_t> loop_start; // 1-based; config after this element recurs at the end
  std::string formula;

  negative_scenario to_negative() const { return { trace, loop_start }; }
};

struct verify_options
{
  std::size_t state_cap = 1'000'000;
  bool safety_fast_path = true; // plain reachability for G(propositional)
};

/*! \brief Counterexample for `f`, or none if every closed-loop run satisfies it */
std::optional<counterexample> check( automaton const& m, plant_model const& plant, ltl::formula_ptr const& f,
                                     verify_options const& opts = {} );

/*! \brief One counterexample per violated formula */
std::vector<counterexample> verify( automaton const& m, plant_model const& plant,
                                    std::vector<ltl::formula_ptr> const& formulas, verify_options const& opts = {} );

/*! \brief The full reachable product of closed loop and Büchi automaton,
           for independent emptiness checks */
struct product_graph
{
  std::vector<std::vector<std::size_t>> successors; // state 0 is initial
  std::vector<bool> accepting;
};

product_graph explore_product( automaton const& m, plant_model const& plant, ltl::buchi const& b,
                               std::size_t state_cap = 1'000'000 );

/*! \brief Trace of the closed loop driven by recorded inputs; the
           plant's choices are implied by the inputs */
std::vector<ltl::step> replay( automaton const& m, std::vector<input_action> const& inputs );

} // namespace efsm

#pragma once

/*!
  \file automaton.hpp
  \brief Executable semantics of Moore machines with prioritized, guarded
         transitions over Boolean input and output variables
*/

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace efsm
{

/*! \brief Fixed-length Boolean vector (input values, output values) */
using bits = std::vector<bool>;

std::string to_string( bits const& b );
bits bits_from_string( std::string_view s );
bits zero_bits( std::size_t n );

/*! \brief Index into an event set; the empty event is `epsilon` */
using event_id = int;
inline constexpr event_id epsilon = -1;

class structural_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Interface of a function block: input/output events and variables

  Names are unique within each collection. The empty event is never a
  member of either event set.
*/
struct alphabet
{
  std::vector<std::string> input_events;
  std::vector<std::string> output_events;
  std::vector<std::string> input_vars;
  std::vector<std::string> output_vars;

  std::size_t num_input_vars() const { return input_vars.size(); }
  std::size_t num_output_vars() const { return output_vars.size(); }

  std::optional<event_id> find_input_event( std::string_view name ) const;
  std::optional<event_id> find_output_event( std::string_view name ) const;

  /*! \brief Name of an output event, "." for epsilon */
  std::string output_event_name( event_id e ) const;

  /*! \brief Throws structural_error on duplicate or reserved names */
  void validate() const;

  bool operator==( alphabet const& ) const = default;

  /*! \brief Alphabet with default names x1.., z1.. */
  static alphabet make( std::vector<std::string> input_events, std::vector<std::string> output_events,
                        std::size_t num_input_vars, std::size_t num_output_vars );
};

struct input_action
{
  event_id event = 0;
  bits input;

  bool operator==( input_action const& ) const = default;
  auto operator<=>( input_action const& ) const = default;
};

struct output_action
{
  event_id event = epsilon;
  bits output;

  bool operator==( output_action const& ) const = default;
};

struct scenario_element
{
  input_action in;
  output_action out;

  bool operator==( scenario_element const& ) const = default;
};

using scenario = std::vector<scenario_element>;

/*! \brief Boolean formula over input variables, stored as a flat parse tree

  Node 0 is the root. Binary operators are strictly binary; n-ary chains
  are right-nested.
*/
class guard_expr
{
public:
  enum class kind : std::uint8_t
  {
    terminal,
    negation,
    conjunction,
    disjunction
  };

  struct node
  {
    kind type;
    std::uint32_t var = 0;   // terminals only, 0-based into input_vars
    std::uint32_t left = 0;  // child index (negation uses left only)
    std::uint32_t right = 0;
  };

  static guard_expr terminal( std::uint32_t var );
  static guard_expr negate( guard_expr const& operand );
  static guard_expr conjoin( guard_expr const& lhs, guard_expr const& rhs );
  static guard_expr disjoin( guard_expr const& lhs, guard_expr const& rhs );

  /*! \brief Evaluates on an input vector; throws structural_error if a
             terminal refers past the end of `input` */
  bool eval( bits const& input ) const;

  /*! \brief Number of parse-tree nodes (>= 1) */
  std::size_t size() const { return nodes_.size(); }

  node const& root() const { return nodes_.front(); }
  node const& at( std::uint32_t i ) const { return nodes_.at( i ); }
  std::vector<node> const& nodes() const { return nodes_; }

  /*! \brief Largest referenced variable index + 1 */
  std::size_t arity() const;

  bool operator==( guard_expr const& other ) const;

private:
  explicit guard_expr( std::vector<node> nodes ) : nodes_( std::move( nodes ) ) {}
  static guard_expr combine( kind k, guard_expr const& lhs, guard_expr const* rhs );
  bool eval_at( std::uint32_t i, bits const& input ) const;
  bool equal_at( std::uint32_t i, guard_expr const& other, std::uint32_t j ) const;

  std::vector<node> nodes_;
};

/*! \brief Per output variable: new value when the old value is false / true */
struct var_update
{
  bool when_false = false;
  bool when_true = true;

  bool apply( bool old ) const { return old ? when_true : when_false; }
  bool is_keep() const { return !when_false && when_true; }

  bool operator==( var_update const& ) const = default;
};

using state_algorithm = std::vector<var_update>;

struct transition
{
  std::size_t dest = 0;
  event_id input_event = 0;
  guard_expr guard = guard_expr::terminal( 0 );

  bool operator==( transition const& ) const = default;
};

struct state
{
  event_id output_event = epsilon;
  state_algorithm algorithm;
  std::vector<transition> transitions; // priority order

  bool operator==( state const& ) const = default;
};

struct step_result
{
  std::size_t state;
  output_action out;
};

/*! \brief Execution control chart: state 0 is initial */
class automaton
{
public:
  automaton() = default;
  automaton( efsm::alphabet alpha, std::vector<state> states );

  efsm::alphabet const& alphabet() const { return alphabet_; }
  std::vector<state> const& states() const { return states_; }
  std::size_t num_states() const { return states_.size(); }

  /*! \brief Takes the first transition (by priority) whose event matches
             and whose guard holds; otherwise ignores the action */
  step_result step( std::size_t current, bits const& outputs, input_action const& action ) const;

  /*! \brief Replays from the initial state with all-false outputs */
  bool satisfies( scenario const& s ) const;

  /*! \brief Number of elements replayed before the first mismatch
             (equals `s.size()` when satisfied) */
  std::size_t matching_prefix( scenario const& s ) const;

  std::size_t transition_count() const;
  std::size_t guard_complexity() const;

  /*! \brief Throws structural_error if indices or vector sizes are out of range */
  void validate() const;

  bool operator==( automaton const& ) const = default;

private:
  efsm::alphabet alphabet_;
  std::vector<state> states_;
};

inline std::size_t transition_count( automaton const& a ) { return a.transition_count(); }
inline std::size_t guard_complexity( automaton const& a ) { return a.guard_complexity(); }

} // namespace efsm

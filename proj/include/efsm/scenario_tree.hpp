#pragma once

/*!
  \file scenario_tree.hpp
  \brief Prefix trees over execution scenarios

  Every scenario is prepended with an auxiliary element carrying the
  output action <epsilon, 0...0>; that element is the root. A node stands
  for a scenario element: its incoming edge carries the input action and
  the node carries the output action.
*/

#include <efsm/automaton.hpp>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace efsm
{

class scenario_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Two scenarios share an input prefix but disagree on an output */
class output_conflict : public scenario_error
{
public:
  using scenario_error::scenario_error;
};

struct tree_node
{
  std::size_t id = 0;
  std::optional<std::size_t> parent; // none at root
  input_action in;                   // meaningless at root
  output_action out;

  bool is_root() const { return !parent.has_value(); }
  bool is_active() const { return !is_root() && out.event != epsilon; }
  bool is_passive() const { return !is_root() && out.event == epsilon; }
};

class scenario_tree
{
public:
  explicit scenario_tree( efsm::alphabet alpha );

  efsm::alphabet const& alphabet() const { return alphabet_; }
  std::vector<tree_node> const& nodes() const { return nodes_; }
  tree_node const& node( std::size_t id ) const { return nodes_.at( id ); }
  std::size_t size() const { return nodes_.size(); }
  static constexpr std::size_t root = 0;

  /*! \brief Distinct inputs on edges, sorted */
  std::set<bits> const& inputs() const { return inputs_; }

  std::size_t count_active() const;
  std::size_t count_passive() const;

  /*! \brief True iff every scenario is a root-to-node path of this tree */
  bool replay_check( std::vector<scenario> const& scenarios ) const;

protected:
  void check_element( scenario_element const& e ) const;
  std::size_t add_node( std::size_t parent, scenario_element const& e );
  std::optional<std::size_t> find_child( std::size_t parent, scenario_element const& e ) const;

  /* negative trees branch on whole elements, positive trees on input actions */
  bool key_includes_output_ = false;

private:
  struct child_key
  {
    input_action in;
    std::optional<output_action> out;

    bool operator<( child_key const& other ) const;
  };

  child_key key_of( scenario_element const& e ) const;

  efsm::alphabet alphabet_;
  std::vector<tree_node> nodes_;
  std::vector<std::map<child_key, std::size_t>> children_;
  std::set<bits> inputs_;
};

/*! \brief Scenario tree of positive scenarios; immutable after build */
class positive_tree : public scenario_tree
{
public:
  /*! \brief Throws output_conflict if scenarios are not realizable by any
             deterministic machine, scenario_error on malformed elements */
  static positive_tree build( efsm::alphabet alpha, std::vector<scenario> const& scenarios );

private:
  using scenario_tree::scenario_tree;
};

struct negative_scenario
{
  scenario elements;
  std::optional<std::size_t> loop_start; // 1-based element index

  bool operator==( negative_scenario const& ) const = default;
};

/*! \brief Scenario tree of negative scenarios with loop back-edges

  Grows monotonically: node ids, back edges and loopless ends are never
  removed or renumbered.
*/
class negative_tree : public scenario_tree
{
public:
  explicit negative_tree( efsm::alphabet alpha );

  struct delta
  {
    std::vector<std::size_t> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> back_edges; // (loop end, loop start)
    std::vector<std::size_t> loopless_ends;

    bool empty() const { return nodes.empty() && back_edges.empty() && loopless_ends.empty(); }
  };

  /*! \brief Merges a scenario; reports only what was not present before */
  delta add( negative_scenario const& s );

  std::set<std::size_t> const& loop_backs( std::size_t id ) const { return loop_backs_.at( id ); }
  std::set<std::size_t> const& loopless_ends() const { return loopless_ends_; }

  /*! \brief Everything currently in the tree, as if added from scratch */
  delta everything() const;

private:
  std::vector<std::set<std::size_t>> loop_backs_;
  std::set<std::size_t> loopless_ends_;
};

/*! \brief True iff the machine can execute the negative scenario: all
           outputs match and, for a looping scenario, the state at the loop
           end equals the state at the loop start */
bool exhibits( automaton const& a, negative_scenario const& s );

} // namespace efsm

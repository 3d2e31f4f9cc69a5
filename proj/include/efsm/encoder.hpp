#pragma once

/*!
  \file encoder.hpp
  \brief CNF reduction of minimal-machine inference

  The reduction has four parts, emitted into one solver:
   - automaton structure: state output events and algorithms, K
     prioritized transition slots per state, guard truth tables over the
     observed inputs and the reaction function they induce;
   - positive scenario tree mapping;
   - guard parse trees of P nodes per transition plus a totalizer over
     typed nodes bounding total guard size N;
   - negative scenario tree mapping with loop back-edges.

  Bounded domains are one-hot ("direct") encoded. Everything that depends
  on a concrete input vector is created on first use, so inputs that show
  up in later negative scenarios extend the encoding incrementally.

  Destination domains use index 0 for the auxiliary null state; real
  states are 1..C, and automaton state q-1 corresponds to index q.
*/

#include <efsm/automaton.hpp>
#include <efsm/cardinality.hpp>
#include <efsm/sat.hpp>
#include <efsm/scenario_tree.hpp>

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace efsm
{

enum class amo_encoding
{
  pairwise,
  binary
};

struct encoding_params
{
  std::size_t num_states = 1;        // C
  std::size_t max_transitions = 0;   // K; 0 selects C * |input events|
  std::size_t max_guard_size = 1;    // P
  bool encode_guards = true;         // false: truth-table guards only
  bool state_bfs = true;
  bool tree_bfs = true;
  amo_encoding amo = amo_encoding::pairwise;
  bool forbid_loopless_ends = true;  // loopless negative scenarios must not be executable
  bool debug_names = false;          // keep family names for DIMACS dumps

  std::size_t transitions_for( alphabet const& a ) const;
};

class decode_mismatch : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/*! \brief One-hot encoded variable; impossible values map to constant false */
class domain_var
{
public:
  domain_var() = default;
  explicit domain_var( std::vector<sat::lit> lits ) : lits_( std::move( lits ) ) {}

  sat::lit eq( std::size_t value ) const { return lits_.at( value ); }
  std::size_t size() const { return lits_.size(); }
  std::size_t decode( sat::solve_outcome const& model ) const;

private:
  std::vector<sat::lit> lits_;
};

class encoder
{
public:
  enum node_type : std::size_t
  {
    terminal = 0,
    op_and,
    op_or,
    op_not,
    none,
    num_node_types
  };

  /*! \brief Declares structure, guard trees and BFS constraints */
  encoder( sat::solver& solver, efsm::alphabet alpha, encoding_params params );

  encoding_params const& params() const { return params_; }
  efsm::alphabet const& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return C_; }
  std::size_t max_transitions() const { return K_; }
  sat::solver& solver() { return solver_; }

  void encode_positive( positive_tree const& tree );

  /*! \brief Emits constraints for what `d` adds; call once per delta */
  void encode_negative( negative_tree const& tree, negative_tree::delta const& d );

  /*! \brief Totalizer over typed parse-tree nodes; built on first call */
  totalizer& guard_size_counter( std::size_t cap );
  void bound_guard_size( std::size_t n );

  /*! \brief Totalizer over non-null transitions; built on first call */
  totalizer& transition_counter( std::size_t cap );
  void bound_transitions( std::size_t n );

  /*! \brief Reads the machine out of a model and cross-checks every guard
             against the truth-table variables (throws decode_mismatch) */
  automaton decode( sat::solve_outcome const& model ) const;

  /*! \brief Number of typed parse-tree nodes in the model */
  std::size_t typed_nodes( sat::solve_outcome const& model ) const;

  /*! \brief Observed inputs in order of first use */
  std::vector<bits> const& inputs() const { return inputs_; }

  /*! \brief DIMACS dump; requires solver().keep_clause_log(true) before construction */
  void write_dimacs( std::ostream& os ) const;

  /* variable families, exposed for tests */
  domain_var const& output_event( std::size_t q ) const { return ose_.at( q ); }
  sat::lit algorithm( std::size_t q, std::size_t z, bool old ) const { return alg_.at( q ).at( z )[old]; }
  domain_var const& destination( std::size_t q, std::size_t k ) const { return dest_.at( q ).at( k ); }
  domain_var const& input_event( std::size_t q, std::size_t k ) const { return tie_.at( q ).at( k ); }
  domain_var const& node_kind( std::size_t q, std::size_t k, std::size_t p ) const { return type_.at( q ).at( k ).at( p ); }
  domain_var const& node_var( std::size_t q, std::size_t k, std::size_t p ) const { return term_.at( q ).at( k ).at( p ); }
  domain_var const& node_parent( std::size_t q, std::size_t k, std::size_t p ) const { return parent_.at( q ).at( k ).at( p ); }
  domain_var const& node_child( std::size_t q, std::size_t k, std::size_t p ) const { return child_.at( q ).at( k ).at( p ); }
  sat::lit firing( std::size_t q, std::size_t k, bits const& u );
  sat::lit node_value( std::size_t q, std::size_t k, std::size_t p, bits const& u );
  domain_var const& first_fired( std::size_t q, event_id e, bits const& u );
  domain_var const& reaction( std::size_t q, event_id e, bits const& u );
  domain_var const& positive_mapping( std::size_t v ) const { return pos_map_.at( v ); }
  domain_var const& negative_mapping( std::size_t v ) const { return neg_map_.at( v ); }

  sat::lit constant_false() const { return false_; }
  sat::lit constant_true() const { return ~false_; }

private:
  struct input_block
  {
    std::vector<std::vector<sat::lit>> theta;                    // [q][k]
    std::vector<std::vector<std::vector<sat::lit>>> value;       // [q][k][p]
  };

  struct reaction_block
  {
    std::vector<domain_var> first_fired; // [q], domain 0..K
    std::vector<domain_var> reaction;    // [q], domain 0..C
  };

  sat::lit fresh( std::string const& name );
  domain_var one_hot( std::string const& name, std::size_t size, std::vector<bool> const& allowed = {} );
  void exactly_one( std::vector<sat::lit> const& lits );
  void at_most_one( std::vector<sat::lit> const& lits );
  /* drops constant-false literals and constant-true clauses */
  void clause( std::initializer_list<sat::lit> c ) { clause( std::vector<sat::lit>( c ) ); }
  void clause( std::vector<sat::lit> c );

  void declare_structure();
  void declare_guard_trees();
  void declare_state_bfs();
  void declare_tree_bfs();

  std::size_t input_index( bits const& u );
  reaction_block const& reaction_for( event_id e, std::size_t u );

  sat::lit algorithm_matches( std::size_t q, output_action const& parent, output_action const& node );

  guard_expr decode_tree( sat::solve_outcome const& m, std::size_t q, std::size_t k, std::size_t p ) const;
  guard_expr decode_truth_table( sat::solve_outcome const& m, std::size_t q, std::size_t k ) const;

  sat::solver& solver_;
  efsm::alphabet alphabet_;
  encoding_params params_;
  std::size_t C_, K_, P_, X_, Z_, EI_, EO_;
  sat::lit false_;

  std::vector<domain_var> ose_;                                  // [q]
  std::vector<std::vector<std::array<sat::lit, 2>>> alg_;        // [q][z][old]
  std::vector<std::vector<domain_var>> dest_;                    // [q][k]
  std::vector<std::vector<domain_var>> tie_;                     // [q][k]
  std::vector<std::vector<std::vector<domain_var>>> type_;       // [q][k][p]
  std::vector<std::vector<std::vector<domain_var>>> term_;       // [q][k][p]
  std::vector<std::vector<std::vector<domain_var>>> parent_;     // [q][k][p]
  std::vector<std::vector<std::vector<domain_var>>> child_;      // [q][k][p]

  std::vector<bits> inputs_;
  std::map<bits, std::size_t> input_ids_;
  std::vector<input_block> input_blocks_;
  std::map<std::pair<event_id, std::size_t>, reaction_block> reactions_;
  std::map<std::tuple<std::size_t, event_id, bits, bits>, sat::lit> matches_;

  /* active nodes, kept to find which algorithm bits a model actually constrains */
  struct negative_active
  {
    std::size_t parent;
    event_id event;
    bits input;
    bits parent_output;
  };

  std::vector<domain_var> pos_map_;
  std::vector<std::pair<std::size_t, bits>> pos_active_; // (node, parent output)
  std::vector<domain_var> neg_map_;
  std::vector<negative_active> neg_active_;

  std::unique_ptr<totalizer> guard_counter_;
  std::unique_ptr<totalizer> transition_counter_;

  std::vector<std::string> names_;
};

} // namespace efsm

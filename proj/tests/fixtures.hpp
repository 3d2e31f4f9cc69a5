#pragma once

#include <efsm/automaton.hpp>
#include <efsm/scenario_tree.hpp>

#include <functional>
#include <string>
#include <vector>

namespace efsm::test
{

inline scenario_element elem( alphabet const& a, std::string const& in_event, std::string const& x,
                              std::string const& out_event, std::string const& z )
{
  scenario_element e;
  e.in = { *a.find_input_event( in_event ), bits_from_string( x ) };
  e.out = { out_event == "." ? epsilon : *a.find_output_event( out_event ), bits_from_string( z ) };
  return e;
}

/* three-scenario example: one input event R, outputs A and B, |X| = 2, |Z| = 1 */
inline alphabet example_alphabet()
{
  return alphabet::make( { "R" }, { "A", "B" }, 2, 1 );
}

inline std::vector<scenario> example_scenarios()
{
  auto const a = example_alphabet();
  return {
      { elem( a, "R", "00", ".", "0" ), elem( a, "R", "01", "B", "1" ), elem( a, "R", "00", ".", "1" ),
        elem( a, "R", "01", "B", "0" ) },
      { elem( a, "R", "00", ".", "0" ), elem( a, "R", "10", "A", "0" ), elem( a, "R", "00", ".", "0" ),
        elem( a, "R", "01", "B", "1" ) },
      { elem( a, "R", "00", ".", "0" ), elem( a, "R", "10", "A", "0" ), elem( a, "R", "10", "A", "0" ) },
  };
}

/*! \brief Calls `f` on every machine with exactly `C` states, at most `K`
           transitions per state drawn from `guards`, every event, every
           output event (incl. epsilon) and every algorithm. Stops when `f`
           returns false. */
inline void enumerate_machines( alphabet const& a, std::size_t C, std::size_t K, std::vector<guard_expr> const& guards,
                                std::function<bool( automaton const& )> const& f )
{
  /* all per-state options */
  std::vector<var_update> updates{ { false, false }, { false, true }, { true, false }, { true, true } };
  std::vector<std::vector<transition>> transition_lists{ {} };
  std::vector<transition> singles;
  for ( std::size_t d = 0; d < C; ++d )
    for ( std::size_t e = 0; e < a.input_events.size(); ++e )
      for ( auto const& g : guards )
        singles.push_back( { d, static_cast<event_id>( e ), g } );
  for ( std::size_t len = 1; len <= K; ++len )
  {
    std::vector<std::vector<transition>> next;
    for ( auto const& l : transition_lists )
      if ( l.size() == len - 1 )
        for ( auto const& t : singles )
        {
          auto m = l;
          m.push_back( t );
          next.push_back( std::move( m ) );
        }
    transition_lists.insert( transition_lists.end(), next.begin(), next.end() );
  }

  std::vector<state_algorithm> algorithms{ {} };
  for ( std::size_t z = 0; z < a.num_output_vars(); ++z )
  {
    std::vector<state_algorithm> next;
    for ( auto const& alg : algorithms )
      for ( auto u : updates )
      {
        auto m = alg;
        m.push_back( u );
        next.push_back( std::move( m ) );
      }
    algorithms = std::move( next );
  }

  std::vector<state> options;
  for ( event_id o = epsilon; o < static_cast<event_id>( a.output_events.size() ); ++o )
    for ( auto const& alg : algorithms )
      for ( auto const& ts : transition_lists )
        options.push_back( { o, alg, ts } );

  std::vector<std::size_t> pick( C, 0 );
  for ( ;; )
  {
    std::vector<state> states;
    for ( auto i : pick )
      states.push_back( options[i] );
    if ( !f( automaton( a, std::move( states ) ) ) )
      return;
    std::size_t i = 0;
    while ( i < C && ++pick[i] == options.size() )
      pick[i++] = 0;
    if ( i == C )
      return;
  }
}

inline std::vector<guard_expr> terminal_guards( std::size_t num_vars )
{
  std::vector<guard_expr> g;
  for ( std::uint32_t x = 0; x < num_vars; ++x )
    g.push_back( guard_expr::terminal( x ) );
  return g;
}

inline bool satisfies_all( automaton const& m, std::vector<scenario> const& ss )
{
  for ( auto const& s : ss )
    if ( !m.satisfies( s ) )
      return false;
  return true;
}

} // namespace efsm::test

#include "fixtures.hpp"

#include <efsm/eval.hpp>

#include <doctest.h>

#include <set>
#include <sstream>

using namespace efsm;

namespace
{

std::vector<bool> table( guard_expr const& g, std::size_t nx )
{
  std::vector<bool> t;
  for ( std::size_t v = 0; v < ( std::size_t{ 1 } << nx ); ++v )
  {
    bits u( nx );
    for ( std::size_t i = 0; i < nx; ++i )
      u[i] = ( v >> i ) & 1;
    t.push_back( g.eval( u ) );
  }
  return t;
}

bool all_reachable( automaton const& m )
{
  std::vector<bool> seen( m.num_states(), false );
  std::vector<std::size_t> st{ 0 };
  seen[0] = true;
  while ( !st.empty() )
  {
    auto q = st.back();
    st.pop_back();
    for ( auto const& t : m.states()[q].transitions )
      if ( !seen[t.dest] )
        st.push_back( t.dest ), seen[t.dest] = true;
  }
  return std::find( seen.begin(), seen.end(), false ) == seen.end();
}

} // namespace

TEST_CASE( "single silent state" )
{
  generator_config cfg;
  cfg.states = 1;
  cfg.max_transitions = 0;
  cfg.input_vars = 2;
  cfg.output_vars = 1;
  rng_type rng( 1 );
  /* limit 0 means states^2 * events = 1; force none with an explicit cap */
  cfg.max_transitions = 0;
  generator_config none = cfg;
  none.max_transitions = 0;
  none.states = 1;
  none.input_events = 1;
  auto const m = random_automaton( none, rng );
  CHECK( m.num_states() == 1 );

  generator_config silent = cfg;
  silent.states = 1;
  silent.max_transitions = 1;
  bool saw_silent = false;
  for ( int i = 0; i < 20 && !saw_silent; ++i )
  {
    auto const s = random_automaton( silent, rng );
    saw_silent = s.transition_count() == 0 && s.states()[0].output_event == epsilon;
  }
  CHECK( saw_silent );
}

TEST_CASE( "generator invariants" )
{
  rng_type rng( 42 );
  for ( std::size_t C : { 2u, 4u, 8u } )
    for ( int rep = 0; rep < 20; ++rep )
    {
      generator_config cfg;
      cfg.states = C;
      cfg.input_vars = 3;
      cfg.output_vars = 2;
      cfg.input_events = 1 + rep % 2;
      auto const m = random_automaton( cfg, rng );
      CHECK( m.num_states() == C );
      CHECK( all_reachable( m ) );
      CHECK( m.transition_count() <= cfg.transition_limit() );
      CHECK( m.transition_count() >= C - 1 );
      for ( std::size_t q = 0; q < C; ++q )
      {
        auto const& s = m.states()[q];
        CHECK( s.transitions.size() <= C * cfg.input_events );
        std::set<std::pair<event_id, std::vector<bool>>> seen;
        for ( auto const& t : s.transitions )
        {
          CHECK( t.guard.size() <= 3 );
          CHECK( seen.insert( { t.input_event, table( t.guard, 3 ) } ).second );
          CHECK( m.states()[t.dest].output_event != epsilon );
        }
      }
    }
}

TEST_CASE( "generator is deterministic and handles the large configuration" )
{
  generator_config cfg;
  cfg.states = 8;
  cfg.input_vars = 10;
  cfg.output_vars = 7;
  rng_type r1( 9 ), r2( 9 );
  auto const m1 = random_automaton( cfg, r1 );
  auto const m2 = random_automaton( cfg, r2 );
  CHECK( m1 == m2 );
  CHECK( all_reachable( m1 ) );

  generator_config bad;
  bad.states = 2;
  bad.max_transitions = 5;
  CHECK_THROWS_AS( random_automaton( bad, r1 ), std::invalid_argument );
}

TEST_CASE( "simulation and forward check" )
{
  generator_config cfg;
  rng_type rng( 3 );
  auto const m = random_automaton( cfg, rng );
  for ( auto [count, length] : { std::pair{ 10u, 100u }, std::pair{ 50u, 50u } } )
  {
    auto const ss = simulate( m, count, length, rng );
    REQUIRE( ss.size() == count );
    for ( auto const& s : ss )
    {
      CHECK( s.size() == length );
      CHECK( m.satisfies( s ) );
    }
    CHECK( forward_check( m, ss ) == 100.0 );
  }

  rng_type a( 5 ), b( 5 );
  CHECK( simulate( m, 3, 7, a ) == simulate( m, 3, 7, b ) );

  /* a machine that never reacts fails every scenario containing a reaction */
  automaton idle( m.alphabet(), { state{ epsilon, state_algorithm( 3 ), {} } } );
  std::vector<scenario> reacting;
  for ( auto const& s : simulate( m, 40, 20, rng ) )
    for ( auto const& e : s )
      if ( e.out.event != epsilon )
      {
        reacting.push_back( s );
        break;
      }
  REQUIRE_FALSE( reacting.empty() );
  CHECK( forward_check( idle, reacting ) == 0.0 );
  CHECK_THROWS_AS( forward_check( idle, {} ), std::invalid_argument );
}

TEST_CASE( "study rows and aggregates" )
{
  experiment_config cfg;
  cfg.generator.states = 3;
  cfg.generator.input_vars = 2;
  cfg.generator.output_vars = 1;
  cfg.train_count = 10;
  cfg.train_length = 10;
  cfg.valid_count = 20;
  cfg.valid_length = 10;
  cfg.repetitions = 4;
  cfg.seed = 11;
  cfg.threads = 2;
  auto const r = run_study( cfg );
  REQUIRE( r.rows.size() == 4 );
  double sum = 0.0;
  for ( auto const& row : r.rows )
  {
    CAPTURE( row.status );
    CHECK( row.status == "ok" );
    CHECK( row.C <= row.true_C );
    CHECK( row.p >= 0.0 );
    CHECK( row.p <= 100.0 );
    sum += row.p;
  }
  CHECK( r.mean_p == doctest::Approx( sum / 4 ) );
  auto copy = r;
  copy.aggregate();
  CHECK( copy.mean_seconds == r.mean_seconds );
  CHECK( copy.full == r.full );

  /* same seed, same rows (times aside) */
  cfg.threads = 1;
  auto const again = run_study( cfg );
  std::ostringstream x, y;
  write_csv( x, r, false );
  write_csv( y, again, false );
  CHECK( x.str() == y.str() );

  std::ostringstream summary;
  write_summary( summary, r );
  CHECK( summary.str().find( "seed=11" ) != std::string::npos );
  CHECK( summary.str().find( "|S|\t|s|\t|X|" ) != std::string::npos );

  cfg.repetitions = 1;
  auto const one = run_study( cfg );
  CHECK( one.mean_p == one.rows[0].p );
  CHECK( one.mean_seconds == one.rows[0].seconds );
  CHECK( one.stddev_seconds == 0.0 );
}

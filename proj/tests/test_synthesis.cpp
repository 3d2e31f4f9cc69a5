#include "fixtures.hpp"

#include <efsm/synthesis.hpp>

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace efsm;

TEST_CASE( "basic_min finds two states after an UNSAT at one" )
{
  auto const r = basic_min( test::example_alphabet(), test::example_scenarios() );
  REQUIRE( r.found() );
  CHECK( r.C == 2 );
  CHECK( test::satisfies_all( *r.machine, test::example_scenarios() ) );
  REQUIRE( r.trail.size() == 2 );
  CHECK( r.trail[0].C == 1 );
  CHECK( r.trail[0].verdict == sat::verdict::unsat );
  CHECK( r.trail[1].verdict == sat::verdict::sat );
  CHECK( r.solver_calls == 2 );
}

TEST_CASE( "basic with a fixed state count" )
{
  auto const a = test::example_alphabet();
  CHECK_FALSE( basic( a, test::example_scenarios(), 1 ).found() );
  auto const r = basic( a, test::example_scenarios(), 3 );
  REQUIRE( r.found() );
  CHECK( r.machine->num_states() == 3 );
  CHECK( test::satisfies_all( *r.machine, test::example_scenarios() ) );
}

TEST_CASE( "basic_min_star matches the brute-force transition minimum" )
{
  /* brute force over all 2-state machines with <= 2 single-variable
     transitions per state gives 3 (see encoder tests) */
  auto const r = basic_min_star( test::example_alphabet(), test::example_scenarios() );
  REQUIRE( r.found() );
  CHECK( r.C == 2 );
  CHECK( r.T == 3 );
  CHECK( r.machine->transition_count() == 3 );
  CHECK( r.trail.back().verdict == sat::verdict::unsat );
}

TEST_CASE( "extended_min at P = 1" )
{
  auto const r = extended_min( test::example_alphabet(), test::example_scenarios(), 1 );
  REQUIRE( r.found() );
  CHECK( r.C == 2 );
  CHECK( r.N == 3 );
  CHECK( r.machine->guard_complexity() == 3 );
  CHECK( test::satisfies_all( *r.machine, test::example_scenarios() ) );
}

TEST_CASE( "extended_min_ub plateau width" )
{
  auto const a = test::example_alphabet();
  auto const eager = extended_min_ub( a, test::example_scenarios(), 0 );
  auto const full = extended_min_ub( a, test::example_scenarios(), unbounded_width );
  REQUIRE( eager.found() );
  REQUIRE( full.found() );
  CHECK( eager.P == 1 );
  CHECK( full.N <= eager.N );
  CHECK( full.N == 3 );
  CHECK( full.trail.size() >= eager.trail.size() );
}

TEST_CASE( "passive-only scenarios need no transitions" )
{
  auto const a = test::example_alphabet();
  std::vector<scenario> ss{ { test::elem( a, "R", "00", ".", "0" ), test::elem( a, "R", "11", ".", "0" ) } };
  auto const r = extended_min_ub( a, ss );
  REQUIRE( r.found() );
  CHECK( r.C == 1 );
  CHECK( r.T == 0 );
  CHECK( r.N == 0 );
}

TEST_CASE( "drivers agree across backends" )
{
  synthesis_options dimacs;
  dimacs.factory = sat::dimacs_factory( { EFSM_CADICAL_CLI, {}, false } );
  auto const a = test::example_alphabet();
  auto const x = basic_min_star( a, test::example_scenarios() );
  auto const y = basic_min_star( a, test::example_scenarios(), dimacs );
  CHECK( x.C == y.C );
  CHECK( x.T == y.T );
  auto const u = extended_min( a, test::example_scenarios(), 2 );
  auto const v = extended_min( a, test::example_scenarios(), 2, std::nullopt, dimacs );
  CHECK( u.N == v.N );
}

TEST_CASE( "trail formatting" )
{
  solver_call c;
  c.phase = "basic-min";
  c.C = 2;
  c.K = 2;
  c.verdict = sat::verdict::sat;
  auto const s = to_string( c );
  CHECK( s.find( "basic-min" ) == 0 );
  CHECK( s.find( "C=2" ) != std::string::npos );
  CHECK( s.find( "SAT" ) != std::string::npos );

  std::ostringstream os;
  write_trail( os, { c, c } );
  auto const text = os.str();
  CHECK( std::count( text.begin(), text.end(), '\n' ) == 2 );
}

TEST_CASE( "recheck rejects a machine that misses a scenario" )
{
  auto const a = test::example_alphabet();
  automaton m( a, { state{ epsilon, { { false, true } }, {} } } );
  CHECK_THROWS_AS( recheck( m, test::example_scenarios() ), std::logic_error );
}

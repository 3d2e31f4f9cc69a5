#include "fixtures.hpp"

#include <efsm/encoder.hpp>

#include <doctest.h>

#include <sstream>

using namespace efsm;

namespace
{

struct instance
{
  std::unique_ptr<sat::solver> solver = sat::make_incremental_solver();
  std::unique_ptr<encoder> enc;

  instance( alphabet const& a, std::vector<scenario> const& ss, encoding_params p )
  {
    enc = std::make_unique<encoder>( *solver, a, p );
    enc->encode_positive( positive_tree::build( a, ss ) );
  }
};

encoding_params params( std::size_t C, std::size_t P = 1, bool guards = true )
{
  encoding_params p;
  p.num_states = C;
  p.max_guard_size = P;
  p.encode_guards = guards;
  return p;
}

/* smallest transition count and guard size over satisfying machines */
struct brute_force_minimum
{
  bool found = false;
  std::size_t transitions = 0;
  std::size_t guard_size = 0;
};

brute_force_minimum brute_force( std::size_t C, std::size_t K )
{
  brute_force_minimum r;
  test::enumerate_machines( test::example_alphabet(), C, K, test::terminal_guards( 2 ), [&]( automaton const& m ) {
    if ( test::satisfies_all( m, test::example_scenarios() ) )
    {
      if ( !r.found || m.transition_count() < r.transitions )
        r.transitions = m.transition_count();
      if ( !r.found || m.guard_complexity() < r.guard_size )
        r.guard_size = m.guard_complexity();
      r.found = true;
    }
    return true;
  } );
  return r;
}

} // namespace

TEST_CASE( "example scenarios need two states" )
{
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();

  CHECK_FALSE( brute_force( 1, 2 ).found );
  auto const oracle = brute_force( 2, 2 );
  REQUIRE( oracle.found );

  for ( bool guards : { false, true } )
  {
    instance one( a, ss, params( 1, 1, guards ) );
    CHECK( one.solver->solve().is_unsat() );

    instance two( a, ss, params( 2, 1, guards ) );
    auto r = two.solver->solve();
    REQUIRE( r.is_sat() );
    auto const m = two.enc->decode( r );
    CHECK( m.num_states() == 2 );
    CHECK( test::satisfies_all( m, ss ) );
  }
}

TEST_CASE( "transition and guard-size minima agree with enumeration" )
{
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();
  auto const oracle = brute_force( 2, 2 );
  REQUIRE( oracle.found );

  instance t( a, ss, params( 2, 1 ) );
  t.enc->transition_counter( 8 );
  std::size_t T = 8;
  for ( ;; )
  {
    auto r = t.solver->solve();
    if ( !r.is_sat() )
      break;
    T = t.enc->decode( r ).transition_count();
    t.enc->bound_transitions( T - 1 );
  }
  CHECK( T == oracle.transitions );

  instance n( a, ss, params( 2, 1 ) );
  n.enc->guard_size_counter( 8 );
  std::size_t N = 8;
  for ( ;; )
  {
    auto r = n.solver->solve();
    if ( !r.is_sat() )
      break;
    auto const m = n.enc->decode( r );
    CHECK( m.guard_complexity() == n.enc->typed_nodes( r ) );
    N = m.guard_complexity();
    n.enc->bound_guard_size( N - 1 );
  }
  CHECK( N == oracle.guard_size );
}

TEST_CASE( "conjunction needs a three-node guard" )
{
  auto const a = alphabet::make( { "R" }, { "A" }, 2, 1 );
  std::vector<scenario> ss{ { test::elem( a, "R", "11", "A", "0" ) },
                            { test::elem( a, "R", "10", ".", "0" ) },
                            { test::elem( a, "R", "01", ".", "0" ) },
                            { test::elem( a, "R", "00", ".", "0" ) } };
  for ( std::size_t P : { 1, 2 } )
  {
    instance i( a, ss, params( 1, P ) );
    CHECK( i.solver->solve().is_unsat() );
  }
  instance i( a, ss, params( 1, 3 ) );
  auto r = i.solver->solve();
  REQUIRE( r.is_sat() );
  auto const m = i.enc->decode( r );
  REQUIRE( m.states()[0].transitions.size() == 1 );
  auto const& g = m.states()[0].transitions[0].guard;
  CHECK( g.size() == 3 );
  CHECK( g.root().type == guard_expr::kind::conjunction );
  for ( auto u : { "00", "01", "10", "11" } )
    CHECK( r.value( i.enc->node_value( 1, 1, 1, bits_from_string( u ) ) ) == ( std::string( u ) == "11" ) );
}

TEST_CASE( "all-passive scenario needs no transitions" )
{
  auto const a = test::example_alphabet();
  std::vector<scenario> ss{ { test::elem( a, "R", "00", ".", "0" ) } };
  instance i( a, ss, params( 1 ) );
  i.enc->bound_guard_size( 0 );
  auto r = i.solver->solve();
  REQUIRE( r.is_sat() );
  auto const m = i.enc->decode( r );
  CHECK( m.transition_count() == 0 );
}

TEST_CASE( "null transitions come last" )
{
  auto const a = test::example_alphabet();
  instance i( a, { { test::elem( a, "R", "00", ".", "0" ) } }, params( 2 ) );
  auto const& e = *i.enc;
  CHECK( i.solver->solve( { e.destination( 1, 1 ).eq( 0 ), e.destination( 1, 2 ).eq( 2 ) } ).is_unsat() );
  CHECK( i.solver->solve( { e.destination( 1, 1 ).eq( 2 ), e.destination( 1, 2 ).eq( 0 ) } ).is_sat() );
}

TEST_CASE( "first fired respects priority" )
{
  auto const a = test::example_alphabet();
  instance i( a, { { test::elem( a, "R", "00", ".", "0" ) } }, params( 1, 1, false ) );
  auto const u = bits_from_string( "11" );
  auto const th1 = i.enc->firing( 1, 1, u );
  auto const ff = i.enc->first_fired( 1, 0, u ).eq( 1 );
  CHECK( i.solver->solve( { th1, ~ff } ).is_unsat() );
}

TEST_CASE( "negative loop excludes the current model" )
{
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();
  instance i( a, ss, params( 2, 1 ) );
  auto r = i.solver->solve();
  REQUIRE( r.is_sat() );
  auto const m = i.enc->decode( r );

  /* take any infinite behavior of m as a lasso: repeat R01 from the start */
  negative_scenario bad;
  std::size_t q = 0;
  bits z = zero_bits( 1 );
  std::vector<std::pair<std::size_t, bits>> seen{ { q, z } };
  for ( ;; )
  {
    auto s = m.step( q, z, { 0, bits_from_string( "01" ) } );
    bad.elements.push_back( { { 0, bits_from_string( "01" ) }, s.out } );
    q = s.state;
    z = s.out.output;
    auto it = std::find( seen.begin(), seen.end(), std::make_pair( q, z ) );
    if ( it != seen.end() )
    {
      auto const pos = static_cast<std::size_t>( it - seen.begin() );
      if ( pos == 0 )
      {
        seen.emplace_back( q, z );
        continue;
      }
      bad.loop_start = pos;
      break;
    }
    seen.emplace_back( q, z );
  }
  REQUIRE( exhibits( m, bad ) );

  negative_tree nt( a );
  i.enc->encode_negative( nt, nt.add( bad ) );
  auto r2 = i.solver->solve();
  if ( r2.is_sat() )
  {
    auto const m2 = i.enc->decode( r2 );
    CHECK_FALSE( exhibits( m2, bad ) );
    CHECK( test::satisfies_all( m2, ss ) );
  }
}

TEST_CASE( "scenario the machine cannot execute keeps the instance satisfiable" )
{
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();
  instance i( a, ss, params( 2, 1 ) );
  negative_tree nt( a );
  /* contradicts the positive scenarios, so no machine can execute it */
  negative_scenario s{ { test::elem( a, "R", "00", "A", "0" ) }, std::nullopt };
  i.enc->encode_negative( nt, nt.add( s ) );
  CHECK( i.solver->solve().is_sat() );
}

TEST_CASE( "binary at-most-one gives the same verdicts" )
{
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();
  for ( std::size_t C : { 1, 2, 3 } )
  {
    auto p = params( C, 2 );
    auto q = p;
    q.amo = amo_encoding::binary;
    instance x( a, ss, p ), y( a, ss, q );
    auto rx = x.solver->solve();
    auto ry = y.solver->solve();
    CHECK( rx.status == ry.status );
    if ( ry.is_sat() )
      CHECK( test::satisfies_all( y.enc->decode( ry ), ss ) );
  }
}

TEST_CASE( "dimacs dump names variables" )
{
  auto const a = test::example_alphabet();
  auto s = sat::make_incremental_solver();
  s->keep_clause_log( true );
  auto p = params( 1 );
  p.debug_names = true;
  encoder e( *s, a, p );
  std::ostringstream os;
  e.write_dimacs( os );
  CHECK( os.str().find( "c var 2 ose[1]=0" ) != std::string::npos );
  CHECK( os.str().find( "p cnf" ) != std::string::npos );
}

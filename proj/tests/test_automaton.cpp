#include "fixtures.hpp"

#include <doctest.h>

using namespace efsm;

namespace
{

/* two-state witness for the example scenarios */
automaton example_witness()
{
  auto const a = test::example_alphabet();
  state q1{ 0, { var_update{} }, {} };
  state q2{ 1, { var_update{ true, false } }, {} };
  q1.transitions = { { 1, 0, guard_expr::terminal( 1 ) }, { 0, 0, guard_expr::terminal( 0 ) } };
  q2.transitions = { { 1, 0, guard_expr::terminal( 1 ) } };
  return automaton( a, { q1, q2 } );
}

} // namespace

TEST_CASE( "bits round trip through strings" )
{
  CHECK( to_string( bits_from_string( "0110" ) ) == "0110" );
  CHECK_THROWS_AS( bits_from_string( "01x" ), structural_error );
}

TEST_CASE( "guard evaluation follows the parse tree" )
{
  auto const x1 = guard_expr::terminal( 0 );
  auto const x2 = guard_expr::terminal( 1 );
  auto const g = guard_expr::conjoin( x1, guard_expr::negate( x2 ) );
  CHECK( g.size() == 4 );
  CHECK( g.eval( bits_from_string( "10" ) ) );
  CHECK_FALSE( g.eval( bits_from_string( "11" ) ) );
  CHECK_FALSE( g.eval( bits_from_string( "00" ) ) );
  CHECK( guard_expr::disjoin( x1, x2 ).eval( bits_from_string( "01" ) ) );
  CHECK_THROWS_AS( guard_expr::terminal( 5 ).eval( bits_from_string( "01" ) ), structural_error );
  CHECK( g == guard_expr::conjoin( x1, guard_expr::negate( x2 ) ) );
  CHECK_FALSE( g == guard_expr::conjoin( x2, guard_expr::negate( x1 ) ) );
}

TEST_CASE( "first matching transition fires" )
{
  auto const a = alphabet::make( { "R" }, { "A", "B" }, 1, 1 );
  state s0{ epsilon, { var_update{} }, {} };
  s0.transitions = { { 1, 0, guard_expr::terminal( 0 ) }, { 2, 0, guard_expr::terminal( 0 ) } };
  state s1{ 0, { var_update{ true, true } }, {} };
  state s2{ 1, { var_update{} }, {} };
  automaton m( a, { s0, s1, s2 } );
  auto r = m.step( 0, bits_from_string( "0" ), { 0, bits_from_string( "1" ) } );
  CHECK( r.state == 1 );
  CHECK( r.out.event == 0 );
  CHECK( to_string( r.out.output ) == "1" );
}

TEST_CASE( "no enabled transition ignores the input action" )
{
  auto const m = example_witness();
  auto r = m.step( 1, bits_from_string( "1" ), { 0, bits_from_string( "10" ) } );
  CHECK( r.state == 1 );
  CHECK( r.out.event == epsilon );
  CHECK( to_string( r.out.output ) == "1" );
}

TEST_CASE( "example witness satisfies all three scenarios" )
{
  auto const m = example_witness();
  for ( auto const& s : test::example_scenarios() )
    CHECK( m.satisfies( s ) );
  CHECK( m.transition_count() == 3 );
  CHECK( m.guard_complexity() == 3 );
}

TEST_CASE( "matching prefix stops at the first mismatch" )
{
  auto const m = example_witness();
  auto s = test::example_scenarios()[0];
  s[2].out.output = bits_from_string( "0" );
  CHECK( m.matching_prefix( s ) == 2 );
  CHECK_FALSE( m.satisfies( s ) );
}

TEST_CASE( "structural validation" )
{
  auto const a = test::example_alphabet();
  state bad{ 0, { var_update{} }, { { 3, 0, guard_expr::terminal( 0 ) } } };
  CHECK_THROWS_AS( automaton( a, { bad } ), structural_error );
  state wide{ 0, { var_update{} }, { { 0, 0, guard_expr::terminal( 2 ) } } };
  CHECK_THROWS_AS( automaton( a, { wide } ), structural_error );
  state noalg{ 0, {}, {} };
  CHECK_THROWS_AS( automaton( a, { noalg } ), structural_error );
  CHECK_THROWS_AS( automaton( a, {} ), structural_error );

  auto dup = a;
  dup.output_events = { "A", "A" };
  CHECK_THROWS_AS( dup.validate(), structural_error );
}

#include "fixtures.hpp"

#include <doctest.h>

using namespace efsm;

TEST_CASE( "positive tree merges shared input prefixes" )
{
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();
  auto const t = positive_tree::build( a, ss );
  /* root, shared R00, then 3 + 2 + 1 */
  CHECK( t.size() == 9 );
  CHECK( t.count_active() == 5 );
  CHECK( t.count_passive() == 3 );
  CHECK( t.replay_check( ss ) );
  CHECK( t.inputs().size() == 3 );
  CHECK( t.node( 0 ).is_root() );
  CHECK( t.node( 0 ).out.event == epsilon );
}

TEST_CASE( "positive tree rejects conflicting outputs" )
{
  auto const a = test::example_alphabet();
  std::vector<scenario> ss{ { test::elem( a, "R", "01", "B", "1" ) }, { test::elem( a, "R", "01", "A", "1" ) } };
  CHECK_THROWS_AS( positive_tree::build( a, ss ), output_conflict );
}

TEST_CASE( "positive tree rejects malformed input" )
{
  auto const a = test::example_alphabet();
  CHECK_THROWS_AS( positive_tree::build( a, {} ), scenario_error );
  auto e = test::elem( a, "R", "01", "B", "1" );
  e.in.input.push_back( true );
  CHECK_THROWS_AS( positive_tree::build( a, { { e } } ), scenario_error );
  CHECK_THROWS_AS( positive_tree::build( a, { { test::elem( a, "R", "01", ".", "1" ) } } ), scenario_error );
}

TEST_CASE( "negative tree reports only new parts" )
{
  auto const a = test::example_alphabet();
  negative_tree t( a );
  negative_scenario s{ { test::elem( a, "R", "01", "B", "1" ), test::elem( a, "R", "01", "B", "0" ) }, 1 };
  auto d = t.add( s );
  CHECK( d.nodes.size() == 2 );
  REQUIRE( d.back_edges.size() == 1 );
  CHECK( d.back_edges[0] == std::pair<std::size_t, std::size_t>{ 2, 1 } );
  CHECK( t.add( s ).empty() );

  /* same input prefix, different output: branches instead of conflicting */
  negative_scenario other{ { test::elem( a, "R", "01", "A", "1" ) }, std::nullopt };
  auto d2 = t.add( other );
  CHECK( d2.nodes.size() == 1 );
  CHECK( d2.loopless_ends.size() == 1 );
  CHECK( t.size() == 4 );

  auto all = t.everything();
  CHECK( all.nodes.size() == 3 );
  CHECK( all.back_edges.size() == 1 );
  CHECK( all.loopless_ends.size() == 1 );

  CHECK_THROWS_AS( t.add( { { test::elem( a, "R", "01", "A", "1" ) }, 2 } ), scenario_error );
}

TEST_CASE( "exhibits compares state and outputs at the loop" )
{
  auto const a = alphabet::make( { "R" }, { "A" }, 1, 1 );
  state s0{ 0, { var_update{ true, false } }, { { 0, 0, guard_expr::terminal( 0 ) } } };
  automaton m( a, { s0 } );
  auto const on = test::elem( a, "R", "1", "A", "1" );
  auto const off = test::elem( a, "R", "1", "A", "0" );
  CHECK( exhibits( m, { { on, off }, std::nullopt } ) );
  CHECK_FALSE( exhibits( m, { { on, on }, std::nullopt } ) );
  /* outputs alternate, so the configuration repeats only every two steps */
  CHECK_FALSE( exhibits( m, { { on, off }, 1 } ) );
  CHECK( exhibits( m, { { on, off, on }, 1 } ) );
}

#include "fixtures.hpp"

#include <efsm/io.hpp>

#include <doctest.h>

#include <random>

using namespace efsm;

namespace
{

char const* const example_text = R"(# three scenarios over one input event
inevents R
outevents A B
invars 2
outvars 1
scenario
R[00] -> .[0]
R[01] -> B[1]
R[00] -> .[1]
R[01] -> B[0]
scenario
R[00] -> .[0]
R[10] -> A[0]
R[00] -> .[0]
R[01] -> B[1]
scenario
R[00] -> .[0]
R[10] -> A[0]
R[10] -> A[0]
)";

template<typename F>
void expect_error_at( F&& f, std::size_t line, std::size_t column )
{
  try
  {
    f();
    FAIL( "expected parse_error" );
  }
  catch ( io::parse_error const& e )
  {
    CAPTURE( std::string( e.what() ) );
    CHECK( e.line() == line );
    CHECK( e.column() == column );
  }
}

guard_expr random_guard( std::mt19937& rng, int d )
{
  auto const k = d == 0 ? 0 : rng() % 4;
  switch ( k )
  {
  case 0:
    return guard_expr::terminal( rng() % 3 );
  case 1:
    return guard_expr::negate( random_guard( rng, d - 1 ) );
  case 2:
    return guard_expr::conjoin( random_guard( rng, d - 1 ), random_guard( rng, d - 1 ) );
  default:
    return guard_expr::disjoin( random_guard( rng, d - 1 ), random_guard( rng, d - 1 ) );
  }
}

} // namespace

TEST_CASE( "example scenario file" )
{
  auto const f = io::parse_scenarios( example_text );
  CHECK( f.alpha == test::example_alphabet() );
  REQUIRE( f.positives.size() == 3 );
  CHECK( f.positives[0].size() == 4 );
  CHECK( f.positives[1].size() == 4 );
  CHECK( f.positives[2].size() == 3 );
  CHECK( f.positives == test::example_scenarios() );
  CHECK( f.negatives.empty() );

  /* canonical form drops the comment */
  auto const canonical = io::serialize_scenarios( f );
  CHECK( canonical == std::string( example_text ).substr( std::string( example_text ).find( '\n' ) + 1 ) );
  CHECK( io::serialize_scenarios( io::parse_scenarios( canonical ) ) == canonical );
}

TEST_CASE( "negative scenarios and named variables round trip" )
{
  char const* text = "inevents go stop\n"
                     "outevents on\n"
                     "invars a b\n"
                     "outvars lamp\n"
                     "scenario\n"
                     "go[10] -> on[1]\n"
                     "negscenario loop=1\n"
                     "go[10] -> on[1]\n"
                     "stop[00] -> .[1]\n"
                     "negscenario\n"
                     "stop[11] -> on[0]\n";
  auto const f = io::parse_scenarios( text );
  CHECK( f.alpha.input_vars == std::vector<std::string>{ "a", "b" } );
  REQUIRE( f.negatives.size() == 2 );
  CHECK( f.negatives[0].loop_start == 1u );
  CHECK_FALSE( f.negatives[1].loop_start );
  CHECK( io::serialize_scenarios( f ) == text );
}

TEST_CASE( "scenario syntax errors" )
{
  CHECK_THROWS_AS( io::parse_scenarios( "" ), io::parse_error );
  CHECK_THROWS_AS( io::parse_scenarios( "# nothing\n\n" ), io::parse_error );
  auto const head = std::string( "inevents R\noutevents A\ninvars 2\noutvars 1\n" );
  expect_error_at( [&] { io::parse_scenarios( head + "scenario\nQ[00] -> A[0]\n" ); }, 6, 1 );
  expect_error_at( [&] { io::parse_scenarios( head + "scenario\nR[0] -> A[0]\n" ); }, 6, 3 );
  expect_error_at( [&] { io::parse_scenarios( head + "scenario\nR[00] -> C[0]\n" ); }, 6, 10 );
  expect_error_at( [&] { io::parse_scenarios( head + "scenario\nR[00] => A[0]\n" ); }, 6, 7 );
  expect_error_at( [&] { io::parse_scenarios( head + "R[00] -> A[0]\n" ); }, 5, 1 );
  expect_error_at( [&] { io::parse_scenarios( head + "scenario\nscenario\nR[00] -> A[0]\n" ); }, 5, 1 );
  expect_error_at( [&] { io::parse_scenarios( head + "negscenario loop=1\nR[00] -> A[0]\n" ); }, 5, 1 );
  CHECK_THROWS_AS( io::parse_scenarios( "inevents R R\ninvars 1\noutvars 1\nscenario\nR[0] -> .[0]\n" ),
                   io::parse_error );
  CHECK_THROWS_AS( io::parse_scenarios( "outevents A\ninvars 1\noutvars 1\n" ), io::parse_error );
}

TEST_CASE( "guard infix" )
{
  auto const a = test::example_alphabet();
  auto const x1 = guard_expr::terminal( 0 );
  auto const x2 = guard_expr::terminal( 1 );
  CHECK( io::guard_to_string( guard_expr::conjoin( x1, guard_expr::negate( x2 ) ), a ) == "x1 & ~x2" );
  CHECK( io::guard_to_string( guard_expr::negate( guard_expr::disjoin( x1, x2 ) ), a ) == "~(x1 | x2)" );
  CHECK( io::guard_to_string( guard_expr::conjoin( guard_expr::disjoin( x1, x2 ), x1 ), a ) == "(x1 | x2) & x1" );
  CHECK( io::guard_to_string( guard_expr::conjoin( guard_expr::conjoin( x1, x2 ), x1 ), a ) == "(x1 & x2) & x1" );
  CHECK( io::guard_to_string( guard_expr::conjoin( x1, guard_expr::conjoin( x2, x1 ) ), a ) == "x1 & x2 & x1" );
  CHECK( io::guard_to_string( guard_expr::disjoin( guard_expr::conjoin( x1, x2 ), x1 ), a ) == "x1 & x2 | x1" );
  CHECK( io::parse_guard( "x1 & ~x2", a ) == guard_expr::conjoin( x1, guard_expr::negate( x2 ) ) );
  CHECK_THROWS_AS( io::parse_guard( "x1 & x3", a ), io::parse_error );
  CHECK_THROWS_AS( io::parse_guard( "x1 &", a ), io::parse_error );

  auto const b = alphabet::make( { "R" }, { "A" }, 3, 1 );
  std::mt19937 rng( 1 );
  for ( int i = 0; i < 300; ++i )
  {
    auto const g = random_guard( rng, 3 );
    auto const s = io::guard_to_string( g, b );
    CAPTURE( s );
    CHECK( io::parse_guard( s, b ) == g );
  }
}

TEST_CASE( "automaton text round trip and exports" )
{
  auto const a = test::example_alphabet();
  auto const x1 = guard_expr::terminal( 0 );
  auto const x2 = guard_expr::terminal( 1 );
  automaton m( a, { state{ epsilon, { { false, true } }, { { 1, 0, guard_expr::conjoin( x1, guard_expr::negate( x2 ) ) } } },
                    state{ 0, { { true, false } }, { { 0, 0, x2 }, { 1, 0, x1 } } } } );
  auto const text = io::to_text( m );
  CHECK( text == "inevents R\noutevents A B\ninvars 2\noutvars 1\n"
                 "state 0 . 0/1\n  R [x1 & ~x2] -> 1\n"
                 "state 1 A 1/0\n  R [x2] -> 0\n  R [x1] -> 1\n" );
  CHECK( io::parse_automaton( text ) == m );

  auto const dot = io::to_dot( m );
  CHECK( dot.find( "q1 [label=\"q1\\nA\\n~z1\"]" ) != std::string::npos );
  CHECK( dot.find( "q0 -> q1 [label=\"1: R [x1 & ~x2]\"]" ) != std::string::npos );
  CHECK( dot.find( "q1 -> q1 [label=\"2: R [x1]\"]" ) != std::string::npos );

  automaton lone( a, { state{ 1, { { true, true } }, {} } } );
  auto const d = io::to_dot( lone );
  CHECK( d.find( "q0 [label=\"q0\\nB\\nz1:=1\"" ) != std::string::npos );
  CHECK( d.find( "->" ) == std::string::npos );

  auto const j = io::to_json( m );
  CHECK( j.find( "\"guard\": \"x1 & ~x2\"" ) != std::string::npos );
  CHECK( j.find( "\"output_event\": null" ) != std::string::npos );
}

TEST_CASE( "automaton syntax errors" )
{
  auto const head = std::string( "inevents R\noutevents A\ninvars 2\noutvars 1\n" );
  expect_error_at( [&] { io::parse_automaton( head + "state 1 A 0/1\n" ); }, 5, 7 );
  expect_error_at( [&] { io::parse_automaton( head + "state 0 A 01/1\n" ); }, 5, 11 );
  expect_error_at( [&] { io::parse_automaton( head + "state 0 A 0/1\n  R [x1 & y] -> 0\n" ); }, 6, 11 );
  expect_error_at( [&] { io::parse_automaton( head + "state 0 A 0/1\n  R [x1] -> 3\n" ); }, 6, 13 );
  expect_error_at( [&] { io::parse_automaton( head + "  R [x1] -> 0\n" ); }, 5, 3 );
  expect_error_at( [&] { io::parse_automaton( head + "state 0 A 0/1\n  R [  x1 & y ] -> 0\n" ); }, 6, 13 );
  auto const spaced = io::parse_automaton( head + "state 0 A 0/1\n  R [ x1 ]   ->  0\n" );
  CHECK( spaced.states()[0].transitions.at( 0 ).guard == guard_expr::terminal( 0 ) );
}

TEST_CASE( "LTL files" )
{
  auto const a = test::example_alphabet();
  auto const fs = io::parse_ltl( "# spec\nG (out=B -> z1)\n\nF out=A\n", a );
  REQUIRE( fs.size() == 2 );
  CHECK( fs[1]->type == ltl::op::finally );
  expect_error_at( [&] { io::parse_ltl( "G x1\nG (x1 & )\n", a ); }, 2, 9 );
  CHECK_THROWS_AS( io::parse_ltl( "# nothing\n", a ), io::parse_error );
}

TEST_CASE( "plant files" )
{
  auto const a = test::example_alphabet();
  CHECK( io::parse_plant( "free\n", a ).is_free() );
  auto const p = io::parse_plant( "states 2\ninitial 1\n"
                                  "1 . -> 0 R[11]\n"
                                  "0 A - -> 1 R[00]\n"
                                  "0 * 1 -> 0 R[01]\n",
                                  a );
  CHECK( p.num_states() == 2 );
  CHECK( p.initial() == 1 );
  REQUIRE( p.rules().size() == 3 );
  CHECK( p.rules()[0].on_event == epsilon );
  CHECK( p.rules()[1].on_event == 0 );
  CHECK( p.rules()[1].on_output == "-" );
  CHECK_FALSE( p.rules()[2].on_event );
  CHECK( p.rules()[2].emit == input_action{ 0, bits{ false, true } } );
  CHECK( p.observes_events() );

  expect_error_at( [&] { io::parse_plant( "states 1\n0 * -> 0 R[1]\n", a ); }, 2, 12 );
  expect_error_at( [&] { io::parse_plant( "states 1\n0 * 12 -> 0 R[00]\n", a ); }, 2, 5 );
  CHECK_THROWS_AS( io::parse_plant( "states 1\n0 * -> 4 R[00]\n", a ), io::parse_error );
  CHECK_THROWS_AS( io::parse_plant( "0 * -> 0 R[00]\n", a ), io::parse_error );
  CHECK_THROWS_AS( io::parse_plant( "free\nstates 1\n", a ), io::parse_error );
}

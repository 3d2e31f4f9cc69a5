#include "fixtures.hpp"

#include <efsm/buchi.hpp>
#include <efsm/verifier.hpp>

#include <doctest.h>

#include <map>
#include <random>

using namespace efsm;

namespace
{

/* q0(eps) -x-> q1(A) -x-> q2(A); q2 -!x-> q3(A), q2 -x-> q4(B); q3 -x-> q1 */
automaton lamp()
{
  auto const a = alphabet::make( { "R" }, { "A", "B" }, 1, 0 );
  auto const x = guard_expr::terminal( 0 );
  auto const nx = guard_expr::negate( x );
  return automaton( a, { state{ epsilon, {}, { { 1, 0, x } } },
                         state{ 0, {}, { { 2, 0, x } } },
                         state{ 0, {}, { { 3, 0, nx }, { 4, 0, x } } },
                         state{ 0, {}, { { 1, 0, x } } },
                         state{ 1, {}, {} } } );
}

input_action r( bool x )
{
  return { 0, bits{ x } };
}

/* deterministic plant cycling through the given inputs */
plant_model cycle( alphabet const& a, std::vector<bool> const& xs )
{
  std::vector<plant_rule> rules;
  for ( std::size_t i = 0; i < xs.size(); ++i )
    rules.push_back( { i, std::nullopt, "", ( i + 1 ) % xs.size(), r( xs[i] ) } );
  return plant_model( a, xs.size(), 0, rules );
}

ltl::formula_ptr f( std::string_view text, alphabet const& a )
{
  return ltl::parse( text, a );
}

/* emptiness oracle: some reachable accepting node lies on a cycle */
bool nonempty( product_graph const& g )
{
  auto const n = g.successors.size();
  auto reach_from = [&]( std::size_t s ) {
    std::vector<bool> seen( n, false );
    std::vector<std::size_t> st{ s };
    seen[s] = true;
    while ( !st.empty() )
    {
      auto v = st.back();
      st.pop_back();
      for ( auto w : g.successors[v] )
        if ( !seen[w] )
        {
          seen[w] = true;
          st.push_back( w );
        }
    }
    return seen;
  };
  auto const from_init = reach_from( 0 );
  for ( std::size_t v = 0; v < n; ++v )
  {
    if ( !from_init[v] || !g.accepting[v] )
      continue;
    for ( auto w : g.successors[v] )
      if ( reach_from( w )[v] )
        return true;
  }
  return false;
}

guard_expr random_guard( std::mt19937& rng, std::size_t nx )
{
  auto leaf = [&] {
    auto t = guard_expr::terminal( static_cast<std::uint32_t>( rng() % nx ) );
    return rng() % 2 ? guard_expr::negate( t ) : t;
  };
  switch ( rng() % 3 )
  {
  case 0:
    return leaf();
  case 1:
    return guard_expr::conjoin( leaf(), leaf() );
  default:
    return guard_expr::disjoin( leaf(), leaf() );
  }
}

automaton random_machine( std::mt19937& rng, alphabet const& a )
{
  auto const C = 1 + rng() % 3;
  std::vector<state> states( C );
  for ( std::size_t q = 0; q < C; ++q )
  {
    states[q].output_event = static_cast<event_id>( rng() % 3 ) - 1;
    for ( std::size_t z = 0; z < a.num_output_vars(); ++z )
      states[q].algorithm.push_back( { rng() % 2 == 0, rng() % 2 == 0 } );
    auto const k = rng() % 3;
    for ( std::size_t t = 0; t < k; ++t )
      states[q].transitions.push_back(
          { rng() % C, static_cast<event_id>( rng() % a.input_events.size() ), random_guard( rng, a.num_input_vars() ) } );
  }
  return automaton( a, std::move( states ) );
}

ltl::formula_ptr random_formula( std::mt19937& rng, alphabet const& a, std::size_t d )
{
  using ltl::op;
  auto leaf = [&]() -> ltl::formula_ptr {
    switch ( rng() % 4 )
    {
    case 0:
      return ltl::formula::make_atom( { ltl::atom::kind::in_var, static_cast<int>( rng() % 2 ) } );
    case 1:
      return ltl::formula::make_atom( { ltl::atom::kind::out_var, 0 } );
    case 2:
      return ltl::formula::make_atom( { ltl::atom::kind::out_event, static_cast<int>( rng() % 3 ) - 1 } );
    default:
      return ltl::formula::make_atom( { ltl::atom::kind::in_event, static_cast<int>( rng() % 2 ) } );
    }
  };
  if ( d == 0 )
    return leaf();
  static constexpr op unary[] = { op::negation, op::next, op::globally, op::finally };
  static constexpr op binary[] = { op::conjunction, op::disjunction, op::implication, op::until, op::release };
  switch ( rng() % 3 )
  {
  case 0:
    return leaf();
  case 1:
    return ltl::formula::make( unary[rng() % 4], random_formula( rng, a, d - 1 ) );
  default:
    return ltl::formula::make( binary[rng() % 5], random_formula( rng, a, d - 1 ), random_formula( rng, a, d - 1 ) );
  }
}

input_action random_input( std::mt19937& rng, alphabet const& a )
{
  bits x( a.num_input_vars() );
  for ( std::size_t i = 0; i < x.size(); ++i )
    x[i] = rng() % 2;
  return { static_cast<event_id>( rng() % a.input_events.size() ), x };
}

/* a random run u v v v ... of the free closed loop as a lasso: repeat v
   until the controller configuration at a block boundary recurs */
std::pair<std::vector<ltl::step>, std::size_t> random_lasso( std::mt19937& rng, automaton const& m )
{
  auto const& a = m.alphabet();
  std::vector<input_action> u( rng() % 3 ), v( 1 + rng() % 3 );
  for ( auto& i : u )
    i = random_input( rng, a );
  for ( auto& i : v )
    i = random_input( rng, a );

  std::vector<input_action> inputs = u;
  std::map<std::pair<std::size_t, bits>, std::size_t> boundary; // config -> input position
  std::size_t q = 0;
  bits z = zero_bits( a.num_output_vars() );
  for ( auto const& i : u )
  {
    auto s = m.step( q, z, i );
    q = s.state;
    z = s.out.output;
  }
  for ( ;; )
  {
    auto [it, fresh] = boundary.try_emplace( { q, z }, inputs.size() );
    if ( !fresh )
      return { replay( m, inputs ), it->second };
    for ( auto const& i : v )
    {
      auto s = m.step( q, z, i );
      q = s.state;
      z = s.out.output;
      inputs.push_back( i );
    }
  }
}

std::vector<input_action> inputs_of( std::vector<ltl::step> const& trace )
{
  std::vector<input_action> in;
  for ( auto const& s : trace )
    in.push_back( s.in );
  return in;
}

} // namespace

TEST_CASE( "safety violation is a loopless shortest trace" )
{
  auto const m = lamp();
  auto const& a = m.alphabet();
  auto const cex = check( m, cycle( a, { true } ), f( "G out!=B", a ) );
  REQUIRE( cex );
  CHECK_FALSE( cex->loop_start );
  REQUIRE( cex->trace.size() == 3 );
  CHECK( cex->trace[0] == test::elem( a, "R", "1", "A", "" ) );
  CHECK( cex->trace[1] == test::elem( a, "R", "1", "A", "" ) );
  CHECK( cex->trace[2] == test::elem( a, "R", "1", "B", "" ) );
  CHECK( cex->formula == ltl::to_string( *f( "G out!=B", a ), a ) );

  /* same answer without the reachability shortcut, now as a lasso */
  verify_options slow;
  slow.safety_fast_path = false;
  auto const lasso = check( m, cycle( a, { true } ), f( "G out!=B", a ), slow );
  REQUIRE( lasso );
  REQUIRE( lasso->loop_start );
  CHECK_FALSE( ltl::holds_on_lasso( *f( "G out!=B", a ), lasso->trace, *lasso->loop_start ) );
}

TEST_CASE( "liveness violation is a lasso" )
{
  auto const m = lamp();
  auto const& a = m.alphabet();
  auto const cex = check( m, cycle( a, { true, true, false } ), f( "F out=B", a ) );
  REQUIRE( cex );
  REQUIRE( cex->loop_start );
  CHECK( *cex->loop_start == 1 );
  REQUIRE( cex->trace.size() == 4 );
  CHECK( cex->trace[2] == test::elem( a, "R", "0", "A", "" ) );
  CHECK( cex->trace[3] == test::elem( a, "R", "1", "A", "" ) );
  CHECK( ltl::holds_on_lasso( *f( "G out=A", a ), cex->trace, *cex->loop_start ) );

  auto const neg = cex->to_negative();
  CHECK( exhibits( m, neg ) );
}

TEST_CASE( "satisfied properties give no counterexample" )
{
  auto const m = lamp();
  auto const& a = m.alphabet();
  CHECK_FALSE( check( m, cycle( a, { true } ), f( "F out=B", a ) ) );
  CHECK_FALSE( check( m, cycle( a, { true, true, false } ), f( "G out!=B", a ) ) );
  CHECK_FALSE( check( m, plant_model::free( a ), f( "G (out=B -> X out!=A)", a ) ) );
  CHECK( check( m, plant_model::free( a ), f( "X out!=.", a ) ) );
  CHECK( verify( m, plant_model::free( a ), { f( "G out!=B", a ), f( "F out=B", a ), f( "true", a ) } ).size() == 2 );
}

TEST_CASE( "plants that react to controller outputs" )
{
  auto const m = lamp();
  auto const& a = m.alphabet();
  /* emits 1 until it sees A, then 0 forever */
  plant_model p( a, 2, 0,
                 { { 0, epsilon, "", 0, r( true ) }, { 0, 0, "", 1, r( false ) }, { 1, std::nullopt, "", 1, r( false ) } } );
  CHECK( p.observes_events() );
  CHECK( p.responses( 0, { epsilon, {} } ).size() == 1 );
  CHECK( p.responses( 1, { 1, {} } ).size() == 1 );
  CHECK_THROWS_AS( p.responses( 0, { 1, {} } ), plant_deadlock );
  auto const cex = check( m, p, f( "F out=B", a ) );
  REQUIRE( cex );
  CHECK( cex->trace.front() == test::elem( a, "R", "1", "A", "" ) );
  CHECK_FALSE( check( m, p, f( "G out!=B", a ) ) );
  CHECK( check( m, plant_model::free( a ), f( "G out!=B", a ) ) );
}

TEST_CASE( "plant model errors" )
{
  auto const m = lamp();
  auto const& a = m.alphabet();
  CHECK_THROWS_AS( plant_model( a, 1, 1, {} ), std::invalid_argument );
  CHECK_THROWS_AS( plant_model( a, 1, 0, { { 0, std::nullopt, "", 2, r( true ) } } ), std::invalid_argument );
  CHECK_THROWS_AS( plant_model( a, 1, 0, { { 0, std::nullopt, "", 0, { 0, bits{ true, false } } } } ),
                   std::invalid_argument );
  CHECK_THROWS_AS( plant_model( a, 1, 0, { { 0, 5, "", 0, r( true ) } } ), std::invalid_argument );

  /* stops answering once the controller emits B */
  plant_model stuck( a, 1, 0, { { 0, 0, "", 0, r( true ) }, { 0, epsilon, "", 0, r( true ) } } );
  CHECK_THROWS_AS( check( m, stuck, f( "G F out=A", a ) ), plant_deadlock );
}

TEST_CASE( "state cap" )
{
  auto const m = lamp();
  verify_options tiny;
  tiny.state_cap = 2;
  CHECK_THROWS_AS( check( m, plant_model::free( m.alphabet() ), f( "F out=B", m.alphabet() ), tiny ),
                   state_space_exceeded );
}

TEST_CASE( "verifier agrees with the product emptiness oracle" )
{
  auto const a = alphabet::make( { "R", "S" }, { "A", "B" }, 2, 1 );
  auto const free = plant_model::free( a );
  std::mt19937 rng( 17 );
  std::size_t violated = 0;
  for ( int i = 0; i < 200; ++i )
  {
    auto const m = random_machine( rng, a );
    auto const phi = random_formula( rng, a, 2 );
    CAPTURE( ltl::to_string( *phi, a ) );
    auto const expected = nonempty( explore_product( m, free, ltl::to_buchi( ltl::formula::make( ltl::op::negation, phi ) ) ) );
    auto const cex = check( m, free, phi );
    REQUIRE( cex.has_value() == expected );
    if ( cex )
    {
      ++violated;
      CHECK( replay( m, inputs_of( cex->trace ) ) == cex->trace );
      if ( cex->loop_start )
      {
        REQUIRE( *cex->loop_start < cex->trace.size() );
        CHECK_FALSE( ltl::holds_on_lasso( *phi, cex->trace, *cex->loop_start ) );
        CHECK( exhibits( m, cex->to_negative() ) );
      }
      else
      {
        REQUIRE( phi->type == ltl::op::globally );
        CHECK_FALSE( ltl::holds( *phi->lhs, cex->trace.back() ) );
      }
    }
    else
      for ( int j = 0; j < 5; ++j )
      {
        auto const [trace, loop] = random_lasso( rng, m );
        CHECK( ltl::holds_on_lasso( *phi, trace, loop ) );
      }
  }
  /* both outcomes are exercised */
  CHECK( violated > 20 );
  CHECK( violated < 180 );
}

#include "fixtures.hpp"

#include <efsm/cegis.hpp>

#include <doctest.h>

using namespace efsm;

namespace
{

/* two input events, one output event, one input variable */
alphabet toy()
{
  return alphabet::make( { "R", "S" }, { "A" }, 1, 0 );
}

std::vector<scenario> toy_scenarios()
{
  auto const a = toy();
  return { { test::elem( a, "R", "1", "A", "" ) } };
}

std::vector<ltl::formula_ptr> spec( std::string_view text, alphabet const& a )
{
  return { ltl::parse( text, a ) };
}

void check_run( cegis_result const& r, alphabet const& a, std::vector<scenario> const& pos,
                std::vector<ltl::formula_ptr> const& phi, plant_model const& plant )
{
  REQUIRE( r.found() );
  CHECK( test::satisfies_all( *r.machine, pos ) );
  CHECK( verify( *r.machine, plant, phi ).empty() );
  CHECK( r.candidates.back() == *r.machine );
  /* no candidate reproduces a counterexample found before it */
  std::size_t seen = 0;
  for ( std::size_t i = 0; i < r.candidates.size(); ++i )
  {
    for ( std::size_t j = 0; j < seen; ++j )
      CHECK_FALSE( exhibits( r.candidates[i], r.negatives[j] ) );
    /* iterations that produced a candidate are the SAT ones */
    std::size_t k = 0, sat_seen = 0;
    for ( ; k < r.iterations.size(); ++k )
      if ( r.iterations[k].verdict == sat::verdict::sat && sat_seen++ == i )
        break;
    REQUIRE( k < r.iterations.size() );
    seen += r.iterations[k].counterexamples;
  }
  (void)a;
}

} // namespace

TEST_CASE( "complete with negative scenarios" )
{
  auto const a = test::example_alphabet();
  auto const pos = test::example_scenarios();

  negative_scenario no_a_on_11{ { test::elem( a, "R", "11", "A", "0" ) }, std::nullopt };
  auto const r = complete( a, pos, { no_a_on_11 }, 2, 3 );
  REQUIRE( r.found() );
  CHECK( test::satisfies_all( *r.machine, pos ) );
  CHECK_FALSE( exhibits( *r.machine, no_a_on_11 ) );

  /* excluding a prefix of a positive scenario is contradictory */
  negative_scenario prefix{ { pos[1][0], pos[1][1] }, std::nullopt };
  CHECK_FALSE( complete( a, pos, { prefix }, 3, 3 ).found() );
}

TEST_CASE( "complete_cegis reaches a verified machine" )
{
  auto const a = test::example_alphabet();
  auto const pos = test::example_scenarios();
  auto const phi = spec( "G (x1 & x2 -> out=.)", a );
  auto const plant = plant_model::free( a );

  std::size_t calls = 0;
  cegis_options opts;
  opts.on_iteration = [&]( cegis_iteration const& ) { ++calls; };
  /* guards must reject 11, e.g. x1 & !x2, which takes four nodes */
  auto const r = complete_cegis( a, pos, phi, plant, 2, 4, std::nullopt, opts );
  check_run( r, a, pos, phi, plant );
  CHECK( calls == r.iterations.size() );
  CHECK( r.iterations.back().counterexamples == 0 );
  CHECK( r.iterations.back().verdict == sat::verdict::sat );
  CHECK( to_string( r.iterations.back() ).find( "iteration" ) == 0 );
}

TEST_CASE( "star variants raise the guard bound only as needed" )
{
  auto const a = toy();
  auto const pos = toy_scenarios();
  auto const phi = spec( "G (in=S & x1 -> out=A)", a );
  auto const plant = plant_model::free( a );

  auto const r = complete_star_min_cegis( a, pos, phi, plant );
  REQUIRE( r.start );
  CHECK( r.start->C == 1 );
  CHECK( r.start->N == 1 );
  check_run( r, a, pos, phi, plant );
  REQUIRE( r.N_bound );
  CHECK( *r.N_bound == 2 );
  CHECK( r.machine->transition_count() == 2 );
  CHECK( r.machine->guard_complexity() == 2 );

  auto const s = complete_star_cegis( a, pos, phi, plant );
  check_run( s, a, pos, phi, plant );
  CHECK_FALSE( s.N_bound );
}

TEST_CASE( "N ceiling below the vacuous bound" )
{
  auto const a = toy();
  cegis_options opts;
  opts.n_ceiling = 1;
  CHECK_THROWS_AS( complete_star_min_cegis( a, toy_scenarios(), spec( "G (in=S & x1 -> out=A)", a ),
                                            plant_model::free( a ), opts ),
                   n_bound_exceeded );
}

TEST_CASE( "contradictory specification ends UNSAT" )
{
  auto const a = toy();
  auto const phi = spec( "G out!=A", a );
  auto const plant = plant_model::free( a );
  auto const r = complete_star_min_cegis( a, toy_scenarios(), phi, plant );
  CHECK_FALSE( r.found() );
  REQUIRE_FALSE( r.iterations.empty() );
  CHECK( r.iterations.back().verdict == sat::verdict::unsat );
  CHECK_FALSE( r.negatives.empty() );

  auto const c = complete_cegis( a, toy_scenarios(), phi, plant, 2, 2 );
  CHECK_FALSE( c.found() );
}

TEST_CASE( "iteration cap" )
{
  auto const a = toy();
  cegis_options opts;
  opts.max_iterations = 1;
  CHECK_THROWS_AS( complete_cegis( a, toy_scenarios(), spec( "G out!=A", a ), plant_model::free( a ), 1, 1,
                                   std::nullopt, opts ),
                   iteration_cap_exceeded );
}

TEST_CASE( "CEGIS agrees across backends" )
{
  auto const a = toy();
  cegis_options dimacs;
  dimacs.synth.factory = sat::dimacs_factory( { EFSM_CADICAL_CLI, {}, false } );
  auto const phi = spec( "G (in=S & x1 -> out=A)", a );
  auto const x = complete_star_min_cegis( a, toy_scenarios(), phi, plant_model::free( a ) );
  auto const y = complete_star_min_cegis( a, toy_scenarios(), phi, plant_model::free( a ), dimacs );
  REQUIRE( x.found() );
  REQUIRE( y.found() );
  CHECK( *x.N_bound == *y.N_bound );
  CHECK( x.machine->guard_complexity() == y.machine->guard_complexity() );
}

#include <efsm/cardinality.hpp>
#include <efsm/sat.hpp>

#include <doctest.h>

#include <random>
#include <sstream>

using namespace efsm;
using sat::lit;

namespace
{

std::vector<std::unique_ptr<sat::solver>> both_backends()
{
  std::vector<std::unique_ptr<sat::solver>> v;
  v.push_back( sat::make_incremental_solver() );
  v.push_back( sat::make_dimacs_solver( { EFSM_CADICAL_CLI, {}, false } ) );
  return v;
}

} // namespace

TEST_CASE( "solver decides small formulas on both backends" )
{
  for ( auto& s : both_backends() )
  {
    auto a = lit::pos( s->new_variable() );
    auto b = lit::pos( s->new_variable() );
    s->add_clause( { a, b } );
    s->add_clause( { ~a, b } );
    auto r = s->solve();
    REQUIRE( r.is_sat() );
    CHECK( r.value( b ) );

    CHECK( s->solve( { ~b } ).is_unsat() );
    /* assumptions are not persisted */
    CHECK( s->solve().is_sat() );

    s->add_clause( { ~b } );
    CHECK( s->solve().is_unsat() );
    CHECK( s->num_solve_calls() == 4 );
  }
}

TEST_CASE( "empty clause and unallocated variables" )
{
  auto s = sat::make_incremental_solver();
  CHECK_THROWS_AS( s->add_clause( { lit::pos( 3 ) } ), sat::backend_error );
  s->add_clause( std::span<lit const>{} );
  CHECK( s->solve().is_unsat() );
  s->reset();
  CHECK( s->num_variables() == 0 );
  CHECK( s->solve().is_sat() );
}

TEST_CASE( "reset discards clauses" )
{
  for ( auto& s : both_backends() )
  {
    auto a = lit::pos( s->new_variable() );
    s->add_clause( { a } );
    s->add_clause( { ~a } );
    CHECK( s->solve().is_unsat() );
    s->reset();
    auto b = lit::pos( s->new_variable() );
    s->add_clause( { b } );
    CHECK( s->solve().is_sat() );
  }
}

TEST_CASE( "missing external solver is a backend error" )
{
  auto s = sat::make_dimacs_solver( { "/nonexistent/solver-binary", {}, false } );
  s->add_clause( { lit::pos( s->new_variable() ) } );
  CHECK_THROWS_AS( s->solve(), sat::backend_error );
}

TEST_CASE( "external solver can read standard input" )
{
  auto s = sat::make_dimacs_solver( { EFSM_CADICAL_CLI, {}, true } );
  auto a = lit::pos( s->new_variable() );
  s->add_clause( { ~a } );
  auto r = s->solve();
  REQUIRE( r.is_sat() );
  CHECK_FALSE( r.value( a ) );
}

TEST_CASE( "timeout yields unknown" )
{
  /* pigeonhole 11 into 10 is hard enough for a 1 ms budget */
  auto s = sat::make_incremental_solver();
  int const holes = 10, pigeons = 11;
  std::vector<std::vector<lit>> p( pigeons );
  for ( auto& row : p )
    for ( int h = 0; h < holes; ++h )
      row.push_back( lit::pos( s->new_variable() ) );
  for ( auto& row : p )
    s->add_clause( row );
  for ( int h = 0; h < holes; ++h )
    for ( int i = 0; i < pigeons; ++i )
      for ( int j = i + 1; j < pigeons; ++j )
        s->add_clause( { ~p[i][h], ~p[j][h] } );
  s->set_timeout( std::chrono::milliseconds( 1 ) );
  auto r = s->solve();
  CHECK( r.status == sat::verdict::unknown );
  CHECK( r.reason == "timeout" );
}

TEST_CASE( "dimacs dump carries a variable map" )
{
  auto s = sat::make_incremental_solver();
  s->keep_clause_log( true );
  auto a = lit::pos( s->new_variable() );
  s->add_clause( { a, ~a } );
  std::ostringstream os;
  s->write_dimacs( os, []( int v ) { return "x" + std::to_string( v ); } );
  CHECK( os.str() == "c var 1 x1\np cnf 1 1\n1 -1 0\n" );
}

TEST_CASE( "totalizer counts exactly" )
{
  auto s = sat::make_incremental_solver();
  std::vector<lit> in;
  for ( int i = 0; i < 4; ++i )
    in.push_back( lit::pos( s->new_variable() ) );
  totalizer t( *s, in );
  auto r = s->solve( { in[0], ~in[1], in[2], in[3] } );
  REQUIRE( r.is_sat() );
  CHECK( r.value( t.output( 1 ) ) );
  CHECK( r.value( t.output( 2 ) ) );
  CHECK( r.value( t.output( 3 ) ) );
  CHECK_FALSE( r.value( t.output( 4 ) ) );
  CHECK( s->solve( { in[0], in[2], in[3], *t.at_most( 2 ) } ).is_unsat() );
  CHECK_FALSE( t.at_most( 4 ).has_value() );
}

TEST_CASE( "totalizer matches popcount on random vectors" )
{
  std::mt19937 rng( 7 );
  for ( int round = 0; round < 60; ++round )
  {
    auto s = sat::make_incremental_solver();
    std::size_t const n = 1 + rng() % 40;
    std::vector<lit> in;
    for ( std::size_t i = 0; i < n; ++i )
      in.push_back( lit::pos( s->new_variable() ) );
    totalizer t( *s, in );
    std::vector<lit> assume;
    std::size_t pop = 0;
    for ( auto l : in )
    {
      bool const v = rng() % 2;
      pop += v;
      assume.push_back( v ? l : ~l );
    }
    auto r = s->solve( assume );
    REQUIRE( r.is_sat() );
    for ( std::size_t i = 1; i <= n; ++i )
      CHECK( r.value( t.output( i ) ) == ( i <= pop ) );
    std::size_t const k = rng() % ( n + 1 );
    auto with_bound = assume;
    if ( auto b = t.at_most( k ) )
      with_bound.push_back( *b );
    CHECK( s->solve( with_bound ).is_sat() == ( pop <= k ) );
  }
}

TEST_CASE( "capped totalizer still bounds" )
{
  auto s = sat::make_incremental_solver();
  std::vector<lit> in;
  for ( int i = 0; i < 10; ++i )
    in.push_back( lit::pos( s->new_variable() ) );
  totalizer t( *s, in, 4 );
  CHECK( t.num_outputs() == 4 );
  CHECK( s->solve( { in[0], in[1], in[2], in[5], *t.at_most( 3 ) } ).is_unsat() );
  CHECK( s->solve( { in[0], in[1], in[2], *t.at_most( 3 ) } ).is_sat() );
  CHECK_THROWS_AS( (void)t.at_most( 5 ), std::logic_error );
}

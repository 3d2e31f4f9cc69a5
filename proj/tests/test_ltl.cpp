#include "fixtures.hpp"

#include <efsm/buchi.hpp>
#include <efsm/ltl.hpp>

#include <doctest.h>

#include <random>

using namespace efsm;
using namespace efsm::ltl;

namespace
{

alphabet abc()
{
  return alphabet::make( { "R", "S" }, { "A", "B" }, 2, 1 );
}

formula_ptr p( std::string_view text )
{
  return parse( text, abc() );
}

/* unrolled semantics: position i of the lasso maps back into the cycle;
   until looks n positions ahead, which covers every distinct suffix */
struct unrolled
{
  std::vector<step> const& trace;
  std::size_t loop;

  std::size_t pos( std::size_t i ) const
  {
    auto const n = trace.size();
    return i < n ? i : loop + ( i - loop ) % ( n - loop );
  }

  bool until( formula const& l, formula const& r, std::size_t i ) const
  {
    for ( std::size_t j = i; j <= i + trace.size(); ++j )
    {
      if ( at( r, j ) )
        return true;
      if ( !at( l, j ) )
        return false;
    }
    return false;
  }

  bool at( formula const& f, std::size_t i ) const
  {
    i = pos( i );
    auto top = formula{ op::top, {}, nullptr, nullptr };
    switch ( f.type )
    {
    case op::top:
      return true;
    case op::bottom:
      return false;
    case op::prop:
      return holds( f.a, trace[i] );
    case op::negation:
      return !at( *f.lhs, i );
    case op::conjunction:
      return at( *f.lhs, i ) && at( *f.rhs, i );
    case op::disjunction:
      return at( *f.lhs, i ) || at( *f.rhs, i );
    case op::implication:
      return !at( *f.lhs, i ) || at( *f.rhs, i );
    case op::next:
      return at( *f.lhs, i + 1 );
    case op::until:
      return until( *f.lhs, *f.rhs, i );
    case op::release:
    {
      /* not (not l U not r) */
      for ( std::size_t j = i; j <= i + trace.size(); ++j )
      {
        if ( !at( *f.rhs, j ) )
          return false;
        if ( at( *f.lhs, j ) )
          return true;
      }
      return true;
    }
    case op::globally:
      return !until( top, formula{ op::negation, {}, f.lhs, nullptr }, i );
    case op::finally:
      return until( top, *f.lhs, i );
    }
    return false;
  }
};

formula_ptr random_formula( std::mt19937& rng, std::size_t d )
{
  std::uniform_int_distribution<int> pick( 0, d == 0 ? 1 : 11 );
  auto const k = pick( rng );
  auto leaf = [&]( int which ) {
    /* two atoms: x1 and out=A */
    return which == 0 ? formula::make_atom( { atom::kind::in_var, 0 } )
                      : formula::make_atom( { atom::kind::out_event, 0 } );
  };
  switch ( k )
  {
  case 0:
  case 1:
    return leaf( k );
  case 2:
    return formula::make( op::negation, random_formula( rng, d - 1 ) );
  case 3:
    return formula::make( op::conjunction, random_formula( rng, d - 1 ), random_formula( rng, d - 1 ) );
  case 4:
    return formula::make( op::disjunction, random_formula( rng, d - 1 ), random_formula( rng, d - 1 ) );
  case 5:
    return formula::make( op::implication, random_formula( rng, d - 1 ), random_formula( rng, d - 1 ) );
  case 6:
    return formula::make( op::next, random_formula( rng, d - 1 ) );
  case 7:
    return formula::make( op::until, random_formula( rng, d - 1 ), random_formula( rng, d - 1 ) );
  case 8:
    return formula::make( op::release, random_formula( rng, d - 1 ), random_formula( rng, d - 1 ) );
  case 9:
    return formula::make( op::globally, random_formula( rng, d - 1 ) );
  case 10:
    return formula::make( op::finally, random_formula( rng, d - 1 ) );
  default:
    return leaf( static_cast<int>( rng() % 2 ) );
  }
}

std::vector<step> random_trace( std::mt19937& rng, std::size_t n )
{
  auto const a = abc();
  std::vector<step> t;
  for ( std::size_t i = 0; i < n; ++i )
    t.push_back( test::elem( a, "R", rng() % 2 ? "10" : "00", rng() % 2 ? "A" : "B", "0" ) );
  return t;
}

bool has_sugar( formula const& f )
{
  if ( f.type == op::globally || f.type == op::finally || f.type == op::implication )
    return true;
  if ( f.type == op::negation && f.lhs->type != op::prop )
    return true;
  return ( f.lhs && has_sugar( *f.lhs ) ) || ( f.rhs && has_sugar( *f.rhs ) );
}

} // namespace

TEST_CASE( "parser precedence and associativity" )
{
  CHECK( *p( "x1 -> x2 -> z1" ) == *p( "x1 -> (x2 -> z1)" ) );
  CHECK( *p( "!x1 & x2 | z1" ) == *p( "((!x1) & x2) | z1" ) );
  CHECK( *p( "x1 U x2 U z1" ) == *p( "x1 U (x2 U z1)" ) );
  CHECK( *p( "x1 & x2 U z1" ) == *p( "x1 & (x2 U z1)" ) );
  CHECK( *p( "G F out=A" ) == *p( "G (F (out=A))" ) );
  CHECK( *p( "~x1" ) == *p( "!x1" ) );
  CHECK( p( "X x1" )->type == op::next );
  CHECK( p( "true" )->type == op::top );
  CHECK( p( "false" )->type == op::bottom );

  auto const e = p( "out=." );
  REQUIRE( e->type == op::prop );
  CHECK( e->a == atom{ atom::kind::out_event, epsilon } );
  CHECK( *p( "out!=B" ) == *formula::make( op::negation, formula::make_atom( { atom::kind::out_event, 1 } ) ) );
  CHECK( *p( "in=S" ) == *formula::make_atom( { atom::kind::in_event, 1 } ) );
  CHECK( *p( "z1" ) == *formula::make_atom( { atom::kind::out_var, 0 } ) );
}

TEST_CASE( "parser errors carry a position" )
{
  for ( auto const* bad : { "x1 &", "(x1", "out=C", "x3", "x1 x2", "", "G", "in=" } )
  {
    CAPTURE( bad );
    CHECK_THROWS_AS( p( bad ), syntax_error );
  }
  try
  {
    p( "x1 & & x2" );
    FAIL( "expected syntax_error" );
  }
  catch ( syntax_error const& e )
  {
    CHECK( e.position() == 5 );
  }
}

TEST_CASE( "printing round trips" )
{
  std::mt19937 rng( 7 );
  for ( int i = 0; i < 200; ++i )
  {
    auto const f = random_formula( rng, 3 );
    auto const s = to_string( *f, abc() );
    CAPTURE( s );
    CHECK( *parse( s, abc() ) == *f );
  }
}

TEST_CASE( "propositional classification" )
{
  CHECK( is_propositional( *p( "x1 & !out=A -> z1" ) ) );
  CHECK_FALSE( is_propositional( *p( "x1 & X z1" ) ) );
  CHECK( depth( *p( "x1" ) ) == 0 );
  CHECK( depth( *p( "G (x1 -> F z1)" ) ) == 3 );
}

TEST_CASE( "atoms on a step" )
{
  auto const a = abc();
  auto const s = test::elem( a, "S", "01", "B", "1" );
  CHECK( holds( *p( "in=S" ), s ) );
  CHECK_FALSE( holds( *p( "in=R" ), s ) );
  CHECK( holds( *p( "in!=R & out=B & !out=. & x2 & !x1 & z1" ), s ) );
  auto const q = test::elem( a, "R", "00", ".", "0" );
  CHECK( holds( *p( "out=. & out!=A & out!=B" ), q ) );
}

TEST_CASE( "lasso semantics on hand-made words" )
{
  auto const a = abc();
  auto const off = test::elem( a, "R", "00", "A", "0" );
  auto const on = test::elem( a, "R", "10", "A", "0" );
  std::vector<step> alt{ off, on };
  CHECK( holds_on_lasso( *p( "G F x1" ), alt, 0 ) );
  CHECK_FALSE( holds_on_lasso( *p( "F G x1" ), alt, 0 ) );
  CHECK( holds_on_lasso( *p( "F G x1" ), alt, 1 ) );
  CHECK( holds_on_lasso( *p( "X x1" ), alt, 0 ) );
  CHECK_FALSE( holds_on_lasso( *p( "x1" ), alt, 0 ) );
  CHECK( holds_on_lasso( *p( "!x1 U x1" ), alt, 0 ) );
  CHECK_FALSE( holds_on_lasso( *p( "G !x1" ), std::vector<step>{ off, off, on }, 2 ) );
  CHECK( holds_on_lasso( *p( "false R !x1" ), std::vector<step>{ off, off }, 1 ) );
}

TEST_CASE( "negation normal form keeps the meaning" )
{
  std::mt19937 rng( 11 );
  for ( int i = 0; i < 300; ++i )
  {
    auto const f = random_formula( rng, 3 );
    auto const g = nnf( f );
    CAPTURE( to_string( *f, abc() ) );
    CHECK_FALSE( has_sugar( *g ) );
    auto const n = 1 + rng() % 4;
    auto const t = random_trace( rng, n );
    auto const loop = rng() % n;
    CHECK( holds_on_lasso( *g, t, loop ) == holds_on_lasso( *f, t, loop ) );
  }
}

TEST_CASE( "lasso evaluator agrees with unrolled semantics" )
{
  std::mt19937 rng( 3 );
  for ( int i = 0; i < 1000; ++i )
  {
    auto const f = random_formula( rng, 3 );
    auto const n = 1 + rng() % 4;
    auto const t = random_trace( rng, n );
    auto const loop = rng() % n;
    CAPTURE( to_string( *f, abc() ) );
    CHECK( holds_on_lasso( *f, t, loop ) == unrolled{ t, loop }.at( *f, 0 ) );
  }
}

TEST_CASE( "Büchi automata accept exactly the satisfying lassos" )
{
  std::mt19937 rng( 5 );
  for ( int i = 0; i < 300; ++i )
  {
    auto const f = random_formula( rng, 3 );
    auto const b = to_buchi( f );
    CAPTURE( to_string( *f, abc() ) );
    for ( int j = 0; j < 8; ++j )
    {
      auto const n = 1 + rng() % 4;
      auto const t = random_trace( rng, n );
      auto const loop = rng() % n;
      CHECK( b.accepts_lasso( t, loop ) == unrolled{ t, loop }.at( *f, 0 ) );
    }
  }
}

TEST_CASE( "Büchi automaton for a contradiction is empty" )
{
  auto const b = to_buchi( p( "x1 & !x1" ) );
  CHECK( b.states[0].successors.empty() );
  auto const g = to_buchi( p( "G F x1 & F G !x1" ) );
  auto const a = abc();
  std::vector<step> t{ test::elem( a, "R", "00", "A", "0" ), test::elem( a, "R", "10", "A", "0" ) };
  CHECK_FALSE( g.accepts_lasso( t, 0 ) );
  CHECK_FALSE( g.accepts_lasso( t, 1 ) );
}

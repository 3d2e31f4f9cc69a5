#include <efsm/cardinality.hpp>

#include <algorithm>
#include <stdexcept>

namespace efsm
{

totalizer::totalizer( sat::solver& solver, std::vector<sat::lit> inputs, std::size_t cap )
    : solver_( solver ), num_inputs_( inputs.size() ), cap_( std::max<std::size_t>( cap, 1 ) )
{
  outputs_ = build( inputs );
  for ( std::size_t i = 1; i < outputs_.size(); ++i )
    solver_.add_clause( { ~outputs_[i], outputs_[i - 1] } );
}

std::vector<sat::lit> totalizer::build( std::span<sat::lit const> inputs )
{
  if ( inputs.size() <= 1 )
    return { inputs.begin(), inputs.end() };

  auto const mid = inputs.size() / 2;
  auto const a = build( inputs.first( mid ) );
  auto const b = build( inputs.subspan( mid ) );
  auto const m = std::min( a.size() + b.size(), cap_ );

  std::vector<sat::lit> r( m );
  for ( auto& l : r )
    l = sat::lit::pos( solver_.new_variable() );

  /* 1-based access; index 0 is the constant-true "at least 0" */
  auto const na = a.size();
  auto const nb = b.size();

  /* a_i & b_j -> r_{min(i+j, m)} */
  for ( std::size_t i = 0; i <= na; ++i )
    for ( std::size_t j = 0; j <= nb; ++j )
    {
      if ( i + j == 0 )
        continue;
      auto const k = std::min( i + j, m );
      std::vector<sat::lit> c;
      if ( i > 0 )
        c.push_back( ~a[i - 1] );
      if ( j > 0 )
        c.push_back( ~b[j - 1] );
      c.push_back( r[k - 1] );
      solver_.add_clause( c );
    }

  /* r_{i+j+1} -> a_{i+1} | b_{j+1} */
  for ( std::size_t i = 0; i <= na; ++i )
    for ( std::size_t j = 0; j <= nb; ++j )
    {
      auto const k = i + j + 1;
      if ( k > m )
        continue;
      std::vector<sat::lit> c{ ~r[k - 1] };
      if ( i < na )
        c.push_back( a[i] );
      if ( j < nb )
        c.push_back( b[j] );
      solver_.add_clause( c );
    }
  return r;
}

std::optional<sat::lit> totalizer::at_most( std::size_t n ) const
{
  if ( n >= num_inputs_ )
    return std::nullopt;
  if ( n >= outputs_.size() )
    throw std::logic_error( "totalizer cap too small for the requested bound" );
  return ~outputs_[n];
}

void totalizer::bound( std::size_t n )
{
  if ( auto l = at_most( n ) )
    solver_.add_clause( { *l } );
}

} // namespace efsm

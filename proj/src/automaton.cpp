#include <efsm/automaton.hpp>

#include <algorithm>
#include <set>

namespace efsm
{

std::string to_string( bits const& b )
{
  std::string s;
  s.reserve( b.size() );
  for ( bool v : b )
    s.push_back( v ? '1' : '0' );
  return s;
}

bits bits_from_string( std::string_view s )
{
  bits b;
  b.reserve( s.size() );
  for ( char c : s )
  {
    if ( c != '0' && c != '1' )
      throw structural_error( "invalid bit character '" + std::string( 1, c ) + "'" );
    b.push_back( c == '1' );
  }
  return b;
}

bits zero_bits( std::size_t n )
{
  return bits( n, false );
}

/* alphabet */

namespace
{

std::optional<event_id> find_name( std::vector<std::string> const& names, std::string_view name )
{
  auto it = std::find( names.begin(), names.end(), name );
  if ( it == names.end() )
    return std::nullopt;
  return static_cast<event_id>( it - names.begin() );
}

void check_unique( std::vector<std::string> const& names, char const* what )
{
  std::set<std::string_view> seen;
  for ( auto const& n : names )
  {
    if ( n.empty() || n == "." || n == "*" )
      throw structural_error( std::string( "reserved or empty name in " ) + what );
    if ( !seen.insert( n ).second )
      throw structural_error( std::string( "duplicate name '" ) + n + "' in " + what );
  }
}

} // namespace

std::optional<event_id> alphabet::find_input_event( std::string_view name ) const
{
  return find_name( input_events, name );
}

std::optional<event_id> alphabet::find_output_event( std::string_view name ) const
{
  return find_name( output_events, name );
}

std::string alphabet::output_event_name( event_id e ) const
{
  if ( e == epsilon )
    return ".";
  return output_events.at( static_cast<std::size_t>( e ) );
}

void alphabet::validate() const
{
  check_unique( input_events, "input events" );
  check_unique( output_events, "output events" );
  check_unique( input_vars, "input variables" );
  check_unique( output_vars, "output variables" );
  if ( input_events.empty() )
    throw structural_error( "no input events declared" );
  if ( input_vars.empty() || output_vars.empty() )
    throw structural_error( "input and output variable sets must be nonempty" );
}

alphabet alphabet::make( std::vector<std::string> input_events, std::vector<std::string> output_events,
                         std::size_t num_input_vars, std::size_t num_output_vars )
{
  alphabet a;
  a.input_events = std::move( input_events );
  a.output_events = std::move( output_events );
  for ( std::size_t i = 1; i <= num_input_vars; ++i )
    a.input_vars.push_back( "x" + std::to_string( i ) );
  for ( std::size_t i = 1; i <= num_output_vars; ++i )
    a.output_vars.push_back( "z" + std::to_string( i ) );
  return a;
}

/* guard_expr */

guard_expr guard_expr::terminal( std::uint32_t var )
{
  return guard_expr( { node{ kind::terminal, var, 0, 0 } } );
}

guard_expr guard_expr::combine( kind k, guard_expr const& lhs, guard_expr const* rhs )
{
  std::vector<node> nodes;
  nodes.reserve( 1 + lhs.size() + ( rhs ? rhs->size() : 0 ) );
  nodes.push_back( node{ k, 0, 1, 0 } );

  auto append = [&nodes]( guard_expr const& g ) {
    auto const offset = static_cast<std::uint32_t>( nodes.size() );
    for ( auto n : g.nodes_ )
    {
      if ( n.type != kind::terminal )
      {
        n.left += offset;
        if ( n.type != kind::negation )
          n.right += offset;
      }
      nodes.push_back( n );
    }
    return offset;
  };

  nodes[0].left = append( lhs );
  if ( rhs )
    nodes[0].right = append( *rhs );
  return guard_expr( std::move( nodes ) );
}

guard_expr guard_expr::negate( guard_expr const& operand )
{
  return combine( kind::negation, operand, nullptr );
}

guard_expr guard_expr::conjoin( guard_expr const& lhs, guard_expr const& rhs )
{
  return combine( kind::conjunction, lhs, &rhs );
}

guard_expr guard_expr::disjoin( guard_expr const& lhs, guard_expr const& rhs )
{
  return combine( kind::disjunction, lhs, &rhs );
}

bool guard_expr::eval_at( std::uint32_t i, bits const& input ) const
{
  auto const& n = nodes_[i];
  switch ( n.type )
  {
  case kind::terminal:
    if ( n.var >= input.size() )
      throw structural_error( "guard terminal x" + std::to_string( n.var + 1 ) + " out of range" );
    return input[n.var];
  case kind::negation:
    return !eval_at( n.left, input );
  case kind::conjunction:
    return eval_at( n.left, input ) && eval_at( n.right, input );
  case kind::disjunction:
    return eval_at( n.left, input ) || eval_at( n.right, input );
  }
  return false;
}

bool guard_expr::eval( bits const& input ) const
{
  return eval_at( 0, input );
}

std::size_t guard_expr::arity() const
{
  std::size_t a = 0;
  for ( auto const& n : nodes_ )
    if ( n.type == kind::terminal )
      a = std::max<std::size_t>( a, n.var + 1 );
  return a;
}

bool guard_expr::equal_at( std::uint32_t i, guard_expr const& other, std::uint32_t j ) const
{
  auto const& a = nodes_[i];
  auto const& b = other.nodes_[j];
  if ( a.type != b.type )
    return false;
  switch ( a.type )
  {
  case kind::terminal:
    return a.var == b.var;
  case kind::negation:
    return equal_at( a.left, other, b.left );
  default:
    return equal_at( a.left, other, b.left ) && equal_at( a.right, other, b.right );
  }
}

bool guard_expr::operator==( guard_expr const& other ) const
{
  return size() == other.size() && equal_at( 0, other, 0 );
}

/* automaton */

automaton::automaton( efsm::alphabet alpha, std::vector<state> states )
    : alphabet_( std::move( alpha ) ), states_( std::move( states ) )
{
  validate();
}

void automaton::validate() const
{
  if ( states_.empty() )
    throw structural_error( "automaton has no states" );
  auto const nx = alphabet_.num_input_vars();
  auto const nz = alphabet_.num_output_vars();
  for ( auto const& s : states_ )
  {
    if ( s.output_event != epsilon &&
         ( s.output_event < 0 || static_cast<std::size_t>( s.output_event ) >= alphabet_.output_events.size() ) )
      throw structural_error( "state output event out of range" );
    if ( s.algorithm.size() != nz )
      throw structural_error( "state algorithm size differs from number of output variables" );
    for ( auto const& t : s.transitions )
    {
      if ( t.dest >= states_.size() )
        throw structural_error( "transition destination out of range" );
      if ( t.input_event < 0 || static_cast<std::size_t>( t.input_event ) >= alphabet_.input_events.size() )
        throw structural_error( "transition input event out of range" );
      if ( t.guard.arity() > nx )
        throw structural_error( "guard refers to an undeclared input variable" );
    }
  }
}

step_result automaton::step( std::size_t current, bits const& outputs, input_action const& action ) const
{
  auto const& s = states_.at( current );
  for ( auto const& t : s.transitions )
  {
    if ( t.input_event != action.event || !t.guard.eval( action.input ) )
      continue;
    auto const& target = states_[t.dest];
    bits next( outputs.size() );
    for ( std::size_t z = 0; z < outputs.size(); ++z )
      next[z] = target.algorithm[z].apply( outputs[z] );
    return { t.dest, { target.output_event, std::move( next ) } };
  }
  return { current, { epsilon, outputs } };
}

std::size_t automaton::matching_prefix( scenario const& s ) const
{
  std::size_t q = 0;
  bits z = zero_bits( alphabet_.num_output_vars() );
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    auto r = step( q, z, s[i].in );
    if ( r.out != s[i].out )
      return i;
    q = r.state;
    z = std::move( r.out.output );
  }
  return s.size();
}

bool automaton::satisfies( scenario const& s ) const
{
  return matching_prefix( s ) == s.size();
}

std::size_t automaton::transition_count() const
{
  std::size_t t = 0;
  for ( auto const& s : states_ )
    t += s.transitions.size();
  return t;
}

std::size_t automaton::guard_complexity() const
{
  std::size_t n = 0;
  for ( auto const& s : states_ )
    for ( auto const& t : s.transitions )
      n += t.guard.size();
  return n;
}

} // namespace efsm

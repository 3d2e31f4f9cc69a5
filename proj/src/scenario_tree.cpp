#include <efsm/scenario_tree.hpp>

#include <tuple>

namespace efsm
{

bool scenario_tree::child_key::operator<( child_key const& other ) const
{
  if ( in != other.in )
    return in < other.in;
  if ( out.has_value() != other.out.has_value() )
    return !out.has_value();
  if ( !out )
    return false;
  return std::tie( out->event, out->output ) < std::tie( other.out->event, other.out->output );
}

scenario_tree::scenario_tree( efsm::alphabet alpha ) : alphabet_( std::move( alpha ) )
{
  tree_node r;
  r.id = root;
  r.out = { epsilon, zero_bits( alphabet_.num_output_vars() ) };
  nodes_.push_back( std::move( r ) );
  children_.emplace_back();
}

scenario_tree::child_key scenario_tree::key_of( scenario_element const& e ) const
{
  child_key k{ e.in, std::nullopt };
  if ( key_includes_output_ )
    k.out = e.out;
  return k;
}

void scenario_tree::check_element( scenario_element const& e ) const
{
  if ( e.in.event < 0 || static_cast<std::size_t>( e.in.event ) >= alphabet_.input_events.size() )
    throw scenario_error( "input event out of range" );
  if ( e.out.event != epsilon &&
       ( e.out.event < 0 || static_cast<std::size_t>( e.out.event ) >= alphabet_.output_events.size() ) )
    throw scenario_error( "output event out of range" );
  if ( e.in.input.size() != alphabet_.num_input_vars() )
    throw scenario_error( "input vector has wrong length" );
  if ( e.out.output.size() != alphabet_.num_output_vars() )
    throw scenario_error( "output vector has wrong length" );
}

std::optional<std::size_t> scenario_tree::find_child( std::size_t parent, scenario_element const& e ) const
{
  auto const& ch = children_[parent];
  auto it = ch.find( key_of( e ) );
  if ( it == ch.end() )
    return std::nullopt;
  return it->second;
}

std::size_t scenario_tree::add_node( std::size_t parent, scenario_element const& e )
{
  tree_node n;
  n.id = nodes_.size();
  n.parent = parent;
  n.in = e.in;
  n.out = e.out;
  children_[parent].emplace( key_of( e ), n.id );
  inputs_.insert( e.in.input );
  nodes_.push_back( std::move( n ) );
  children_.emplace_back();
  return nodes_.back().id;
}

std::size_t scenario_tree::count_active() const
{
  std::size_t n = 0;
  for ( auto const& v : nodes_ )
    n += v.is_active();
  return n;
}

std::size_t scenario_tree::count_passive() const
{
  std::size_t n = 0;
  for ( auto const& v : nodes_ )
    n += v.is_passive();
  return n;
}

bool scenario_tree::replay_check( std::vector<scenario> const& scenarios ) const
{
  for ( auto const& s : scenarios )
  {
    std::size_t v = root;
    for ( auto const& e : s )
    {
      auto c = find_child( v, e );
      if ( !c || nodes_[*c].out != e.out )
        return false;
      v = *c;
    }
  }
  return true;
}

/* positive_tree */

positive_tree positive_tree::build( efsm::alphabet alpha, std::vector<scenario> const& scenarios )
{
  if ( scenarios.empty() )
    throw scenario_error( "no positive scenarios given" );
  positive_tree t( std::move( alpha ) );
  for ( std::size_t si = 0; si < scenarios.size(); ++si )
  {
    std::size_t v = root;
    for ( std::size_t i = 0; i < scenarios[si].size(); ++i )
    {
      auto const& e = scenarios[si][i];
      t.check_element( e );
      if ( e.out.event == epsilon && e.out.output != t.node( v ).out.output )
        throw scenario_error( "scenario " + std::to_string( si + 1 ) + ", element " + std::to_string( i + 1 ) +
                              ": empty output event but output values changed" );
      if ( auto c = t.find_child( v, e ) )
      {
        if ( t.node( *c ).out != e.out )
          throw output_conflict( "scenario " + std::to_string( si + 1 ) + ", element " + std::to_string( i + 1 ) +
                                 ": output differs from an earlier scenario with the same input prefix" );
        v = *c;
      }
      else
        v = t.add_node( v, e );
    }
  }
  return t;
}

/* negative_tree */

negative_tree::negative_tree( efsm::alphabet alpha ) : scenario_tree( std::move( alpha ) )
{
  key_includes_output_ = true;
  loop_backs_.emplace_back();
}

negative_tree::delta negative_tree::add( negative_scenario const& s )
{
  if ( s.elements.empty() )
    throw scenario_error( "empty negative scenario" );
  if ( s.loop_start && ( *s.loop_start < 1 || *s.loop_start > s.elements.size() ) )
    throw scenario_error( "loop start index out of range" );

  delta d;
  std::vector<std::size_t> path;
  path.reserve( s.elements.size() );
  std::size_t v = root;
  for ( auto const& e : s.elements )
  {
    check_element( e );
    if ( auto c = find_child( v, e ) )
      v = *c;
    else
    {
      v = add_node( v, e );
      loop_backs_.emplace_back();
      d.nodes.push_back( v );
    }
    path.push_back( v );
  }

  if ( s.loop_start )
  {
    auto const target = path[*s.loop_start - 1];
    if ( loop_backs_[v].insert( target ).second )
      d.back_edges.emplace_back( v, target );
  }
  else if ( loopless_ends_.insert( v ).second )
    d.loopless_ends.push_back( v );
  return d;
}

negative_tree::delta negative_tree::everything() const
{
  delta d;
  for ( std::size_t v = 1; v < size(); ++v )
  {
    d.nodes.push_back( v );
    for ( auto t : loop_backs_[v] )
      d.back_edges.emplace_back( v, t );
  }
  d.loopless_ends.assign( loopless_ends_.begin(), loopless_ends_.end() );
  return d;
}

bool exhibits( automaton const& a, negative_scenario const& s )
{
  std::size_t q = 0;
  bits z = zero_bits( a.alphabet().num_output_vars() );
  std::optional<std::pair<std::size_t, bits>> loop_config;
  for ( std::size_t i = 0; i < s.elements.size(); ++i )
  {
    auto r = a.step( q, z, s.elements[i].in );
    if ( r.out != s.elements[i].out )
      return false;
    q = r.state;
    z = std::move( r.out.output );
    if ( s.loop_start && *s.loop_start == i + 1 )
      loop_config.emplace( q, z );
  }
  return !s.loop_start || ( loop_config && loop_config->first == q && loop_config->second == z );
}

} // namespace efsm

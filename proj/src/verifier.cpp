#include <efsm/verifier.hpp>

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace efsm
{

/* plant */

bool plant_rule::matches( std::size_t state, output_action const& last ) const
{
  if ( state != from )
    return false;
  if ( on_event && *on_event != last.event )
    return false;
  for ( std::size_t i = 0; i < on_output.size() && i < last.output.size(); ++i )
    if ( on_output[i] != '-' && ( on_output[i] == '1' ) != last.output[i] )
      return false;
  return true;
}

plant_model plant_model::free( alphabet const& a )
{
  plant_model p;
  p.free_ = true;
  auto const nx = a.num_input_vars();
  if ( nx >= 24 )
    throw std::invalid_argument( "free environment over too many input variables" );
  for ( std::size_t e = 0; e < a.input_events.size(); ++e )
    for ( std::size_t v = 0; v < ( std::size_t{ 1 } << nx ); ++v )
    {
      bits u( nx );
      for ( std::size_t i = 0; i < nx; ++i )
        u[i] = ( v >> ( nx - 1 - i ) ) & 1;
      p.rules_.push_back( { 0, std::nullopt, "", 0, { static_cast<event_id>( e ), u } } );
    }
  return p;
}

plant_model::plant_model( alphabet const& a, std::size_t num_states, std::size_t initial, std::vector<plant_rule> rules )
    : num_states_( num_states ), initial_( initial ), rules_( std::move( rules ) )
{
  if ( num_states_ == 0 || initial_ >= num_states_ )
    throw std::invalid_argument( "plant initial state out of range" );
  for ( auto const& r : rules_ )
  {
    if ( r.from >= num_states_ || r.to >= num_states_ )
      throw std::invalid_argument( "plant rule refers to an undeclared state" );
    if ( r.emit.event < 0 || static_cast<std::size_t>( r.emit.event ) >= a.input_events.size() )
      throw std::invalid_argument( "plant rule emits an unknown input event" );
    if ( r.emit.input.size() != a.num_input_vars() )
      throw std::invalid_argument( "plant rule emits an input of wrong length" );
    if ( !r.on_output.empty() && r.on_output.size() != a.num_output_vars() )
      throw std::invalid_argument( "plant rule output pattern has wrong length" );
    if ( r.on_event && *r.on_event != epsilon &&
         ( *r.on_event < 0 || static_cast<std::size_t>( *r.on_event ) >= a.output_events.size() ) )
      throw std::invalid_argument( "plant rule refers to an unknown output event" );
    observes_events_ = observes_events_ || r.on_event.has_value();
  }
}

std::vector<std::pair<std::size_t, input_action>> plant_model::responses( std::size_t state,
                                                                          output_action const& last ) const
{
  std::vector<std::pair<std::size_t, input_action>> r;
  for ( auto const& rule : rules_ )
    if ( rule.matches( state, last ) )
      r.emplace_back( rule.to, rule.emit );
  if ( r.empty() )
    throw plant_deadlock( "plant has no response in state " + std::to_string( state ) + " to output event " +
                          std::to_string( last.event ) + " with outputs " + to_string( last.output ) );
  return r;
}

namespace
{

/* closed loop of controller and plant, explored on demand */
class closed_loop
{
public:
  struct edge
  {
    ltl::step s;
    std::size_t target;
  };

  closed_loop( automaton const& m, plant_model const& p, std::size_t cap ) : m_( m ), p_( p ), cap_( cap )
  {
    intern( { 0, zero_bits( m.alphabet().num_output_vars() ), p.initial(), epsilon } );
  }

  std::size_t size() const { return configs_.size(); }

  std::vector<edge> const& successors( std::size_t id )
  {
    if ( succ_[id] )
      return *succ_[id];
    std::vector<edge> out;
    auto const c = configs_[id];
    for ( auto& [p2, in] : p_.responses( c.plant, { c.last, c.z } ) )
    {
      auto r = m_.step( c.ctrl, c.z, in );
      auto const last = p_.observes_events() ? r.out.event : epsilon;
      auto const t = intern( { r.state, r.out.output, p2, last } );
      out.push_back( { { in, r.out }, t } );
    }
    succ_[id] = std::move( out );
    return *succ_[id];
  }

private:
  struct config
  {
    std::size_t ctrl;
    bits z;
    std::size_t plant;
    event_id last;
  };

  std::size_t intern( config c )
  {
    std::string key = std::to_string( c.ctrl ) + ':' + std::to_string( c.plant ) + ':' + std::to_string( c.last ) +
                      ':' + to_string( c.z );
    auto [it, fresh] = ids_.try_emplace( std::move( key ), configs_.size() );
    if ( fresh )
    {
      if ( configs_.size() >= cap_ )
        throw state_space_exceeded( "closed loop exceeds " + std::to_string( cap_ ) + " states" );
      configs_.push_back( std::move( c ) );
      succ_.emplace_back();
    }
    return it->second;
  }

  automaton const& m_;
  plant_model const& p_;
  std::size_t cap_;
  std::vector<config> configs_;
  std::vector<std::optional<std::vector<edge>>> succ_;
  std::unordered_map<std::string, std::size_t> ids_;
};

class product
{
public:
  struct edge
  {
    std::size_t target;
    ltl::step s;
  };

  product( closed_loop& sys, ltl::buchi const& b, std::size_t cap ) : sys_( sys ), b_( b ), cap_( cap )
  {
    intern( 0, 0 );
  }

  std::size_t size() const { return states_.size(); }
  bool accepting( std::size_t id ) const { return b_.states[states_[id].second].accepting; }

  std::vector<edge> successors( std::size_t id )
  {
    auto const [s, q] = states_[id];
    std::vector<edge> out;
    for ( auto const& e : sys_.successors( s ) )
      for ( auto q2 : b_.states[q].successors )
        if ( b_.label_holds( q2, e.s ) )
          out.push_back( { intern( e.target, q2 ), e.s } );
    return out;
  }

private:
  std::size_t intern( std::size_t s, std::size_t q )
  {
    auto const key = static_cast<std::uint64_t>( s ) * b_.states.size() + q;
    auto [it, fresh] = ids_.try_emplace( key, states_.size() );
    if ( fresh )
    {
      if ( states_.size() >= cap_ )
        throw state_space_exceeded( "product exceeds " + std::to_string( cap_ ) + " states" );
      states_.emplace_back( s, q );
    }
    return it->second;
  }

  closed_loop& sys_;
  ltl::buchi const& b_;
  std::size_t cap_;
  std::vector<std::pair<std::size_t, std::size_t>> states_;
  std::unordered_map<std::uint64_t, std::size_t> ids_;
};

std::optional<counterexample> check_safety( automaton const& m, plant_model const& plant,
                                            ltl::formula const& invariant, std::size_t cap )
{
  closed_loop sys( m, plant, cap );
  struct back
  {
    std::size_t from;
    ltl::step s;
  };
  std::vector<std::optional<back>> parent( 1 );
  std::vector<bool> seen( 1, true );
  std::deque<std::size_t> queue{ 0 };
  while ( !queue.empty() )
  {
    auto const v = queue.front();
    queue.pop_front();
    for ( auto const& e : sys.successors( v ) )
    {
      if ( !ltl::holds( invariant, e.s ) )
      {
        counterexample cex;
        cex.trace.push_back( e.s );
        for ( auto u = v; parent[u]; u = parent[u]->from )
          cex.trace.push_back( parent[u]->s );
        std::reverse( cex.trace.begin(), cex.trace.end() );
        return cex;
      }
      if ( e.target >= seen.size() )
      {
        seen.resize( e.target + 1, false );
        parent.resize( e.target + 1 );
      }
      if ( !seen[e.target] )
      {
        seen[e.target] = true;
        parent[e.target] = back{ v, e.s };
        queue.push_back( e.target );
      }
    }
  }
  return std::nullopt;
}

std::optional<counterexample> nested_dfs( automaton const& m, plant_model const& plant, ltl::buchi const& b,
                                          std::size_t cap )
{
  closed_loop sys( m, plant, cap );
  product prod( sys, b, cap );

  struct frame
  {
    std::size_t id;
    std::vector<product::edge> edges;
    std::size_t next = 0;
    std::optional<ltl::step> entry;
  };

  std::vector<bool> blue, red;
  std::vector<long> stack_pos;
  auto grow = [&] {
    blue.resize( prod.size(), false );
    red.resize( prod.size(), false );
    stack_pos.resize( prod.size(), -1 );
  };

  std::vector<frame> outer;
  auto push_outer = [&]( std::size_t id, std::optional<ltl::step> entry ) {
    auto edges = prod.successors( id );
    grow();
    blue[id] = true;
    stack_pos[id] = static_cast<long>( outer.size() );
    outer.push_back( { id, std::move( edges ), 0, std::move( entry ) } );
  };

  /* looks for a path from seed back into the outer stack */
  auto inner = [&]( std::size_t seed ) -> std::optional<std::pair<std::vector<ltl::step>, std::size_t>> {
    std::vector<frame> st;
    red[seed] = true;
    st.push_back( { seed, prod.successors( seed ), 0, std::nullopt } );
    grow();
    while ( !st.empty() )
    {
      auto& f = st.back();
      if ( f.next == f.edges.size() )
      {
        st.pop_back();
        continue;
      }
      auto const e = f.edges[f.next++];
      if ( stack_pos[e.target] >= 0 )
      {
        std::vector<ltl::step> path;
        for ( std::size_t i = 1; i < st.size(); ++i )
          path.push_back( *st[i].entry );
        path.push_back( e.s );
        return std::make_pair( std::move( path ), e.target );
      }
      if ( !red[e.target] )
      {
        red[e.target] = true;
        auto edges = prod.successors( e.target );
        grow();
        st.push_back( { e.target, std::move( edges ), 0, e.s } );
      }
    }
    return std::nullopt;
  };

  push_outer( 0, std::nullopt );
  while ( !outer.empty() )
  {
    auto& f = outer.back();
    if ( f.next < f.edges.size() )
    {
      auto const e = f.edges[f.next++];
      if ( !blue[e.target] )
        push_outer( e.target, e.s );
      continue;
    }
    if ( prod.accepting( f.id ) )
      if ( auto hit = inner( f.id ) )
      {
        counterexample cex;
        for ( std::size_t i = 1; i < outer.size(); ++i )
          cex.trace.push_back( *outer[i].entry );
        cex.trace.insert( cex.trace.end(), hit->first.begin(), hit->first.end() );
        cex.loop_start = static_cast<std::size_t>( stack_pos[hit->second] );
        return cex;
      }
    stack_pos[f.id] = -1;
    outer.pop_back();
  }
  return std::nullopt;
}

} // namespace

std::optional<counterexample> check( automaton const& m, plant_model const& plant, ltl::formula_ptr const& f,
                                     verify_options const& opts )
{
  std::optional<counterexample> cex;
  if ( opts.safety_fast_path && f->type == ltl::op::globally && ltl::is_propositional( *f->lhs ) )
    cex = check_safety( m, plant, *f->lhs, opts.state_cap );
  else
    cex = nested_dfs( m, plant, ltl::to_buchi( ltl::formula::make( ltl::op::negation, f ) ), opts.state_cap );
  if ( cex )
    cex->formula = ltl::to_string( *f, m.alphabet() );
  return cex;
}

std::vector<counterexample> verify( automaton const& m, plant_model const& plant,
                                    std::vector<ltl::formula_ptr> const& formulas, verify_options const& opts )
{
  std::vector<counterexample> out;
  for ( auto const& f : formulas )
    if ( auto c = check( m, plant, f, opts ) )
      out.push_back( std::move( *c ) );
  return out;
}

product_graph explore_product( automaton const& m, plant_model const& plant, ltl::buchi const& b,
                               std::size_t state_cap )
{
  closed_loop sys( m, plant, state_cap );
  product prod( sys, b, state_cap );
  product_graph g;
  for ( std::size_t id = 0; id < prod.size(); ++id )
  {
    std::vector<std::size_t> succ;
    for ( auto const& e : prod.successors( id ) )
      succ.push_back( e.target );
    g.successors.push_back( std::move( succ ) );
    g.accepting.push_back( prod.accepting( id ) );
  }
  return g;
}

std::vector<ltl::step> replay( automaton const& m, std::vector<input_action> const& inputs )
{
  std::vector<ltl::step> out;
  std::size_t q = 0;
  bits z = zero_bits( m.alphabet().num_output_vars() );
  for ( auto const& in : inputs )
  {
    auto r = m.step( q, z, in );
    q = r.state;
    z = r.out.output;
    out.push_back( { in, std::move( r.out ) } );
  }
  return out;
}

} // namespace efsm

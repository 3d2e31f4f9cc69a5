#include <efsm/encoder.hpp>

#include <algorithm>
#include <bit>
#include <ostream>
#include <set>

namespace efsm
{

std::size_t encoding_params::transitions_for( alphabet const& a ) const
{
  auto const full = num_states * std::max<std::size_t>( a.input_events.size(), 1 );
  return max_transitions == 0 ? full : std::min( max_transitions, full );
}

std::size_t domain_var::decode( sat::solve_outcome const& model ) const
{
  std::optional<std::size_t> found;
  for ( std::size_t i = 0; i < lits_.size(); ++i )
    if ( model.value( lits_[i] ) )
    {
      if ( found )
        throw decode_mismatch( "one-hot domain with two values set" );
      found = i;
    }
  if ( !found )
    throw decode_mismatch( "one-hot domain with no value set" );
  return *found;
}

namespace
{

std::string idx( std::initializer_list<std::size_t> is )
{
  std::string s = "[";
  bool first = true;
  for ( auto i : is )
  {
    if ( !first )
      s += ',';
    s += std::to_string( i );
    first = false;
  }
  return s + "]";
}

} // namespace

encoder::encoder( sat::solver& solver, efsm::alphabet alpha, encoding_params params )
    : solver_( solver ), alphabet_( std::move( alpha ) ), params_( params )
{
  if ( params_.num_states < 1 )
    throw std::invalid_argument( "encoder needs at least one state" );
  if ( params_.encode_guards && params_.max_guard_size < 1 )
    throw std::invalid_argument( "guard size budget must be positive" );
  if ( alphabet_.input_events.empty() )
    throw std::invalid_argument( "alphabet has no input events" );

  C_ = params_.num_states;
  K_ = params_.transitions_for( alphabet_ );
  P_ = params_.encode_guards ? params_.max_guard_size : 0;
  X_ = alphabet_.num_input_vars();
  Z_ = alphabet_.num_output_vars();
  EI_ = alphabet_.input_events.size();
  EO_ = alphabet_.output_events.size();

  false_ = fresh( "false" );
  solver_.add_clause( { ~false_ } );

  declare_structure();
  if ( params_.encode_guards )
    declare_guard_trees();
  if ( params_.state_bfs )
    declare_state_bfs();
  if ( params_.encode_guards && params_.tree_bfs )
    declare_tree_bfs();
}

/* helpers */

sat::lit encoder::fresh( std::string const& name )
{
  auto const v = solver_.new_variable();
  if ( params_.debug_names )
  {
    if ( names_.size() <= static_cast<std::size_t>( v ) )
      names_.resize( v + 1 );
    names_[v] = name;
  }
  return sat::lit::pos( v );
}

void encoder::clause( std::vector<sat::lit> c )
{
  auto const t = constant_true();
  std::vector<sat::lit> out;
  out.reserve( c.size() );
  for ( auto l : c )
  {
    if ( l == t )
      return;
    if ( l != false_ )
      out.push_back( l );
  }
  solver_.add_clause( out );
}

void encoder::at_most_one( std::vector<sat::lit> const& lits )
{
  std::vector<sat::lit> live;
  for ( auto l : lits )
    if ( l != false_ )
      live.push_back( l );
  if ( params_.amo == amo_encoding::binary && live.size() > 4 )
  {
    auto const width = static_cast<std::size_t>( std::bit_width( live.size() - 1 ) );
    std::vector<sat::lit> b;
    for ( std::size_t i = 0; i < width; ++i )
      b.push_back( fresh( "amo" ) );
    for ( std::size_t i = 0; i < live.size(); ++i )
      for ( std::size_t j = 0; j < width; ++j )
        clause( { ~live[i], ( ( i >> j ) & 1 ) ? b[j] : ~b[j] } );
    return;
  }
  for ( std::size_t i = 0; i < live.size(); ++i )
    for ( std::size_t j = i + 1; j < live.size(); ++j )
      clause( { ~live[i], ~live[j] } );
}

void encoder::exactly_one( std::vector<sat::lit> const& lits )
{
  clause( lits );
  at_most_one( lits );
}

domain_var encoder::one_hot( std::string const& name, std::size_t size, std::vector<bool> const& allowed )
{
  std::vector<sat::lit> lits( size, false_ );
  std::size_t n_allowed = 0;
  for ( std::size_t i = 0; i < size; ++i )
    n_allowed += allowed.empty() || allowed[i];
  for ( std::size_t i = 0; i < size; ++i )
  {
    if ( !allowed.empty() && !allowed[i] )
      continue;
    lits[i] = n_allowed == 1 ? constant_true() : fresh( name + "=" + std::to_string( i ) );
  }
  if ( n_allowed > 1 )
    exactly_one( lits );
  else if ( n_allowed == 0 )
    solver_.add_clause( std::vector<sat::lit>{} );
  return domain_var( std::move( lits ) );
}

/* structure */

void encoder::declare_structure()
{
  ose_.resize( C_ + 1 );
  alg_.resize( C_ + 1 );
  dest_.resize( C_ + 1 );
  tie_.resize( C_ + 1 );
  for ( std::size_t q = 1; q <= C_; ++q )
  {
    ose_[q] = one_hot( "ose" + idx( { q } ), EO_ + 1 );
    alg_[q].resize( Z_ );
    for ( std::size_t z = 0; z < Z_; ++z )
      for ( std::size_t b = 0; b < 2; ++b )
        alg_[q][z][b] = fresh( "alg" + idx( { q, z + 1, b } ) );

    dest_[q].resize( K_ + 1 );
    tie_[q].resize( K_ + 1 );
    for ( std::size_t k = 1; k <= K_; ++k )
    {
      dest_[q][k] = one_hot( "dest" + idx( { q, k } ), C_ + 1 );
      tie_[q][k] = one_hot( "tie" + idx( { q, k } ), EI_ + 1 );
      clause( { ~dest_[q][k].eq( 0 ), tie_[q][k].eq( 0 ) } );
      clause( { dest_[q][k].eq( 0 ), ~tie_[q][k].eq( 0 ) } );
      if ( k > 1 )
        clause( { ~dest_[q][k - 1].eq( 0 ), dest_[q][k].eq( 0 ) } );
    }
  }
  /* a taken transition always emits: states without an event are not targets */
  for ( std::size_t q = 1; q <= C_; ++q )
    for ( std::size_t k = 1; k <= K_; ++k )
      for ( std::size_t q2 = 1; q2 <= C_; ++q2 )
        clause( { ~dest_[q][k].eq( q2 ), ~ose_[q2].eq( 0 ) } );
}

void encoder::declare_guard_trees()
{
  type_.assign( C_ + 1, {} );
  term_.assign( C_ + 1, {} );
  parent_.assign( C_ + 1, {} );
  child_.assign( C_ + 1, {} );
  for ( std::size_t q = 1; q <= C_; ++q )
  {
    type_[q].resize( K_ + 1 );
    term_[q].resize( K_ + 1 );
    parent_[q].resize( K_ + 1 );
    child_[q].resize( K_ + 1 );
    for ( std::size_t k = 1; k <= K_; ++k )
    {
      auto& ty = type_[q][k];
      auto& tv = term_[q][k];
      auto& pa = parent_[q][k];
      auto& ch = child_[q][k];
      ty.resize( P_ + 1 );
      tv.resize( P_ + 1 );
      pa.resize( P_ + 1 );
      ch.resize( P_ + 1 );

      for ( std::size_t p = 1; p <= P_; ++p )
      {
        std::vector<bool> types( num_node_types, true );
        if ( p == P_ )
          types[op_and] = types[op_or] = types[op_not] = false;
        if ( p + 1 == P_ )
          types[op_and] = types[op_or] = false;
        ty[p] = one_hot( "type" + idx( { q, k, p } ), num_node_types, types );
        tv[p] = one_hot( "term" + idx( { q, k, p } ), X_ + 1 );
        pa[p] = one_hot( "parent" + idx( { q, k, p } ), p );
        std::vector<bool> children( P_ + 1, false );
        children[0] = true;
        for ( std::size_t c = p + 1; c <= P_; ++c )
          children[c] = true;
        ch[p] = one_hot( "child" + idx( { q, k, p } ), P_ + 1, children );
      }

      for ( std::size_t p = 1; p <= P_; ++p )
      {
        auto const t_term = ty[p].eq( terminal );
        auto const t_and = ty[p].eq( op_and );
        auto const t_or = ty[p].eq( op_or );
        auto const t_none = ty[p].eq( none );

        clause( { ~t_term, ~tv[p].eq( 0 ) } );
        clause( { tv[p].eq( 0 ), t_term } );

        clause( { ~ch[p].eq( 0 ), t_term, t_none } );
        clause( { ~t_term, ch[p].eq( 0 ) } );
        clause( { ~t_none, ch[p].eq( 0 ) } );

        for ( std::size_t c = p + 1; c <= P_; ++c )
        {
          clause( { ~ch[p].eq( c ), pa[c].eq( p ) } );
          if ( c < P_ )
          {
            clause( { ~t_and, ~ch[p].eq( c ), pa[c + 1].eq( p ) } );
            clause( { ~t_or, ~ch[p].eq( c ), pa[c + 1].eq( p ) } );
          }
        }
        clause( { ~t_and, ~ch[p].eq( P_ ) } );
        clause( { ~t_or, ~ch[p].eq( P_ ) } );

        /* every parent link is backed by the parent's child pointer */
        for ( std::size_t c = p + 1; c <= P_; ++c )
        {
          std::vector<sat::lit> cl{ ~pa[c].eq( p ), ch[p].eq( c ) };
          if ( c - 1 > p )
          {
            cl.push_back( ch[p].eq( c - 1 ) );
            clause( { ~pa[c].eq( p ), ~ch[p].eq( c - 1 ), t_and, t_or } );
          }
          clause( cl );
        }

        if ( p == 1 )
        {
          clause( { ~t_none, dest_[q][k].eq( 0 ) } );
          clause( { ~dest_[q][k].eq( 0 ), t_none } );
        }
        else
        {
          clause( { ~pa[p].eq( 0 ), t_none } );
          clause( { ~t_none, pa[p].eq( 0 ) } );
          clause( { ~dest_[q][k].eq( 0 ), t_none } );
        }
      }
    }
  }
}

void encoder::declare_state_bfs()
{
  if ( C_ < 2 )
    return;
  std::vector<std::vector<sat::lit>> t( C_ + 1, std::vector<sat::lit>( C_ + 1, false_ ) );
  for ( std::size_t i = 1; i <= C_; ++i )
    for ( std::size_t j = i + 1; j <= C_; ++j )
    {
      t[i][j] = fresh( "bfs_t" + idx( { i, j } ) );
      std::vector<sat::lit> any{ ~t[i][j] };
      for ( std::size_t k = 1; k <= K_; ++k )
      {
        clause( { ~dest_[i][k].eq( j ), t[i][j] } );
        any.push_back( dest_[i][k].eq( j ) );
      }
      clause( any );
    }

  std::vector<domain_var> p( C_ + 1 );
  for ( std::size_t j = 2; j <= C_; ++j )
  {
    std::vector<bool> allowed( j, true );
    allowed[0] = false;
    p[j] = one_hot( "bfs_p" + idx( { j } ), j, allowed );
    for ( std::size_t i = 1; i < j; ++i )
    {
      clause( { ~p[j].eq( i ), t[i][j] } );
      std::vector<sat::lit> back{ ~t[i][j], p[j].eq( i ) };
      for ( std::size_t r = 1; r < i; ++r )
      {
        clause( { ~p[j].eq( i ), ~t[r][j] } );
        back.push_back( t[r][j] );
      }
      clause( back );
    }
  }
  for ( std::size_t j = 2; j < C_; ++j )
    for ( std::size_t i = 1; i < j; ++i )
      for ( std::size_t r = 1; r < i; ++r )
        clause( { ~p[j].eq( i ), ~p[j + 1].eq( r ) } );
}

void encoder::declare_tree_bfs()
{
  for ( std::size_t q = 1; q <= C_; ++q )
    for ( std::size_t k = 1; k <= K_; ++k )
    {
      auto const& pa = parent_[q][k];
      auto const& ty = type_[q][k];
      for ( std::size_t j = 1; j < P_; ++j )
        clause( { ~ty[j].eq( none ), ty[j + 1].eq( none ) } );
      for ( std::size_t j = 2; j < P_; ++j )
        for ( std::size_t i = 1; i < j; ++i )
          for ( std::size_t r = 1; r < i; ++r )
            clause( { ~pa[j].eq( i ), ~pa[j + 1].eq( r ) } );
    }
}

/* input-dependent parts */

std::size_t encoder::input_index( bits const& u )
{
  if ( u.size() != X_ )
    throw std::invalid_argument( "input vector has wrong length" );
  if ( auto it = input_ids_.find( u ); it != input_ids_.end() )
    return it->second;

  auto const id = inputs_.size();
  auto const us = to_string( u );
  input_block b;
  b.theta.assign( C_ + 1, std::vector<sat::lit>( K_ + 1, false_ ) );
  b.value.assign( C_ + 1, std::vector<std::vector<sat::lit>>( K_ + 1 ) );
  for ( std::size_t q = 1; q <= C_; ++q )
    for ( std::size_t k = 1; k <= K_; ++k )
    {
      if ( !params_.encode_guards )
      {
        b.theta[q][k] = fresh( "theta" + idx( { q, k } ) + us );
        clause( { ~dest_[q][k].eq( 0 ), ~b.theta[q][k] } );
        continue;
      }
      auto& nu = b.value[q][k];
      nu.assign( P_ + 1, false_ );
      for ( std::size_t p = 1; p <= P_; ++p )
        nu[p] = fresh( "value" + idx( { q, k, p } ) + us );
      b.theta[q][k] = nu[1];

      auto const& ty = type_[q][k];
      auto const& tv = term_[q][k];
      auto const& ch = child_[q][k];
      for ( std::size_t p = 1; p <= P_; ++p )
      {
        for ( std::size_t x = 1; x <= X_; ++x )
          clause( { ~tv[p].eq( x ), u[x - 1] ? nu[p] : ~nu[p] } );
        clause( { ~ty[p].eq( none ), ~nu[p] } );
        for ( std::size_t c = p + 1; c <= P_; ++c )
        {
          auto const at = ch[p].eq( c );
          auto const t_not = ty[p].eq( op_not );
          clause( { ~t_not, ~at, ~nu[p], ~nu[c] } );
          clause( { ~t_not, ~at, nu[p], nu[c] } );
          if ( c == P_ )
            continue;
          auto const t_and = ty[p].eq( op_and );
          auto const t_or = ty[p].eq( op_or );
          clause( { ~t_and, ~at, ~nu[p], nu[c] } );
          clause( { ~t_and, ~at, ~nu[p], nu[c + 1] } );
          clause( { ~t_and, ~at, nu[p], ~nu[c], ~nu[c + 1] } );
          clause( { ~t_or, ~at, nu[p], ~nu[c] } );
          clause( { ~t_or, ~at, nu[p], ~nu[c + 1] } );
          clause( { ~t_or, ~at, ~nu[p], nu[c], nu[c + 1] } );
        }
      }
    }

  inputs_.push_back( u );
  input_ids_.emplace( u, id );
  input_blocks_.push_back( std::move( b ) );
  return id;
}

encoder::reaction_block const& encoder::reaction_for( event_id e, std::size_t u )
{
  auto const key = std::make_pair( e, u );
  if ( auto it = reactions_.find( key ); it != reactions_.end() )
    return it->second;

  auto const us = to_string( inputs_[u] );
  auto const en = static_cast<std::size_t>( e );
  reaction_block r;
  r.first_fired.resize( C_ + 1 );
  r.reaction.resize( C_ + 1 );
  for ( std::size_t q = 1; q <= C_; ++q )
  {
    std::vector<sat::lit> fire( K_ + 1, false_ );
    for ( std::size_t k = 1; k <= K_; ++k )
    {
      auto const theta = input_blocks_[u].theta[q][k];
      if ( EI_ == 1 )
      {
        fire[k] = theta;
        continue;
      }
      auto const tie = tie_[q][k].eq( en + 1 );
      fire[k] = fresh( "fire" + idx( { q, k, en + 1 } ) + us );
      clause( { ~fire[k], tie } );
      clause( { ~fire[k], theta } );
      clause( { ~tie, ~theta, fire[k] } );
    }

    auto& ff = r.first_fired[q] = one_hot( "firstFired" + idx( { q, en + 1 } ) + us, K_ + 1 );
    std::vector<sat::lit> none_fired{ ff.eq( 0 ) };
    for ( std::size_t k = 1; k <= K_; ++k )
    {
      clause( { ~ff.eq( 0 ), ~fire[k] } );
      none_fired.push_back( fire[k] );
      clause( { ~ff.eq( k ), fire[k] } );
      std::vector<sat::lit> back{ ~fire[k], ff.eq( k ) };
      for ( std::size_t j = 1; j < k; ++j )
      {
        clause( { ~ff.eq( k ), ~fire[j] } );
        back.push_back( fire[j] );
      }
      clause( back );
    }
    clause( none_fired );

    auto& d = r.reaction[q] = one_hot( "actual" + idx( { q, en + 1 } ) + us, C_ + 1 );
    clause( { ~ff.eq( 0 ), d.eq( 0 ) } );
    for ( std::size_t k = 1; k <= K_; ++k )
      for ( std::size_t q2 = 1; q2 <= C_; ++q2 )
        clause( { ~ff.eq( k ), ~dest_[q][k].eq( q2 ), d.eq( q2 ) } );
  }
  return reactions_.emplace( key, std::move( r ) ).first->second;
}

sat::lit encoder::algorithm_matches( std::size_t q, output_action const& parent, output_action const& node )
{
  auto const key = std::make_tuple( q, node.event, parent.output, node.output );
  if ( auto it = matches_.find( key ); it != matches_.end() )
    return it->second;

  std::vector<sat::lit> conj{ ose_[q].eq( static_cast<std::size_t>( node.event + 1 ) ) };
  for ( std::size_t z = 0; z < Z_; ++z )
  {
    auto const a = alg_[q][z][parent.output[z]];
    conj.push_back( node.output[z] ? a : ~a );
  }
  auto const m = fresh( "match" + idx( { q } ) );
  std::vector<sat::lit> back{ m };
  for ( auto l : conj )
  {
    clause( { ~m, l } );
    back.push_back( ~l );
  }
  clause( back );
  matches_.emplace( key, m );
  return m;
}

/* scenario trees */

void encoder::encode_positive( positive_tree const& tree )
{
  if ( tree.alphabet() != alphabet_ )
    throw std::invalid_argument( "scenario tree alphabet differs from encoder alphabet" );
  pos_map_.clear();
  pos_map_.resize( tree.size() );
  pos_active_.clear();

  std::vector<sat::lit> root( C_ + 1, false_ );
  root[1] = constant_true();
  pos_map_[0] = domain_var( root );

  for ( std::size_t v = 1; v < tree.size(); ++v )
  {
    auto const& n = tree.node( v );
    auto const& par = tree.node( *n.parent );
    auto const& mp = pos_map_[*n.parent];
    auto const& r = reaction_for( n.in.event, input_index( n.in.input ) );

    if ( n.is_passive() )
    {
      pos_map_[v] = mp;
      for ( std::size_t q = 1; q <= C_; ++q )
        clause( { ~mp.eq( q ), r.reaction[q].eq( 0 ) } );
      continue;
    }

    std::vector<bool> allowed( C_ + 1, true );
    allowed[0] = false;
    auto const mv = pos_map_[v] = one_hot( "mapping" + idx( { v } ), C_ + 1, allowed );
    for ( std::size_t q = 1; q <= C_; ++q )
      for ( std::size_t q2 = 1; q2 <= C_; ++q2 )
      {
        clause( { ~mp.eq( q ), ~mv.eq( q2 ), r.reaction[q].eq( q2 ) } );
        clause( { ~mp.eq( q ), ~r.reaction[q].eq( q2 ), mv.eq( q2 ) } );
      }
    for ( std::size_t q2 = 1; q2 <= C_; ++q2 )
    {
      clause( { ~mv.eq( q2 ), ose_[q2].eq( static_cast<std::size_t>( n.out.event + 1 ) ) } );
      for ( std::size_t z = 0; z < Z_; ++z )
      {
        auto const a = alg_[q2][z][par.out.output[z]];
        clause( { ~mv.eq( q2 ), n.out.output[z] ? a : ~a } );
      }
    }
    pos_active_.emplace_back( v, par.out.output );
  }
}

void encoder::encode_negative( negative_tree const& tree, negative_tree::delta const& d )
{
  if ( tree.alphabet() != alphabet_ )
    throw std::invalid_argument( "scenario tree alphabet differs from encoder alphabet" );
  if ( neg_map_.empty() )
  {
    std::vector<sat::lit> root( C_ + 1, false_ );
    root[1] = constant_true();
    neg_map_.push_back( domain_var( root ) );
  }
  if ( neg_map_.size() < tree.size() )
    neg_map_.resize( tree.size() );

  for ( auto v : d.nodes )
  {
    auto const& n = tree.node( v );
    auto const& par = tree.node( *n.parent );
    auto const mp = neg_map_.at( *n.parent );
    if ( mp.size() == 0 )
      throw std::logic_error( "negative node encoded before its parent" );
    auto const& r = reaction_for( n.in.event, input_index( n.in.input ) );
    auto const mv = neg_map_[v] = one_hot( "negMapping" + idx( { v } ), C_ + 1 );

    clause( { ~mp.eq( 0 ), mv.eq( 0 ) } );
    if ( n.is_passive() )
    {
      if ( n.out.output != par.out.output )
      {
        clause( { mv.eq( 0 ) } );
        continue;
      }
      for ( std::size_t q = 1; q <= C_; ++q )
      {
        clause( { ~mv.eq( q ), mp.eq( q ) } );
        clause( { ~mp.eq( q ), ~mv.eq( q ), r.reaction[q].eq( 0 ) } );
        clause( { ~mp.eq( q ), ~r.reaction[q].eq( 0 ), mv.eq( q ) } );
      }
      continue;
    }

    for ( std::size_t q2 = 1; q2 <= C_; ++q2 )
    {
      auto const m = algorithm_matches( q2, par.out, n.out );
      clause( { ~mv.eq( q2 ), m } );
      for ( std::size_t q = 1; q <= C_; ++q )
      {
        clause( { ~mp.eq( q ), ~mv.eq( q2 ), r.reaction[q].eq( q2 ) } );
        clause( { ~mp.eq( q ), ~r.reaction[q].eq( q2 ), ~m, mv.eq( q2 ) } );
      }
    }
    neg_active_.push_back( { *n.parent, n.in.event, n.in.input, par.out.output } );
  }

  for ( auto [end, start] : d.back_edges )
  {
    if ( tree.node( end ).out.output != tree.node( start ).out.output )
      continue;
    for ( std::size_t q = 1; q <= C_; ++q )
      clause( { ~neg_map_.at( end ).eq( q ), ~neg_map_.at( start ).eq( q ) } );
  }

  if ( params_.forbid_loopless_ends )
    for ( auto v : d.loopless_ends )
      clause( { neg_map_.at( v ).eq( 0 ) } );
}

/* cardinality */

totalizer& encoder::guard_size_counter( std::size_t cap )
{
  if ( !params_.encode_guards )
    throw std::logic_error( "guard size counter needs parse-tree encoding" );
  if ( !guard_counter_ )
  {
    std::vector<sat::lit> typed;
    for ( std::size_t q = 1; q <= C_; ++q )
      for ( std::size_t k = 1; k <= K_; ++k )
        for ( std::size_t p = 1; p <= P_; ++p )
          typed.push_back( ~type_[q][k][p].eq( none ) );
    guard_counter_ = std::make_unique<totalizer>( solver_, std::move( typed ), cap );
  }
  return *guard_counter_;
}

void encoder::bound_guard_size( std::size_t n )
{
  guard_size_counter( n + 1 ).bound( n );
}

totalizer& encoder::transition_counter( std::size_t cap )
{
  if ( !transition_counter_ )
  {
    std::vector<sat::lit> live;
    for ( std::size_t q = 1; q <= C_; ++q )
      for ( std::size_t k = 1; k <= K_; ++k )
        live.push_back( ~dest_[q][k].eq( 0 ) );
    transition_counter_ = std::make_unique<totalizer>( solver_, std::move( live ), cap );
  }
  return *transition_counter_;
}

void encoder::bound_transitions( std::size_t n )
{
  transition_counter( n + 1 ).bound( n );
}

/* test accessors */

sat::lit encoder::firing( std::size_t q, std::size_t k, bits const& u )
{
  return input_blocks_[input_index( u )].theta.at( q ).at( k );
}

sat::lit encoder::node_value( std::size_t q, std::size_t k, std::size_t p, bits const& u )
{
  return input_blocks_[input_index( u )].value.at( q ).at( k ).at( p );
}

domain_var const& encoder::first_fired( std::size_t q, event_id e, bits const& u )
{
  return reaction_for( e, input_index( u ) ).first_fired.at( q );
}

domain_var const& encoder::reaction( std::size_t q, event_id e, bits const& u )
{
  return reaction_for( e, input_index( u ) ).reaction.at( q );
}

/* decoding */

std::size_t encoder::typed_nodes( sat::solve_outcome const& model ) const
{
  std::size_t n = 0;
  for ( std::size_t q = 1; q <= C_; ++q )
    for ( std::size_t k = 1; k <= K_; ++k )
      for ( std::size_t p = 1; p <= P_; ++p )
        n += !model.value( type_[q][k][p].eq( none ) );
  return n;
}

guard_expr encoder::decode_tree( sat::solve_outcome const& m, std::size_t q, std::size_t k, std::size_t p ) const
{
  switch ( type_[q][k][p].decode( m ) )
  {
  case terminal:
    return guard_expr::terminal( static_cast<std::uint32_t>( term_[q][k][p].decode( m ) - 1 ) );
  case op_not:
    return guard_expr::negate( decode_tree( m, q, k, child_[q][k][p].decode( m ) ) );
  case op_and:
  case op_or:
  {
    auto const c = child_[q][k][p].decode( m );
    auto lhs = decode_tree( m, q, k, c );
    auto rhs = decode_tree( m, q, k, c + 1 );
    return type_[q][k][p].decode( m ) == op_and ? guard_expr::conjoin( lhs, rhs ) : guard_expr::disjoin( lhs, rhs );
  }
  default:
    throw decode_mismatch( "parse tree refers to an untyped node" );
  }
}

guard_expr encoder::decode_truth_table( sat::solve_outcome const& m, std::size_t q, std::size_t k ) const
{
  std::vector<bits> on;
  for ( std::size_t u = 0; u < inputs_.size(); ++u )
    if ( m.value( input_blocks_[u].theta[q][k] ) )
      on.push_back( inputs_[u] );
  std::sort( on.begin(), on.end() );

  auto literal = [&]( bits const& u, std::size_t x ) {
    auto t = guard_expr::terminal( static_cast<std::uint32_t>( x ) );
    return u[x] ? t : guard_expr::negate( t );
  };
  auto minterm = [&]( bits const& u ) {
    if ( X_ == 0 )
      return guard_expr::disjoin( guard_expr::terminal( 0 ), guard_expr::negate( guard_expr::terminal( 0 ) ) );
    auto g = literal( u, X_ - 1 );
    for ( std::size_t x = X_ - 1; x-- > 0; )
      g = guard_expr::conjoin( literal( u, x ), g );
    return g;
  };

  if ( on.empty() )
    return guard_expr::conjoin( guard_expr::terminal( 0 ), guard_expr::negate( guard_expr::terminal( 0 ) ) );
  auto g = minterm( on.back() );
  for ( std::size_t i = on.size() - 1; i-- > 0; )
    g = guard_expr::disjoin( minterm( on[i] ), g );
  return g;
}

automaton encoder::decode( sat::solve_outcome const& model ) const
{
  if ( !model.is_sat() )
    throw std::logic_error( "decode needs a satisfying model" );

  /* algorithm bits that some mapped active node reads */
  std::set<std::tuple<std::size_t, std::size_t, bool>> used;
  for ( auto const& [v, pout] : pos_active_ )
  {
    auto const q = pos_map_[v].decode( model );
    for ( std::size_t z = 0; z < Z_; ++z )
      used.emplace( q, z, pout[z] );
  }
  for ( auto const& a : neg_active_ )
  {
    auto const qp = neg_map_[a.parent].decode( model );
    if ( qp == 0 )
      continue;
    auto const& r = reactions_.at( { a.event, input_ids_.at( a.input ) } );
    auto const q = r.reaction[qp].decode( model );
    if ( q == 0 )
      continue;
    for ( std::size_t z = 0; z < Z_; ++z )
      used.emplace( q, z, a.parent_output[z] );
  }

  std::vector<state> states( C_ );
  for ( std::size_t q = 1; q <= C_; ++q )
  {
    auto& s = states[q - 1];
    s.output_event = static_cast<event_id>( ose_[q].decode( model ) ) - 1;
    s.algorithm.resize( Z_ );
    for ( std::size_t z = 0; z < Z_; ++z )
    {
      if ( used.count( { q, z, false } ) )
        s.algorithm[z].when_false = model.value( alg_[q][z][0] );
      if ( used.count( { q, z, true } ) )
        s.algorithm[z].when_true = model.value( alg_[q][z][1] );
    }

    for ( std::size_t k = 1; k <= K_; ++k )
    {
      auto const d = dest_[q][k].decode( model );
      if ( d == 0 )
        continue;
      transition t;
      t.dest = d - 1;
      t.input_event = static_cast<event_id>( tie_[q][k].decode( model ) ) - 1;
      t.guard = params_.encode_guards ? decode_tree( model, q, k, 1 ) : decode_truth_table( model, q, k );
      for ( std::size_t u = 0; u < inputs_.size(); ++u )
        if ( t.guard.eval( inputs_[u] ) != model.value( input_blocks_[u].theta[q][k] ) )
          throw decode_mismatch( "guard of transition " + std::to_string( k ) + " in state " + std::to_string( q ) +
                                 " disagrees with its truth table on input " + to_string( inputs_[u] ) );
      if ( params_.encode_guards )
      {
        std::size_t n = 0;
        for ( std::size_t p = 1; p <= P_; ++p )
          n += !model.value( type_[q][k][p].eq( none ) );
        if ( n != t.guard.size() )
          throw decode_mismatch( "typed node count differs from decoded guard size" );
      }
      s.transitions.push_back( std::move( t ) );
    }
  }
  return automaton( alphabet_, std::move( states ) );
}

void encoder::write_dimacs( std::ostream& os ) const
{
  solver_.write_dimacs( os, [this]( int v ) {
    return static_cast<std::size_t>( v ) < names_.size() ? names_[v] : std::string();
  } );
}

} // namespace efsm

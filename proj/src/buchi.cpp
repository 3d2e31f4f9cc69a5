#include <efsm/buchi.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace efsm::ltl
{

bool buchi::label_holds( std::size_t s, step const& letter ) const
{
  auto const& st = states[s];
  for ( auto const& a : st.positive )
    if ( !holds( a, letter ) )
      return false;
  for ( auto const& a : st.negative )
    if ( holds( a, letter ) )
      return false;
  return true;
}

bool buchi::accepts_lasso( std::vector<step> const& trace, std::size_t cycle_begin ) const
{
  auto const n = trace.size();
  if ( n == 0 || cycle_begin >= n )
    throw std::invalid_argument( "lasso needs a nonempty cycle" );
  auto succ_pos = [&]( std::size_t i ) { return i + 1 < n ? i + 1 : cycle_begin; };
  auto const B = states.size();
  auto id = [&]( std::size_t i, std::size_t b ) { return i * B + b; };

  /* node (i, b): b was entered reading trace[i] */
  std::vector<std::vector<std::size_t>> adj( n * B );
  for ( std::size_t i = 0; i < n; ++i )
    for ( std::size_t b = 1; b < B; ++b )
      for ( auto b2 : states[b].successors )
        if ( label_holds( b2, trace[succ_pos( i )] ) )
          adj[id( i, b )].push_back( id( succ_pos( i ), b2 ) );

  std::vector<bool> reach( n * B, false );
  std::vector<std::size_t> stack;
  for ( auto b : states[0].successors )
    if ( label_holds( b, trace[0] ) && !reach[id( 0, b )] )
    {
      reach[id( 0, b )] = true;
      stack.push_back( id( 0, b ) );
    }
  while ( !stack.empty() )
  {
    auto v = stack.back();
    stack.pop_back();
    for ( auto w : adj[v] )
      if ( !reach[w] )
      {
        reach[w] = true;
        stack.push_back( w );
      }
  }

  for ( std::size_t v = 0; v < n * B; ++v )
  {
    if ( !reach[v] || !states[v % B].accepting )
      continue;
    std::vector<bool> seen( n * B, false );
    std::vector<std::size_t> st{ adj[v].begin(), adj[v].end() };
    while ( !st.empty() )
    {
      auto w = st.back();
      st.pop_back();
      if ( w == v )
        return true;
      if ( seen[w] )
        continue;
      seen[w] = true;
      st.insert( st.end(), adj[w].begin(), adj[w].end() );
    }
  }
  return false;
}

namespace
{

/* hash-consed formula nodes so that tableau sets are sets of ints */
class table
{
public:
  struct entry
  {
    op type;
    atom a;
    int lhs = -1;
    int rhs = -1;
  };

  int intern( formula const& f )
  {
    entry e{ f.type, f.type == op::prop ? f.a : atom{}, -1, -1 };
    if ( f.lhs )
      e.lhs = intern( *f.lhs );
    if ( f.rhs )
      e.rhs = intern( *f.rhs );
    auto key = std::make_tuple( e.type, e.a, e.lhs, e.rhs );
    if ( auto it = ids_.find( key ); it != ids_.end() )
      return it->second;
    entries_.push_back( e );
    return ids_[key] = static_cast<int>( entries_.size() - 1 );
  }

  entry const& at( int i ) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }

private:
  std::vector<entry> entries_;
  std::map<std::tuple<op, atom, int, int>, int> ids_;
};

struct tableau_node
{
  std::set<int> incoming; // -1 is the initial marker
  std::set<int> pending;
  std::set<int> old;
  std::set<int> next;
};

class tableau
{
public:
  explicit tableau( table const& t ) : t_( t ) {}

  void expand( tableau_node n )
  {
    if ( n.pending.empty() )
    {
      for ( std::size_t i = 0; i < nodes_.size(); ++i )
        if ( nodes_[i].old == n.old && nodes_[i].next == n.next )
        {
          nodes_[i].incoming.insert( n.incoming.begin(), n.incoming.end() );
          return;
        }
      auto const id = static_cast<int>( nodes_.size() );
      nodes_.push_back( n );
      tableau_node succ;
      succ.incoming = { id };
      succ.pending = n.next;
      expand( std::move( succ ) );
      return;
    }

    auto const eta = *n.pending.begin();
    n.pending.erase( n.pending.begin() );
    auto const& e = t_.at( eta );

    auto add_pending = [&]( tableau_node& m, int f ) {
      if ( !m.old.count( f ) )
        m.pending.insert( f );
    };

    switch ( e.type )
    {
    case op::bottom:
      return;
    case op::top:
    case op::prop:
    case op::negation:
      if ( contradicts( eta, n.old ) )
        return;
      n.old.insert( eta );
      expand( std::move( n ) );
      return;
    case op::conjunction:
      n.old.insert( eta );
      add_pending( n, e.lhs );
      add_pending( n, e.rhs );
      expand( std::move( n ) );
      return;
    case op::next:
      n.old.insert( eta );
      n.next.insert( e.lhs );
      expand( std::move( n ) );
      return;
    case op::disjunction:
    case op::until:
    case op::release:
    {
      n.old.insert( eta );
      auto a = n;
      auto b = std::move( n );
      if ( e.type == op::disjunction )
      {
        add_pending( a, e.lhs );
        add_pending( b, e.rhs );
      }
      else if ( e.type == op::until )
      {
        add_pending( a, e.lhs );
        a.next.insert( eta );
        add_pending( b, e.rhs );
      }
      else
      {
        add_pending( a, e.rhs );
        a.next.insert( eta );
        add_pending( b, e.lhs );
        add_pending( b, e.rhs );
      }
      expand( std::move( a ) );
      expand( std::move( b ) );
      return;
    }
    default:
      throw std::logic_error( "tableau expects negation normal form" );
    }
  }

  std::vector<tableau_node> const& nodes() const { return nodes_; }

private:
  bool contradicts( int eta, std::set<int> const& old ) const
  {
    auto const& e = t_.at( eta );
    for ( auto o : old )
    {
      auto const& f = t_.at( o );
      if ( e.type == op::prop && f.type == op::negation && f.lhs == eta )
        return true;
      if ( e.type == op::negation && o == e.lhs )
        return true;
    }
    return false;
  }

  table const& t_;
  std::vector<tableau_node> nodes_;
};

} // namespace

buchi to_buchi( formula_ptr const& f )
{
  table t;
  auto const root = t.intern( *nnf( f ) );

  tableau tab( t );
  tableau_node init;
  init.incoming = { -1 };
  init.pending = { root };
  tab.expand( std::move( init ) );
  auto const& nodes = tab.nodes();

  std::vector<int> untils;
  for ( std::size_t i = 0; i < t.size(); ++i )
    if ( t.at( static_cast<int>( i ) ).type == op::until )
      untils.push_back( static_cast<int>( i ) );

  /* in_set[j][r]: tableau node r is in acceptance set j */
  auto const m = std::max<std::size_t>( untils.size(), 1 );
  std::vector<std::vector<bool>> in_set( m, std::vector<bool>( nodes.size(), true ) );
  for ( std::size_t j = 0; j < untils.size(); ++j )
    for ( std::size_t r = 0; r < nodes.size(); ++r )
    {
      auto const& old = nodes[r].old;
      in_set[j][r] = !old.count( untils[j] ) || old.count( t.at( untils[j] ).rhs );
    }

  std::vector<std::vector<std::size_t>> succ( nodes.size() );
  std::vector<std::size_t> initial;
  for ( std::size_t r = 0; r < nodes.size(); ++r )
    for ( auto i : nodes[r].incoming )
      if ( i < 0 )
        initial.push_back( r );
      else
        succ[static_cast<std::size_t>( i )].push_back( r );

  buchi b;
  b.states.emplace_back();
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
  std::vector<std::pair<std::size_t, std::size_t>> work;
  auto state_of = [&]( std::size_t r, std::size_t c ) {
    auto [it, fresh] = ids.try_emplace( { r, c }, b.states.size() );
    if ( fresh )
    {
      buchi::state s;
      for ( auto o : nodes[r].old )
      {
        auto const& e = t.at( o );
        if ( e.type == op::prop )
          s.positive.push_back( e.a );
        else if ( e.type == op::negation )
          s.negative.push_back( t.at( e.lhs ).a );
      }
      s.accepting = c == 0 && in_set[0][r];
      b.states.push_back( std::move( s ) );
      work.emplace_back( r, c );
    }
    return it->second;
  };

  for ( auto r : initial )
  {
    auto const to = state_of( r, 0 );
    b.states[0].successors.push_back( to );
  }
  while ( !work.empty() )
  {
    auto [r, c] = work.back();
    work.pop_back();
    auto const from = ids.at( { r, c } );
    auto const c2 = in_set[c][r] ? ( c + 1 ) % m : c;
    for ( auto r2 : succ[r] )
    {
      auto const to = state_of( r2, c2 );
      b.states[from].successors.push_back( to );
    }
  }
  return b;
}

} // namespace efsm::ltl

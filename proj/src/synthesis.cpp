#include <efsm/synthesis.hpp>

#include <ostream>
#include <sstream>

namespace efsm
{

std::string to_string( solver_call const& c )
{
  std::ostringstream os;
  os << c.phase << " C=" << c.C << " K=" << c.K;
  if ( c.P )
    os << " P=" << *c.P;
  if ( c.T )
    os << " T=" << *c.T;
  if ( c.N )
    os << " N=" << *c.N;
  if ( c.negatives )
    os << " neg=" << c.negatives;
  os << ' ' << sat::to_string( c.verdict ) << ' ' << c.seconds;
  return os.str();
}

void write_trail( std::ostream& os, std::vector<solver_call> const& trail )
{
  for ( auto const& c : trail )
    os << to_string( c ) << '\n';
}

void recheck( automaton const& m, std::vector<scenario> const& scenarios )
{
  for ( std::size_t i = 0; i < scenarios.size(); ++i )
    if ( !m.satisfies( scenarios[i] ) )
      throw std::logic_error( "synthesized machine fails scenario " + std::to_string( i + 1 ) + " at element " +
                              std::to_string( m.matching_prefix( scenarios[i] ) + 1 ) );
}

/* session */

synthesis_session::synthesis_session( alphabet const& a, encoding_params p, synthesis_options const& opts,
                                      std::string phase )
    : opts_( opts ), solver_( opts.factory() ), phase_( std::move( phase ) )
{
  p.max_transitions = opts.max_transitions;
  p.state_bfs = opts.state_bfs;
  p.tree_bfs = opts.tree_bfs;
  p.amo = opts.amo;
  solver_->set_timeout( opts.timeout );
  enc_ = std::make_unique<encoder>( *solver_, a, p );
}

sat::solve_outcome synthesis_session::solve( std::vector<solver_call>& trail, std::optional<std::size_t> T,
                                             std::optional<std::size_t> N, std::size_t negatives )
{
  auto const before = solver_->solve_seconds();
  auto r = solver_->solve();
  solver_call c;
  c.phase = phase_;
  c.C = enc_->num_states();
  c.K = enc_->max_transitions();
  if ( enc_->params().encode_guards )
    c.P = enc_->params().max_guard_size;
  c.T = T;
  c.N = N;
  c.negatives = negatives;
  c.verdict = r.status;
  c.seconds = solver_->solve_seconds() - before;
  trail.push_back( c );
  if ( opts_.on_call )
    opts_.on_call( c );
  if ( r.status == sat::verdict::unknown )
    throw synthesis_aborted( "solver returned no verdict (" + r.reason + ") during " + phase_, trail );
  return r;
}

namespace
{

encoding_params basic_params( std::size_t C )
{
  encoding_params p;
  p.num_states = C;
  p.encode_guards = false;
  return p;
}

encoding_params extended_params( std::size_t C, std::size_t P )
{
  encoding_params p;
  p.num_states = C;
  p.max_guard_size = P;
  p.encode_guards = true;
  return p;
}

void finish( synthesis_result& r, std::vector<scenario> const& scenarios )
{
  r.solver_calls = r.trail.size();
  r.solver_seconds = 0.0;
  for ( auto const& c : r.trail )
    r.solver_seconds += c.seconds;
  if ( r.machine )
  {
    recheck( *r.machine, scenarios );
    r.T = r.machine->transition_count();
    if ( r.P > 0 )
      r.N = r.machine->guard_complexity();
  }
}

void append( std::vector<solver_call>& to, std::vector<solver_call> const& from )
{
  to.insert( to.end(), from.begin(), from.end() );
}

} // namespace

synthesis_result basic( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t C,
                        synthesis_options const& opts )
{
  auto const tree = positive_tree::build( a, scenarios );
  synthesis_result res;
  res.C = C;
  synthesis_session s( a, basic_params( C ), opts, "basic" );
  s.enc().encode_positive( tree );
  auto r = s.solve( res.trail, std::nullopt, std::nullopt );
  if ( r.is_sat() )
    res.machine = s.enc().decode( r );
  finish( res, scenarios );
  return res;
}

synthesis_result basic_min( alphabet const& a, std::vector<scenario> const& scenarios,
                            synthesis_options const& opts )
{
  auto const tree = positive_tree::build( a, scenarios );
  auto const limit = opts.max_states ? opts.max_states : tree.count_active() + 1;
  synthesis_result res;
  for ( std::size_t C = 1; C <= limit; ++C )
  {
    synthesis_session s( a, basic_params( C ), opts, "basic-min" );
    s.enc().encode_positive( tree );
    auto r = s.solve( res.trail, std::nullopt, std::nullopt );
    if ( r.is_sat() )
    {
      res.C = C;
      res.machine = s.enc().decode( r );
      break;
    }
  }
  finish( res, scenarios );
  return res;
}

synthesis_result basic_min_star( alphabet const& a, std::vector<scenario> const& scenarios,
                                 synthesis_options const& opts )
{
  auto res = basic_min( a, scenarios, opts );
  if ( !res.found() )
    return res;

  auto const tree = positive_tree::build( a, scenarios );
  synthesis_session s( a, basic_params( res.C ), opts, "basic-min-star" );
  s.enc().encode_positive( tree );
  auto r = s.solve( res.trail, std::nullopt, std::nullopt );
  if ( !r.is_sat() )
    throw std::logic_error( "state count found satisfiable became unsatisfiable" );
  auto best = s.enc().decode( r );
  s.enc().transition_counter( std::max<std::size_t>( best.transition_count(), 1 ) );
  while ( best.transition_count() > 0 )
  {
    auto const T = best.transition_count() - 1;
    s.enc().bound_transitions( T );
    r = s.solve( res.trail, T, std::nullopt );
    if ( !r.is_sat() )
      break;
    best = s.enc().decode( r );
  }
  res.machine = std::move( best );
  finish( res, scenarios );
  return res;
}

synthesis_result extended( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t C, std::size_t P,
                           std::optional<std::size_t> N, synthesis_options const& opts )
{
  auto const tree = positive_tree::build( a, scenarios );
  synthesis_result res;
  res.C = C;
  res.P = P;
  synthesis_session s( a, extended_params( C, P ), opts, "extended" );
  s.enc().encode_positive( tree );
  if ( N )
    s.enc().bound_guard_size( *N );
  auto r = s.solve( res.trail, std::nullopt, N );
  if ( r.is_sat() )
    res.machine = s.enc().decode( r );
  finish( res, scenarios );
  return res;
}

synthesis_result extended_min( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t P,
                               std::optional<std::size_t> C, synthesis_options const& opts )
{
  synthesis_result res;
  res.P = P;
  if ( !C )
  {
    auto b = basic_min( a, scenarios, opts );
    append( res.trail, b.trail );
    if ( !b.found() )
    {
      finish( res, scenarios );
      return res;
    }
    C = b.C;
  }
  res.C = *C;

  auto const tree = positive_tree::build( a, scenarios );
  synthesis_session s( a, extended_params( *C, P ), opts, "extended-min" );
  s.enc().encode_positive( tree );
  auto r = s.solve( res.trail, std::nullopt, std::nullopt );
  if ( !r.is_sat() )
  {
    finish( res, scenarios );
    return res;
  }
  auto best = s.enc().decode( r );
  s.enc().guard_size_counter( std::max<std::size_t>( best.guard_complexity(), 1 ) );
  while ( best.guard_complexity() > 0 )
  {
    auto const N = best.guard_complexity() - 1;
    s.enc().bound_guard_size( N );
    r = s.solve( res.trail, std::nullopt, N );
    if ( !r.is_sat() )
      break;
    best = s.enc().decode( r );
  }
  res.machine = std::move( best );
  finish( res, scenarios );
  return res;
}

synthesis_result extended_min_ub( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t w,
                                  synthesis_options const& opts )
{
  synthesis_result best;
  auto star = basic_min_star( a, scenarios, opts );
  append( best.trail, star.trail );
  if ( !star.found() )
  {
    finish( best, scenarios );
    return best;
  }
  auto const T_min = star.T;
  std::vector<solver_call> trail = best.trail;

  std::size_t plateau = 0;
  for ( std::size_t P = 1; P <= opts.max_guard_size; ++P )
  {
    if ( best.found() && P > best.N - std::min( best.N, T_min ) )
      break;
    auto r = extended_min( a, scenarios, P, star.C, opts );
    append( trail, r.trail );
    if ( !r.found() )
      continue;
    if ( !best.found() || r.N < best.N )
    {
      best = std::move( r );
      plateau = 0;
    }
    else
      ++plateau;
    if ( plateau >= w )
      break;
  }
  best.trail = std::move( trail );
  finish( best, scenarios );
  return best;
}

} // namespace efsm

#include <efsm/cegis.hpp>

#include <chrono>
#include <sstream>

namespace efsm
{

std::string to_string( cegis_iteration const& it )
{
  std::ostringstream os;
  os << "iteration " << it.index;
  if ( it.N_bound )
    os << " bound=" << *it.N_bound;
  os << ' ' << sat::to_string( it.verdict );
  if ( it.verdict == sat::verdict::sat )
    os << " C=" << it.C << " T=" << it.T << " N=" << it.N << " cex=" << it.counterexamples;
  os << " neg=" << it.negative_nodes << " solve=" << it.solver_seconds << " verify=" << it.verifier_seconds;
  return os.str();
}

namespace
{

encoding_params complete_params( std::size_t C, std::size_t P )
{
  encoding_params p;
  p.num_states = C;
  p.max_guard_size = P;
  p.encode_guards = true;
  return p;
}

/* state shared by successive CEGIS runs at different N bounds */
struct cegis_context
{
  alphabet const& a;
  std::vector<scenario> const& positives;
  positive_tree pos;
  std::vector<ltl::formula_ptr> const& spec;
  plant_model const& plant;
  cegis_options const& opts;
  negative_tree neg;
  cegis_result& res;

  /* true: verified machine stored in res; false: UNSAT at this bound */
  bool run( std::size_t C, std::size_t P, std::optional<std::size_t> N )
  {
    synthesis_session s( a, complete_params( C, P ), opts.synth, "cegis" );
    s.enc().encode_positive( pos );
    s.enc().encode_negative( neg, neg.everything() );
    if ( N )
      s.enc().bound_guard_size( *N );

    for ( ;; )
    {
      if ( res.iterations.size() >= opts.max_iterations )
        throw iteration_cap_exceeded( "no verified machine after " + std::to_string( opts.max_iterations ) +
                                      " iterations" );
      cegis_iteration it;
      it.index = res.iterations.size() + 1;
      it.N_bound = N;
      auto const r = s.solve( res.trail, std::nullopt, N, neg.size() - 1 );
      it.verdict = r.status;
      it.solver_seconds = res.trail.back().seconds;
      if ( !r.is_sat() )
      {
        it.negative_nodes = neg.size() - 1;
        log( it );
        return false;
      }

      auto m = s.enc().decode( r );
      recheck( m, positives );
      for ( auto const& old : res.negatives )
        if ( exhibits( m, old ) )
          throw std::logic_error( "candidate reproduces an excluded counterexample" );
      it.C = m.num_states();
      it.T = m.transition_count();
      it.N = m.guard_complexity();

      auto const start = std::chrono::steady_clock::now();
      auto const cexs = verify( m, plant, spec, opts.verify );
      it.verifier_seconds = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
      it.counterexamples = cexs.size();
      res.candidates.push_back( m );

      if ( cexs.empty() )
      {
        it.negative_nodes = neg.size() - 1;
        log( it );
        res.machine = std::move( m );
        return true;
      }

      bool grew = false;
      for ( auto const& c : cexs )
      {
        auto ns = c.to_negative();
        if ( !exhibits( m, ns ) )
          throw std::logic_error( "counterexample does not replay on its candidate" );
        auto const d = neg.add( ns );
        grew = grew || !d.empty();
        s.enc().encode_negative( neg, d );
        res.negatives.push_back( std::move( ns ) );
      }
      if ( !grew )
        throw std::logic_error( "counterexamples added nothing to the negative tree" );
      it.negative_nodes = neg.size() - 1;
      log( it );
    }
  }

  /* one unbounded solve: is anything left at all under the current negatives? */
  bool feasible_unbounded( std::size_t C, std::size_t P )
  {
    synthesis_session s( a, complete_params( C, P ), opts.synth, "cegis-unbounded" );
    s.enc().encode_positive( pos );
    s.enc().encode_negative( neg, neg.everything() );
    return s.solve( res.trail, std::nullopt, std::nullopt, neg.size() - 1 ).is_sat();
  }

  void log( cegis_iteration const& it )
  {
    res.iterations.push_back( it );
    if ( opts.on_iteration )
      opts.on_iteration( it );
  }
};

} // namespace

synthesis_result complete( alphabet const& a, std::vector<scenario> const& positives,
                           std::vector<negative_scenario> const& negatives, std::size_t C, std::size_t P,
                           std::optional<std::size_t> N, synthesis_options const& opts )
{
  auto const pos = positive_tree::build( a, positives );
  negative_tree neg( a );
  for ( auto const& n : negatives )
    neg.add( n );

  synthesis_result res;
  res.C = C;
  res.P = P;
  synthesis_session s( a, complete_params( C, P ), opts, "complete" );
  s.enc().encode_positive( pos );
  s.enc().encode_negative( neg, neg.everything() );
  if ( N )
    s.enc().bound_guard_size( *N );
  auto r = s.solve( res.trail, std::nullopt, N, neg.size() - 1 );
  if ( r.is_sat() )
  {
    auto m = s.enc().decode( r );
    recheck( m, positives );
    for ( auto const& n : negatives )
      if ( exhibits( m, n ) )
        throw std::logic_error( "machine exhibits a negative scenario" );
    res.T = m.transition_count();
    res.N = m.guard_complexity();
    res.machine = std::move( m );
  }
  res.solver_calls = res.trail.size();
  for ( auto const& c : res.trail )
    res.solver_seconds += c.seconds;
  return res;
}

cegis_result complete_cegis( alphabet const& a, std::vector<scenario> const& positives,
                             std::vector<ltl::formula_ptr> const& spec, plant_model const& plant, std::size_t C,
                             std::size_t P, std::optional<std::size_t> N, cegis_options const& opts )
{
  cegis_result res;
  res.C = C;
  res.P = P;
  res.N_bound = N;
  cegis_context ctx{ a, positives, positive_tree::build( a, positives ), spec, plant, opts, negative_tree( a ), res };
  ctx.run( C, P, N );
  return res;
}

cegis_result complete_star_cegis( alphabet const& a, std::vector<scenario> const& positives,
                                  std::vector<ltl::formula_ptr> const& spec, plant_model const& plant,
                                  cegis_options const& opts )
{
  cegis_result res;
  auto start = extended_min_ub( a, positives, opts.w, opts.synth );
  res.trail = start.trail;
  res.start = start;
  if ( !start.found() )
    return res;
  res.C = start.C;
  res.P = start.P;
  cegis_context ctx{ a, positives, positive_tree::build( a, positives ), spec, plant, opts, negative_tree( a ), res };
  ctx.run( res.C, res.P, std::nullopt );
  return res;
}

cegis_result complete_star_min_cegis( alphabet const& a, std::vector<scenario> const& positives,
                                      std::vector<ltl::formula_ptr> const& spec, plant_model const& plant,
                                      cegis_options const& opts )
{
  cegis_result res;
  auto start = extended_min_ub( a, positives, opts.w, opts.synth );
  res.trail = start.trail;
  res.start = start;
  if ( !start.found() )
    return res;
  res.C = start.C;
  res.P = start.P;

  encoding_params p = complete_params( res.C, res.P );
  p.max_transitions = opts.synth.max_transitions;
  auto const full = res.C * p.transitions_for( a ) * res.P;
  auto const ceiling = opts.n_ceiling.value_or( full );

  cegis_context ctx{ a, positives, positive_tree::build( a, positives ), spec, plant, opts, negative_tree( a ), res };
  for ( std::size_t N = start.N;; ++N )
  {
    res.N_bound = N;
    if ( ctx.run( res.C, res.P, N ) )
      return res;
    if ( N >= full )
      return res;
    if ( !ctx.feasible_unbounded( res.C, res.P ) )
      return res;
    if ( N >= ceiling )
      throw n_bound_exceeded( "no verified machine with total guard size up to " + std::to_string( ceiling ) );
  }
}

} // namespace efsm

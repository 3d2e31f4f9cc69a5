#include <efsm/eval.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <thread>

namespace efsm
{

void generator_config::validate() const
{
  if ( states == 0 )
    throw std::invalid_argument( "generator needs at least one state" );
  if ( input_events == 0 || output_events == 0 )
    throw std::invalid_argument( "generator needs input and output events" );
  if ( input_vars == 0 && transition_limit() > 0 )
    throw std::invalid_argument( "guards need at least one input variable" );
  if ( input_vars > 20 )
    throw std::invalid_argument( "too many input variables for truth-table checks" );
  if ( transition_limit() > states * states * input_events )
    throw std::invalid_argument( "transition limit exceeds states^2 * input events" );
}

std::size_t generator_config::transition_limit() const
{
  return max_transitions ? max_transitions : states * states * input_events;
}

alphabet generator_alphabet( generator_config const& cfg )
{
  std::vector<std::string> in, out;
  for ( std::size_t i = 1; i <= cfg.input_events; ++i )
    in.push_back( "I" + std::to_string( i ) );
  for ( std::size_t i = 1; i <= cfg.output_events; ++i )
    out.push_back( "O" + std::to_string( i ) );
  return alphabet::make( in, out, cfg.input_vars, cfg.output_vars );
}

namespace
{

std::size_t uniform( rng_type& rng, std::size_t lo, std::size_t hi )
{
  return std::uniform_int_distribution<std::size_t>( lo, hi )( rng );
}

guard_expr random_guard( rng_type& rng, std::size_t nx )
{
  auto const x = static_cast<std::uint32_t>( uniform( rng, 0, nx - 1 ) );
  if ( uniform( rng, 0, 1 ) == 0 )
    return guard_expr::terminal( x );
  if ( nx == 1 )
    return guard_expr::negate( guard_expr::terminal( x ) );
  auto y = static_cast<std::uint32_t>( uniform( rng, 0, nx - 2 ) );
  if ( y >= x )
    ++y;
  switch ( uniform( rng, 0, 2 ) )
  {
  case 0:
    return guard_expr::negate( guard_expr::terminal( x ) );
  case 1:
    return guard_expr::conjoin( guard_expr::terminal( x ), guard_expr::terminal( y ) );
  default:
    return guard_expr::disjoin( guard_expr::terminal( x ), guard_expr::terminal( y ) );
  }
}

std::vector<bool> truth_table( guard_expr const& g, std::size_t nx )
{
  std::vector<bool> t( std::size_t{ 1 } << nx );
  for ( std::size_t v = 0; v < t.size(); ++v )
  {
    bits u( nx );
    for ( std::size_t i = 0; i < nx; ++i )
      u[i] = ( v >> i ) & 1;
    t[v] = g.eval( u );
  }
  return t;
}

std::vector<bool> reachable( std::vector<state> const& states )
{
  std::vector<bool> seen( states.size(), false );
  std::vector<std::size_t> stack{ 0 };
  seen[0] = true;
  while ( !stack.empty() )
  {
    auto q = stack.back();
    stack.pop_back();
    for ( auto const& t : states[q].transitions )
      if ( !seen[t.dest] )
      {
        seen[t.dest] = true;
        stack.push_back( t.dest );
      }
  }
  return seen;
}

bits random_bits( rng_type& rng, std::size_t n )
{
  bits b( n );
  for ( std::size_t i = 0; i < n; ++i )
    b[i] = uniform( rng, 0, 1 ) == 1;
  return b;
}

} // namespace

automaton random_automaton( generator_config const& cfg, rng_type& rng )
{
  cfg.validate();
  auto const a = generator_alphabet( cfg );
  auto const C = cfg.states;
  auto const E = cfg.input_events;
  auto const per_state = C * E;
  auto const limit = cfg.transition_limit();
  auto const lo = std::min( C - 1, limit );

  for ( int attempt = 0; attempt < 100; ++attempt )
  {
    std::vector<state> states( C );
    std::vector<std::set<std::pair<event_id, std::vector<bool>>>> tables( C );
    auto const T = uniform( rng, lo, limit );

    auto try_add = [&]( std::size_t q, transition t ) {
      if ( states[q].transitions.size() >= per_state )
        return false;
      if ( !tables[q].insert( { t.input_event, truth_table( t.guard, cfg.input_vars ) } ).second )
        return false;
      states[q].transitions.push_back( std::move( t ) );
      return true;
    };

    std::size_t placed = 0;
    for ( std::size_t tries = 0; placed < T && tries < 100 * ( T + 1 ); ++tries )
    {
      auto const q = uniform( rng, 0, C - 1 );
      transition t{ uniform( rng, 0, C - 1 ), static_cast<event_id>( uniform( rng, 0, E - 1 ) ),
                    random_guard( rng, cfg.input_vars ) };
      if ( try_add( q, std::move( t ) ) )
        ++placed;
    }

    /* reconnect unreachable states by redirecting a transition of a reachable one */
    bool connected = true;
    for ( int fix = 0; fix < static_cast<int>( 4 * C ); ++fix )
    {
      auto const seen = reachable( states );
      std::vector<std::size_t> from, to;
      for ( std::size_t q = 0; q < C; ++q )
        ( seen[q] ? from : to ).push_back( q );
      if ( to.empty() )
        break;
      std::vector<std::pair<std::size_t, std::size_t>> candidates;
      for ( auto q : from )
        for ( std::size_t k = 0; k < states[q].transitions.size(); ++k )
          candidates.emplace_back( q, k );
      if ( candidates.empty() )
      {
        connected = false;
        break;
      }
      auto const [q, k] = candidates[uniform( rng, 0, candidates.size() - 1 )];
      states[q].transitions[k].dest = to[uniform( rng, 0, to.size() - 1 )];
    }
    auto const seen = reachable( states );
    if ( !connected || std::find( seen.begin(), seen.end(), false ) != seen.end() )
      continue;

    std::vector<bool> has_incoming( C, false );
    for ( auto const& s : states )
      for ( auto const& t : s.transitions )
        has_incoming[t.dest] = true;
    for ( std::size_t q = 0; q < C; ++q )
    {
      if ( !has_incoming[q] )
        states[q].output_event = epsilon;
      else
        states[q].output_event = static_cast<event_id>( uniform( rng, 0, cfg.output_events - 1 ) );
      for ( std::size_t z = 0; z < cfg.output_vars; ++z )
        states[q].algorithm.push_back( { uniform( rng, 0, 1 ) == 1, uniform( rng, 0, 1 ) == 1 } );
    }
    return automaton( a, std::move( states ) );
  }
  throw generation_failed( "no connected automaton after 100 attempts" );
}

std::vector<scenario> simulate( automaton const& m, std::size_t count, std::size_t length, rng_type& rng )
{
  auto const& a = m.alphabet();
  std::vector<scenario> out;
  for ( std::size_t i = 0; i < count; ++i )
  {
    scenario s;
    std::size_t q = 0;
    bits z = zero_bits( a.num_output_vars() );
    for ( std::size_t j = 0; j < length; ++j )
    {
      input_action in{ static_cast<event_id>( uniform( rng, 0, a.input_events.size() - 1 ) ),
                       random_bits( rng, a.num_input_vars() ) };
      auto r = m.step( q, z, in );
      q = r.state;
      z = r.out.output;
      s.push_back( { std::move( in ), std::move( r.out ) } );
    }
    out.push_back( std::move( s ) );
  }
  return out;
}

double forward_check( automaton const& candidate, std::vector<scenario> const& validation )
{
  if ( validation.empty() )
    throw std::invalid_argument( "empty validation set" );
  std::size_t ok = 0;
  for ( auto const& s : validation )
    ok += candidate.satisfies( s ) ? 1 : 0;
  return 100.0 * static_cast<double>( ok ) / static_cast<double>( validation.size() );
}

void experiment_report::aggregate()
{
  mean_seconds = stddev_seconds = mean_p = 0.0;
  full = failed = 0;
  std::size_t ok = 0;
  for ( auto const& r : rows )
  {
    mean_p += r.p;
    if ( r.p == 100.0 )
      ++full;
    if ( r.status != "ok" )
    {
      ++failed;
      continue;
    }
    ++ok;
    mean_seconds += r.seconds;
  }
  if ( !rows.empty() )
    mean_p /= static_cast<double>( rows.size() );
  if ( ok == 0 )
    return;
  mean_seconds /= static_cast<double>( ok );
  for ( auto const& r : rows )
    if ( r.status == "ok" )
      stddev_seconds += ( r.seconds - mean_seconds ) * ( r.seconds - mean_seconds );
  stddev_seconds = std::sqrt( stddev_seconds / static_cast<double>( ok ) );
}

synthesis_result infer_for_study( alphabet const& a, std::vector<scenario> const& train, std::size_t P,
                                  std::size_t max_C, synthesis_options const& opts )
{
  auto b = basic_min( a, train, opts );
  if ( !b.found() )
    return b;
  for ( auto C = b.C;; ++C )
  {
    auto r = extended_min( a, train, P, C, opts );
    if ( r.found() || C >= max_C )
      return r;
  }
}

experiment_report run_study( experiment_config const& cfg )
{
  cfg.generator.validate();
  if ( cfg.train_count == 0 || cfg.train_length == 0 || cfg.valid_count == 0 || cfg.valid_length == 0 )
    throw std::invalid_argument( "scenario counts and lengths must be positive" );
  auto const a = generator_alphabet( cfg.generator );

  experiment_report rep;
  rep.config = cfg;
  rep.rows.resize( cfg.repetitions );

  auto run_one = [&]( std::size_t i ) {
    auto& row = rep.rows[i];
    row.repetition = i;
    try
    {
      std::seed_seq seq{ static_cast<std::uint32_t>( cfg.seed ), static_cast<std::uint32_t>( cfg.seed >> 32 ),
                         static_cast<std::uint32_t>( i ) };
      rng_type rng( seq );
      auto const truth = random_automaton( cfg.generator, rng );
      row.true_C = truth.num_states();
      row.true_T = truth.transition_count();
      auto const train = simulate( truth, cfg.train_count, cfg.train_length, rng );
      auto const valid = simulate( truth, cfg.valid_count, cfg.valid_length, rng );

      auto const start = std::chrono::steady_clock::now();
      auto const r = infer_for_study( a, train, cfg.P, std::max( truth.num_states(), cfg.generator.states ), cfg.synth );
      row.seconds = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
      if ( !r.found() )
      {
        row.status = "unsat";
        return;
      }
      row.status = "ok";
      row.C = r.C;
      row.P = r.P;
      row.T = r.T;
      row.N = r.N;
      row.p = forward_check( *r.machine, valid );
    }
    catch ( std::exception const& e )
    {
      row.status = std::string( "error: " ) + e.what();
      row.p = 0.0;
    }
  };

  auto threads = cfg.threads ? cfg.threads : std::max( 1u, std::thread::hardware_concurrency() );
  threads = std::min<std::size_t>( threads, cfg.repetitions );
  std::atomic<std::size_t> next{ 0 };
  std::vector<std::thread> pool;
  for ( std::size_t t = 0; t < threads; ++t )
    pool.emplace_back( [&] {
      for ( std::size_t i; ( i = next++ ) < cfg.repetitions; )
        run_one( i );
    } );
  for ( auto& t : pool )
    t.join();

  rep.aggregate();
  return rep;
}

namespace
{

std::string csv_field( std::string const& s )
{
  if ( s.find_first_of( ",\"\n" ) == std::string::npos )
    return s;
  std::string out = "\"";
  for ( auto c : s )
  {
    if ( c == '"' )
      out += '"';
    out += c;
  }
  return out + '"';
}

} // namespace

void write_csv( std::ostream& os, experiment_report const& r, bool with_times )
{
  os << "repetition,true_C,true_T,status,C,P,T,N," << ( with_times ? "seconds," : "" ) << "p\n";
  for ( auto const& row : r.rows )
  {
    os << row.repetition << ',' << row.true_C << ',' << row.true_T << ',' << csv_field( row.status ) << ',' << row.C
       << ',' << row.P << ',' << row.T << ',' << row.N << ',';
    if ( with_times )
      os << std::fixed << std::setprecision( 3 ) << row.seconds << ',';
    os << std::fixed << std::setprecision( 1 ) << row.p << '\n';
  }
}

void write_summary( std::ostream& os, experiment_report const& r )
{
  auto const& c = r.config;
  auto const& g = c.generator;
  os << "# seed=" << c.seed << " C_true=" << g.states << " T_max=" << g.transition_limit() << " |Z|=" << g.output_vars
     << " events=" << g.input_events << '/' << g.output_events << " P=" << c.P << " validation=" << c.valid_count << 'x'
     << c.valid_length << " repetitions=" << c.repetitions << " failed=" << r.failed << '\n';
  os << "# generator: half single terminals, rest negations or two-variable and/or; "
        "unreachable states reconnected by redirecting a transition\n";
  os << "|S|\t|s|\t|X|\tt\tsigma\tp\t100%p\n";
  os << c.train_count << '\t' << c.train_length << '\t' << g.input_vars << '\t' << std::fixed << std::setprecision( 3 )
     << r.mean_seconds << '\t' << r.stddev_seconds << '\t' << std::setprecision( 1 ) << r.mean_p << '\t' << r.full
     << '\n';
}

} // namespace efsm

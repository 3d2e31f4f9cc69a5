/* One line per acceptance criterion; exit status 0 iff all pass. */

#include "fixtures.hpp"

#include <efsm/cardinality.hpp>
#include <efsm/cegis.hpp>
#include <efsm/eval.hpp>

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace efsm;

namespace
{

struct outcome
{
  bool pass = true;
  std::ostringstream detail;

  void require( bool ok, std::string const& what )
  {
    if ( !ok && pass )
    {
      pass = false;
      detail << "FAILED: " << what << "; ";
    }
  }
};

using clock_type = std::chrono::steady_clock;

double since( clock_type::time_point t )
{
  return std::chrono::duration<double>( clock_type::now() - t ).count();
}

/* ---------- shared instance corpus ---------- */

struct instance
{
  automaton truth;
  std::vector<scenario> scenarios;
};

instance random_instance( rng_type& rng, std::size_t max_C, std::size_t max_X, std::size_t max_Z,
                          std::size_t max_events, std::size_t max_count, std::size_t max_length )
{
  auto pick = [&]( std::size_t lo, std::size_t hi ) { return std::uniform_int_distribution<std::size_t>( lo, hi )( rng ); };
  generator_config g;
  g.states = pick( 1, max_C );
  g.input_vars = pick( 1, max_X );
  g.output_vars = pick( 1, max_Z );
  g.input_events = pick( 1, max_events );
  g.output_events = pick( 1, 2 );
  auto truth = random_automaton( g, rng );
  auto ss = simulate( truth, pick( 2, max_count ), pick( 3, max_length ), rng );
  return { std::move( truth ), std::move( ss ) };
}

std::vector<instance> const& round_trip_corpus()
{
  static std::vector<instance> corpus = [] {
    rng_type rng( 2024 );
    std::vector<instance> c;
    for ( int i = 0; i < 200; ++i )
      c.push_back( random_instance( rng, 4, 3, 2, 2, 8, 15 ) );
    return c;
  }();
  return corpus;
}

/* ---------- 1 ---------- */

outcome worked_example()
{
  outcome o;
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();
  auto const start = clock_type::now();

  auto const r = basic_min( a, ss );
  o.require( r.found() && r.C == 2, "basic_min C = 2" );
  o.require( r.trail.size() >= 2 && r.trail[r.trail.size() - 2].C == 1 &&
                 r.trail[r.trail.size() - 2].verdict == sat::verdict::unsat,
             "UNSAT certificate at C = 1" );
  o.require( r.found() && test::satisfies_all( *r.machine, ss ), "replay on all three scenarios" );
  auto const solve_time = since( start );

  /* brute force: no 1-state machine, some 2-state machine */
  std::size_t found1 = 0, found2 = 0;
  test::enumerate_machines( a, 1, 2, test::terminal_guards( 2 ), [&]( automaton const& m ) {
    found1 += test::satisfies_all( m, ss );
    return true;
  } );
  test::enumerate_machines( a, 2, 2, test::terminal_guards( 2 ), [&]( automaton const& m ) {
    found2 += test::satisfies_all( m, ss );
    return true;
  } );
  o.require( found1 == 0 && found2 > 0, "brute-force C_min = 2" );
  o.require( solve_time < 5.0, "runtime < 5 s" );
  o.detail << "C_min=" << r.C << " brute-force witnesses C=1:" << found1 << " C=2:" << found2
           << " synthesis " << std::fixed << std::setprecision( 3 ) << solve_time << "s";
  return o;
}

/* ---------- 2 ---------- */

/* smallest N over every useful P at fixed C */
std::optional<std::size_t> p_sweep_oracle( alphabet const& a, std::vector<scenario> const& ss, std::size_t C )
{
  std::optional<std::size_t> best;
  for ( std::size_t P = 1; P <= 12; ++P )
  {
    /* a single guard larger than the best total cannot improve on it */
    if ( best && P > *best )
      break;
    auto const r = extended_min( a, ss, P, C );
    if ( r.found() && ( !best || r.N < *best ) )
      best = r.N;
  }
  return best;
}

outcome guard_minimality()
{
  outcome o;
  auto const start = clock_type::now();
  auto const a = test::example_alphabet();
  auto const ss = test::example_scenarios();

  auto const r = extended_min( a, ss, 1 );
  o.require( r.found() && r.N == 3, "extended_min(P=1) N = 3" );
  o.require( !r.trail.empty() && r.trail.back().verdict == sat::verdict::unsat && r.trail.back().N == r.N - 1,
             "UNSAT at N_min - 1" );
  auto const inf = extended_min_ub( a, ss, unbounded_width );
  auto const zero = extended_min_ub( a, ss, 0 );
  o.require( inf.found() && zero.found() && inf.N <= zero.N, "w=inf N <= w=0 N" );

  rng_type rng( 77 );
  std::size_t matched = 0;
  for ( int i = 0; i < 20; ++i )
  {
    auto const inst = random_instance( rng, 3, 3, 1, 1, 6, 10 );
    auto const& alpha = inst.truth.alphabet();
    auto const ub = extended_min_ub( alpha, inst.scenarios, unbounded_width );
    auto const oracle = p_sweep_oracle( alpha, inst.scenarios, ub.C );
    bool const same = ub.found() && oracle && ub.N == *oracle;
    matched += same;
    if ( !same )
      o.require( false, "instance " + std::to_string( i ) + " ub N=" + std::to_string( ub.N ) + " oracle N=" +
                            ( oracle ? std::to_string( *oracle ) : "none" ) );
  }
  auto const t = since( start );
  o.require( t < 120.0, "runtime < 2 min" );
  o.detail << "example N_min=" << r.N << " ub(w=inf)=" << inf.N << " ub(w=0)=" << zero.N << "; random " << matched
           << "/20 match the P sweep; " << std::fixed << std::setprecision( 1 ) << t << "s";
  return o;
}

/* ---------- 3 and 9 ---------- */

synthesis_result corpus_synthesis( instance const& inst, synthesis_options const& opts )
{
  return infer_for_study( inst.truth.alphabet(), inst.scenarios, 3, inst.truth.num_states(), opts );
}

outcome encoding_soundness()
{
  outcome o;
  auto const start = clock_type::now();
  std::size_t sat_models = 0, satisfied = 0, mismatches = 0, within_truth = 0;
  for ( auto const& inst : round_trip_corpus() )
  {
    try
    {
      auto const r = corpus_synthesis( inst, {} );
      if ( !r.found() )
        continue;
      ++sat_models;
      satisfied += test::satisfies_all( *r.machine, inst.scenarios );
      within_truth += r.C <= inst.truth.num_states();
    }
    catch ( decode_mismatch const& )
    {
      ++mismatches;
    }
  }
  o.require( sat_models == 200, "every instance SAT (the source machine is a witness)" );
  o.require( satisfied == sat_models, "decoded machines satisfy all training scenarios" );
  o.require( mismatches == 0, "zero decode mismatches" );
  o.require( within_truth == sat_models, "inferred C <= source C" );
  o.detail << sat_models << "/200 SAT, " << satisfied << " replay 100%, " << mismatches << " decode mismatches; "
           << std::fixed << std::setprecision( 1 ) << since( start ) << "s";
  return o;
}

outcome backend_equivalence()
{
  outcome o;
  auto const start = clock_type::now();
  synthesis_options dimacs;
  dimacs.factory = sat::dimacs_factory( { EFSM_CADICAL_CLI, {}, false } );
  std::size_t same = 0;
  for ( auto const& inst : round_trip_corpus() )
  {
    auto const x = corpus_synthesis( inst, {} );
    auto const y = corpus_synthesis( inst, dimacs );
    bool const eq = x.found() == y.found() && x.C == y.C && x.N == y.N;
    same += eq;
  }
  o.require( same == 200, "N_min identical on every instance" );
  o.detail << same << "/200 identical (C, N_min) across incremental and DIMACS process backends; " << std::fixed
           << std::setprecision( 1 ) << since( start ) << "s";
  return o;
}

/* ---------- 4 ---------- */

outcome symmetry_invariance()
{
  outcome o;
  auto const start = clock_type::now();
  rng_type rng( 4242 );
  synthesis_options off;
  off.state_bfs = false;
  off.tree_bfs = false;
  std::size_t same = 0;
  for ( int i = 0; i < 50; ++i )
  {
    auto const inst = random_instance( rng, 4, 3, 2, 2, 6, 10 );
    auto const& a = inst.truth.alphabet();
    auto const c_on = basic_min( a, inst.scenarios );
    auto const c_off = basic_min( a, inst.scenarios, off );
    auto const n_on = extended_min( a, inst.scenarios, 2, c_on.C );
    auto const n_off = extended_min( a, inst.scenarios, 2, c_on.C, off );
    bool const eq = c_on.C == c_off.C && n_on.found() == n_off.found() && n_on.N == n_off.N;
    same += eq;
  }
  o.require( same == 50, "C_min and N_min unchanged by symmetry breaking" );
  o.detail << same << "/50 instances agree; " << std::fixed << std::setprecision( 1 ) << since( start ) << "s";
  return o;
}

/* ---------- 5 ---------- */

outcome totalizer_correctness()
{
  outcome o;
  std::mt19937 rng( 5 );
  std::size_t good = 0;
  for ( int round = 0; round < 1000; ++round )
  {
    auto s = sat::make_incremental_solver();
    std::size_t const n = 1 + rng() % 64;
    std::vector<sat::lit> in;
    for ( std::size_t i = 0; i < n; ++i )
      in.push_back( sat::lit::pos( s->new_variable() ) );
    totalizer t( *s, in );
    std::vector<sat::lit> assume;
    std::size_t pop = 0;
    for ( auto l : in )
    {
      bool const v = rng() % 2;
      pop += v;
      assume.push_back( v ? l : ~l );
    }
    auto r = s->solve( assume );
    bool ok = r.is_sat();
    for ( std::size_t i = 1; ok && i <= n; ++i )
      ok = r.value( t.output( i ) ) == ( i <= pop );
    std::size_t const k = rng() % ( n + 1 );
    t.bound( k );
    ok = ok && s->solve( assume ).is_sat() == ( pop <= k );
    good += ok;
  }
  o.require( good == 1000, "unary sum and bound agree with popcount" );
  o.detail << good << "/1000 vectors";
  return o;
}

/* ---------- 6 ---------- */

/* nonempty iff a nontrivial SCC holds an accepting node (Tarjan) */
bool tarjan_nonempty( product_graph const& g )
{
  auto const n = g.successors.size();
  std::vector<std::size_t> index( n, SIZE_MAX ), low( n, 0 ), stack;
  std::vector<bool> on( n, false );
  std::size_t counter = 0;
  bool found = false;
  struct frame
  {
    std::size_t v, next;
  };
  for ( std::size_t root = 0; root < n && !found; ++root )
  {
    if ( index[root] != SIZE_MAX )
      continue;
    std::vector<frame> call{ { root, 0 } };
    index[root] = low[root] = counter++;
    stack.push_back( root );
    on[root] = true;
    while ( !call.empty() )
    {
      auto& f = call.back();
      if ( f.next < g.successors[f.v].size() )
      {
        auto const w = g.successors[f.v][f.next++];
        if ( index[w] == SIZE_MAX )
        {
          index[w] = low[w] = counter++;
          stack.push_back( w );
          on[w] = true;
          call.push_back( { w, 0 } );
        }
        else if ( on[w] )
          low[f.v] = std::min( low[f.v], index[w] );
        continue;
      }
      auto const v = f.v;
      call.pop_back();
      if ( !call.empty() )
        low[call.back().v] = std::min( low[call.back().v], low[v] );
      if ( low[v] != index[v] )
        continue;
      std::vector<std::size_t> scc;
      std::size_t w;
      do
      {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        scc.push_back( w );
      } while ( w != v );
      bool cyclic = scc.size() > 1;
      for ( auto x : g.successors[v] )
        cyclic = cyclic || x == v;
      if ( cyclic )
        for ( auto x : scc )
          found = found || g.accepting[x];
    }
  }
  return found;
}

automaton general_random_machine( std::mt19937& rng, alphabet const& a )
{
  auto const C = 1 + rng() % 4;
  std::vector<state> states( C );
  auto leaf = [&] {
    auto t = guard_expr::terminal( static_cast<std::uint32_t>( rng() % a.num_input_vars() ) );
    return rng() % 2 ? guard_expr::negate( t ) : t;
  };
  for ( auto& s : states )
  {
    s.output_event = static_cast<event_id>( rng() % ( a.output_events.size() + 1 ) ) - 1;
    for ( std::size_t z = 0; z < a.num_output_vars(); ++z )
      s.algorithm.push_back( { rng() % 2 == 0, rng() % 2 == 0 } );
    for ( auto k = rng() % 3; k > 0; --k )
    {
      auto g = rng() % 3 == 0 ? leaf() : rng() % 2 ? guard_expr::conjoin( leaf(), leaf() ) : guard_expr::disjoin( leaf(), leaf() );
      s.transitions.push_back( { rng() % C, static_cast<event_id>( rng() % a.input_events.size() ), g } );
    }
  }
  return automaton( a, std::move( states ) );
}

ltl::formula_ptr random_formula( std::mt19937& rng, std::size_t d )
{
  using ltl::op;
  auto leaf = [&]() -> ltl::formula_ptr {
    switch ( rng() % 4 )
    {
    case 0:
      return ltl::formula::make_atom( { ltl::atom::kind::in_var, static_cast<int>( rng() % 2 ) } );
    case 1:
      return ltl::formula::make_atom( { ltl::atom::kind::out_var, 0 } );
    case 2:
      return ltl::formula::make_atom( { ltl::atom::kind::out_event, static_cast<int>( rng() % 3 ) - 1 } );
    default:
      return ltl::formula::make_atom( { ltl::atom::kind::in_event, static_cast<int>( rng() % 2 ) } );
    }
  };
  if ( d == 0 || rng() % 4 == 0 )
    return leaf();
  static constexpr op unary[] = { op::negation, op::next, op::globally, op::finally };
  static constexpr op binary[] = { op::conjunction, op::disjunction, op::implication, op::until, op::release };
  if ( rng() % 2 )
    return ltl::formula::make( unary[rng() % 4], random_formula( rng, d - 1 ) );
  return ltl::formula::make( binary[rng() % 5], random_formula( rng, d - 1 ), random_formula( rng, d - 1 ) );
}

outcome verifier_correctness()
{
  outcome o;
  auto const start = clock_type::now();
  auto const a = alphabet::make( { "R", "S" }, { "A", "B" }, 2, 1 );
  auto const free = plant_model::free( a );
  std::mt19937 rng( 606 );
  std::size_t agree = 0, cex_count = 0, cex_valid = 0;
  for ( int i = 0; i < 200; ++i )
  {
    auto const m = general_random_machine( rng, a );
    auto const phi = random_formula( rng, 3 );
    auto const oracle =
        tarjan_nonempty( explore_product( m, free, ltl::to_buchi( ltl::formula::make( ltl::op::negation, phi ) ) ) );
    auto const cex = check( m, free, phi );
    agree += cex.has_value() == oracle;
    if ( !cex )
      continue;
    ++cex_count;
    std::vector<input_action> inputs;
    for ( auto const& s : cex->trace )
      inputs.push_back( s.in );
    bool ok = replay( m, inputs ) == cex->trace;
    if ( cex->loop_start )
      ok = ok && *cex->loop_start < cex->trace.size() && !ltl::holds_on_lasso( *phi, cex->trace, *cex->loop_start );
    else
      ok = ok && phi->type == ltl::op::globally && !ltl::holds( *phi->lhs, cex->trace.back() );
    cex_valid += ok;
  }
  o.require( agree == 200, "verdicts agree with the SCC oracle" );
  o.require( cex_valid == cex_count, "counterexamples violate their formula" );

  /* the lamp-style example: q0 silent; q1, q2, q3 emit A; q4 emits B */
  auto const b = alphabet::make( { "R" }, { "A", "B" }, 1, 0 );
  auto const x = guard_expr::terminal( 0 );
  automaton fig( b, { state{ epsilon, {}, { { 1, 0, x } } }, state{ 0, {}, { { 2, 0, x } } },
                      state{ 0, {}, { { 3, 0, guard_expr::negate( x ) }, { 4, 0, x } } },
                      state{ 0, {}, { { 1, 0, x } } }, state{ 1, {}, {} } } );
  auto emit = []( bool v ) { return input_action{ 0, bits{ v } }; };
  plant_model ones( b, 1, 0, { { 0, std::nullopt, "", 0, emit( true ) } } );
  plant_model cycle( b, 3, 0,
                     { { 0, std::nullopt, "", 1, emit( true ) }, { 1, std::nullopt, "", 2, emit( true ) },
                       { 2, std::nullopt, "", 0, emit( false ) } } );
  auto const safety = check( fig, ones, ltl::parse( "G out!=B", b ) );
  o.require( safety && !safety->loop_start && safety->trace.size() == 3 && safety->trace.back().out.event == 1,
             "loopless counterexample for G(out != B)" );
  auto const liveness = check( fig, cycle, ltl::parse( "F out=B", b ) );
  o.require( liveness && liveness->loop_start == 1u, "looping counterexample with loop start 1 for F(out = B)" );

  o.detail << agree << "/200 verdicts agree, " << cex_valid << "/" << cex_count
           << " counterexamples violate under lasso semantics; G(out!=B) cex length "
           << ( safety ? safety->trace.size() : 0 ) << " loopless, F(out=B) cex loop start "
           << ( liveness && liveness->loop_start ? std::to_string( *liveness->loop_start ) : "none" ) << "; "
           << std::fixed << std::setprecision( 1 ) << since( start ) << "s";
  return o;
}

/* ---------- 7 ---------- */

struct toy
{
  alphabet alpha;
  std::vector<scenario> scenarios;
  std::vector<ltl::formula_ptr> spec;
};

/* random toy whose spec the scenario-only machine violates but some machine
   at the estimated (C*, P*) satisfies (witnessed by the N-unbounded run) */
std::optional<toy> make_toy( rng_type& rng )
{
  auto const inst = random_instance( rng, 3, 2, 1, 2, 4, 6 );
  auto const& a = inst.truth.alphabet();
  std::vector<std::string> props{ "x1", "!x1", "in=I1" };
  if ( a.num_input_vars() > 1 )
    props.insert( props.end(), { "x2", "x1 & x2" } );
  std::vector<std::string> templates{ "G (%p -> out=.)", "G (%p -> out=O1)", "G (%p -> X out=.)",
                                      "G (out=O1 -> z1)", "G (%p -> F out=O1)", "G F out=.",
                                      "G (out=O1 -> X out!=O1)" };
  auto pick = [&]( std::size_t n ) { return std::uniform_int_distribution<std::size_t>( 0, n - 1 )( rng ); };
  auto text = templates[pick( templates.size() )];
  if ( auto p = text.find( "%p" ); p != std::string::npos )
    text.replace( p, 2, props[pick( props.size() )] );
  toy t{ a, inst.scenarios, { ltl::parse( text, a ) } };

  auto const ub = extended_min_ub( a, t.scenarios );
  if ( !ub.found() || verify( *ub.machine, plant_model::free( a ), t.spec ).empty() )
    return std::nullopt;
  cegis_options co;
  co.max_iterations = 200;
  try
  {
    if ( !complete_star_cegis( a, t.scenarios, t.spec, plant_model::free( a ), co ).found() )
      return std::nullopt;
  }
  catch ( iteration_cap_exceeded const& )
  {
    return std::nullopt;
  }
  return t;
}

outcome cegis_soundness()
{
  outcome o;
  auto const start = clock_type::now();
  rng_type rng( 7070 );
  std::size_t solved = 0, toys = 0, total_iterations = 0, attempts = 0;
  bool progress = true;
  while ( toys < 20 && attempts < 2000 )
  {
    ++attempts;
    auto const t = make_toy( rng );
    if ( !t )
      continue;
    ++toys;
    auto const plant = plant_model::free( t->alpha );
    auto const r = complete_star_min_cegis( t->alpha, t->scenarios, t->spec, plant );
    if ( !r.found() )
      continue;
    bool ok = test::satisfies_all( *r.machine, t->scenarios ) && verify( *r.machine, plant, t->spec ).empty();
    solved += ok;
    total_iterations += r.iterations.size();

    /* candidate i never exhibits a counterexample recorded before it */
    std::size_t excluded = 0, candidate = 0;
    for ( auto const& it : r.iterations )
    {
      if ( it.verdict != sat::verdict::sat )
        continue;
      for ( std::size_t j = 0; j < excluded; ++j )
        progress = progress && !exhibits( r.candidates[candidate], r.negatives[j] );
      excluded += it.counterexamples;
      ++candidate;
    }
  }
  o.require( toys == 20, "20 qualifying toy instances" );
  o.require( solved == toys, "every toy ends with a verified machine" );
  o.require( progress, "no candidate reproduces an excluded counterexample" );

  auto const a = test::example_alphabet();
  std::vector<ltl::formula_ptr> contra{ ltl::parse( "G out!=B", a ), ltl::parse( "F out=B", a ) };
  auto const c = complete_star_min_cegis( a, test::example_scenarios(), contra, plant_model::free( a ) );
  o.require( !c.found() && !c.iterations.empty() && c.iterations.back().verdict == sat::verdict::unsat,
             "contradictory spec ends UNSAT" );
  auto const t = since( start );
  o.require( t < 300.0, "runtime < 5 min" );
  o.detail << solved << "/" << toys << " toys verified (" << total_iterations << " iterations, " << attempts
           << " draws); contradictory pair " << ( c.found() ? "SAT" : "UNSAT" ) << "; " << std::fixed
           << std::setprecision( 1 ) << t << "s";
  return o;
}

/* ---------- 8 ---------- */

outcome random_automata_study()
{
  outcome o;
  auto const start = clock_type::now();
  experiment_config cfg;
  cfg.generator.states = 4;
  cfg.generator.input_vars = 4;
  cfg.generator.output_vars = 3;
  cfg.valid_count = 100;
  cfg.valid_length = 50;
  cfg.repetitions = 10;
  cfg.seed = 8;
  cfg.P = 3;

  std::vector<double> means;
  std::size_t failed = 0;
  for ( auto [count, length] : { std::pair{ 5u, 10u }, std::pair{ 20u, 30u }, std::pair{ 50u, 50u } } )
  {
    cfg.train_count = count;
    cfg.train_length = length;
    auto const r = run_study( cfg );
    means.push_back( r.mean_p );
    failed += r.failed;
    o.detail << count << "x" << length << ": p=" << std::fixed << std::setprecision( 1 ) << r.mean_p
             << " t=" << std::setprecision( 2 ) << r.mean_seconds << "s 100%p=" << r.full << "/" << r.rows.size()
             << "; ";
  }
  o.require( failed == 0, "no failed repetitions" );
  o.require( means[1] >= 95.0, "mean p >= 95 at 20x30" );
  o.require( means[0] <= means[1] && means[1] <= means[2], "mean p non-decreasing over training shapes" );
  auto const t = since( start );
  o.require( t < 900.0, "runtime < 15 min" );
  o.detail << std::fixed << std::setprecision( 1 ) << t << "s";
  return o;
}

} // namespace

int main( int argc, char** argv )
{
  std::vector<std::pair<int, std::function<outcome()>>> criteria{
      { 1, worked_example },        { 2, guard_minimality },     { 3, encoding_soundness },
      { 4, symmetry_invariance },   { 5, totalizer_correctness }, { 6, verifier_correctness },
      { 7, cegis_soundness },       { 8, random_automata_study }, { 9, backend_equivalence } };

  /* optional list of criterion numbers to run */
  std::vector<int> only;
  for ( int i = 1; i < argc; ++i )
    only.push_back( std::atoi( argv[i] ) );

  bool all = true;
  for ( auto const& [n, run] : criteria )
  {
    if ( !only.empty() && std::find( only.begin(), only.end(), n ) == only.end() )
      continue;
    outcome o;
    try
    {
      o = run();
    }
    catch ( std::exception const& e )
    {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << ( o.pass ? "PASS" : "FAIL" ) << " - " << o.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}

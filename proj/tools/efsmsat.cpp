#include <efsm/cegis.hpp>
#include <efsm/eval.hpp>
#include <efsm/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace efsm;

namespace
{

enum exit_code
{
  ok = 0,
  no_solution = 1,
  usage = 2,
  failure = 3
};

/* a usage problem found after option parsing */
struct usage_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct common_flags
{
  std::string solver;
  double timeout = 0.0;
  std::string out;
  std::string format;
  bool verbose = false;
  bool no_symmetry = false;
  std::string trail;
};

synthesis_options synth_options( common_flags const& f )
{
  synthesis_options o;
  std::optional<std::string> path;
  if ( !f.solver.empty() && f.solver != "incremental" )
    path = f.solver;
  else if ( f.solver.empty() )
    path = sat::external_solver_from_env();
  if ( path )
    o.factory = sat::dimacs_factory( { *path, {}, false } );
  if ( f.timeout > 0 )
    o.timeout = std::chrono::duration<double>( f.timeout );
  o.state_bfs = o.tree_bfs = !f.no_symmetry;
  if ( f.verbose )
    o.on_call = []( solver_call const& c ) { std::cerr << to_string( c ) << '\n'; };
  return o;
}

void emit( common_flags const& f, std::string const& text )
{
  if ( f.out.empty() || f.out == "-" )
    std::cout << text;
  else
    io::write_file( f.out, text );
}

std::string machine_text( automaton const& m, common_flags const& f )
{
  auto format = f.format;
  if ( format.empty() )
  {
    auto const ext = std::filesystem::path( f.out ).extension().string();
    format = ext == ".dot" ? "dot" : ext == ".json" ? "json" : "text";
  }
  if ( format == "dot" )
    return io::to_dot( m );
  if ( format == "json" )
    return io::to_json( m );
  if ( format == "text" )
    return io::to_text( m );
  throw usage_error( "unknown format '" + format + "'" );
}

void write_trail_file( common_flags const& f, std::vector<solver_call> const& trail )
{
  if ( f.trail.empty() )
    return;
  std::ostringstream os;
  write_trail( os, trail );
  io::write_file( f.trail, os.str() );
}

std::pair<std::size_t, std::size_t> shape( std::string const& s )
{
  auto const x = s.find( 'x' );
  try
  {
    if ( x == std::string::npos )
      throw std::invalid_argument( s );
    std::size_t a = 0, b = 0;
    a = std::stoul( s.substr( 0, x ) );
    b = std::stoul( s.substr( x + 1 ) );
    if ( a == 0 || b == 0 )
      throw std::invalid_argument( s );
    return { a, b };
  }
  catch ( std::logic_error const& )
  {
    throw usage_error( "shape must look like 20x30, got '" + s + "'" );
  }
}

struct infer_flags
{
  std::string method;
  std::string scenarios;
  std::string ltl;
  std::string plant;
  std::optional<std::size_t> C, K, P, N, n_ceiling;
  std::size_t w = 2;
  bool w_unbounded = false;
  std::size_t max_iterations = 1000;
};

int run_infer( infer_flags const& i, common_flags const& f )
{
  auto const file = io::parse_scenarios( io::read_file( i.scenarios ) );
  auto const& a = file.alpha;
  auto opts = synth_options( f );
  if ( i.K )
    opts.max_transitions = *i.K;
  auto const w = i.w_unbounded ? unbounded_width : i.w;
  auto const cegis = i.method == "complete-cegis" || i.method == "complete-min-cegis";

  std::cerr << "# infer " << i.method << " scenarios=" << i.scenarios << " positives=" << file.positives.size()
            << " negatives=" << file.negatives.size() << " C=" << ( i.C ? std::to_string( *i.C ) : "auto" )
            << " K=" << ( i.K ? std::to_string( *i.K ) : "C*|EI|" ) << " P=" << ( i.P ? std::to_string( *i.P ) : "auto" )
            << " N=" << ( i.N ? std::to_string( *i.N ) : "none" ) << " w=" << ( i.w_unbounded ? "inf" : std::to_string( i.w ) )
            << " solver=" << ( f.solver.empty() ? "default" : f.solver ) << " timeout=" << f.timeout << '\n';

  if ( !file.negatives.empty() && i.method != "complete" )
    throw usage_error( "negative scenarios need method 'complete'" );
  if ( cegis != !i.ltl.empty() )
    throw usage_error( cegis ? "--ltl is required for CEGIS methods" : "--ltl is only used by CEGIS methods" );

  std::optional<automaton> m;
  std::vector<solver_call> trail;
  std::string stats;
  if ( cegis )
  {
    auto const spec = io::parse_ltl( io::read_file( i.ltl ), a );
    auto const plant = i.plant.empty() ? plant_model::free( a ) : io::parse_plant( io::read_file( i.plant ), a );
    cegis_options co;
    co.synth = opts;
    co.w = w;
    co.max_iterations = i.max_iterations;
    co.n_ceiling = i.n_ceiling;
    if ( f.verbose )
      co.on_iteration = []( cegis_iteration const& it ) { std::cerr << to_string( it ) << '\n'; };
    cegis_result r;
    if ( i.method == "complete-cegis" && i.C && i.P )
      r = complete_cegis( a, file.positives, spec, plant, *i.C, *i.P, i.N, co );
    else if ( i.method == "complete-cegis" )
    {
      if ( i.C || i.P || i.N )
        throw usage_error( "complete-cegis takes both -C and -P, or neither" );
      r = complete_star_cegis( a, file.positives, spec, plant, co );
    }
    else
      r = complete_star_min_cegis( a, file.positives, spec, plant, co );
    m = r.machine;
    trail = r.trail;
    stats = "iterations=" + std::to_string( r.iterations.size() ) +
            " counterexamples=" + std::to_string( r.negatives.size() );
  }
  else
  {
    if ( i.method == "extended-min" && i.N && !i.C )
      throw usage_error( "extended-min with -N needs -C" );
    synthesis_result r;
    if ( i.method == "basic-min" )
      r = i.C ? basic( a, file.positives, *i.C, opts ) : basic_min( a, file.positives, opts );
    else if ( i.method == "extended-min" )
      r = i.N ? extended( a, file.positives, *i.C, i.P.value_or( 1 ), i.N, opts )
              : extended_min( a, file.positives, i.P.value_or( 1 ), i.C, opts );
    else if ( i.method == "extended-min-ub" )
      r = extended_min_ub( a, file.positives, w, opts );
    else if ( i.method == "complete" )
    {
      if ( !i.C || !i.P )
        throw usage_error( "complete needs -C and -P" );
      r = complete( a, file.positives, file.negatives, *i.C, *i.P, i.N, opts );
    }
    m = r.machine;
    trail = r.trail;
    stats = "P=" + std::to_string( r.P );
  }
  write_trail_file( f, trail );

  if ( !m )
  {
    std::cerr << "UNSAT: no machine under the given bounds\n";
    return no_solution;
  }
  recheck( *m, file.positives );
  std::cerr << "C=" << m->num_states() << " T=" << m->transition_count() << " N=" << m->guard_complexity() << ' '
            << stats << " solver_calls=" << trail.size() << '\n';
  emit( f, machine_text( *m, f ) );
  return ok;
}

struct verify_flags
{
  std::string automaton_file, ltl, plant;
  std::size_t state_cap = 1'000'000;
};

int run_verify( verify_flags const& v, common_flags const& f )
{
  auto const m = io::parse_automaton( io::read_file( v.automaton_file ) );
  auto const& a = m.alphabet();
  auto const spec = io::parse_ltl( io::read_file( v.ltl ), a );
  auto const plant = v.plant.empty() ? plant_model::free( a ) : io::parse_plant( io::read_file( v.plant ), a );
  verify_options vo;
  vo.state_cap = v.state_cap;
  auto const cexs = verify( m, plant, spec, vo );
  if ( cexs.empty() )
  {
    std::cerr << "all " << spec.size() << " formulas hold\n";
    return ok;
  }
  io::scenario_file out{ a, {}, {} };
  for ( auto const& c : cexs )
  {
    std::cerr << "violated: " << c.formula << " (" << c.trace.size() << " steps"
              << ( c.loop_start ? ", loop from " + std::to_string( *c.loop_start ) : std::string() ) << ")\n";
    out.negatives.push_back( c.to_negative() );
  }
  emit( f, io::serialize_scenarios( out ) );
  return no_solution;
}

struct randgen_flags
{
  generator_config g;
  std::uint64_t seed = 1;
};

int run_randgen( randgen_flags const& r, common_flags const& f )
{
  rng_type rng( r.seed );
  emit( f, machine_text( random_automaton( r.g, rng ), f ) );
  return ok;
}

struct simulate_flags
{
  std::string automaton_file;
  std::size_t count = 10, length = 10;
  std::uint64_t seed = 1;
};

int run_simulate( simulate_flags const& s, common_flags const& f )
{
  auto const m = io::parse_automaton( io::read_file( s.automaton_file ) );
  rng_type rng( s.seed );
  emit( f, io::serialize_scenarios( { m.alphabet(), simulate( m, s.count, s.length, rng ), {} } ) );
  return ok;
}

struct study_flags
{
  experiment_config cfg;
  std::string train = "20x30", valid = "100x50";
  std::string csv;
};

int run_study_cmd( study_flags s, common_flags const& f )
{
  std::tie( s.cfg.train_count, s.cfg.train_length ) = shape( s.train );
  std::tie( s.cfg.valid_count, s.cfg.valid_length ) = shape( s.valid );
  s.cfg.synth = synth_options( f );
  s.cfg.synth.on_call = nullptr; // repetitions run in parallel
  auto const r = run_study( s.cfg );
  if ( !s.csv.empty() )
  {
    std::ostringstream os;
    write_csv( os, r );
    io::write_file( s.csv, os.str() );
  }
  std::ostringstream os;
  write_summary( os, r );
  emit( f, os.str() );
  return r.failed == 0 ? ok : failure;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "SAT-based inference and verification of guarded Moore machines" };
  app.require_subcommand( 1 );
  common_flags f;
  auto add_common = [&]( CLI::App* sub ) {
    sub->add_option( "--out", f.out, "Output file (default standard output)" );
    sub->add_option( "--format", f.format, "text, dot or json (default from --out extension)" );
  };
  auto add_solver = [&]( CLI::App* sub ) {
    sub->add_option( "--solver", f.solver,
                     "'incremental' or a DIMACS solver binary (default: EFSM_SOLVER, else incremental)" );
    sub->add_option( "--timeout", f.timeout, "Seconds per solver call" )->check( CLI::NonNegativeNumber );
    sub->add_flag( "--no-symmetry-breaking", f.no_symmetry, "Disable BFS symmetry breaking" );
    sub->add_option( "--trail", f.trail, "Write the solver call log here" );
    sub->add_flag( "-v,--verbose", f.verbose, "Log every solver call to standard error" );
  };

  infer_flags inf;
  auto* infer = app.add_subcommand( "infer", "Infer a machine from scenarios" );
  infer->add_option( "method", inf.method )
      ->required()
      ->check( CLI::IsMember(
          { "basic-min", "extended-min", "extended-min-ub", "complete", "complete-cegis", "complete-min-cegis" } ) );
  infer->add_option( "--scenarios", inf.scenarios, "Scenario file" )->required()->check( CLI::ExistingFile );
  infer->add_option( "--ltl", inf.ltl, "LTL specification, one formula per line" )->check( CLI::ExistingFile );
  infer->add_option( "--plant", inf.plant, "Plant model (default: free environment)" )->check( CLI::ExistingFile );
  infer->add_option( "-C", inf.C, "Number of states" )->check( CLI::PositiveNumber );
  infer->add_option( "-K", inf.K, "Transitions per state (default C * input events)" )->check( CLI::PositiveNumber );
  infer->add_option( "-P", inf.P, "Guard size bound per transition" )->check( CLI::PositiveNumber );
  infer->add_option( "-N", inf.N, "Total guard size bound" );
  infer->add_option( "-w", inf.w, "Plateau width for the P sweep" );
  infer->add_flag( "--w-inf", inf.w_unbounded, "Never stop the P sweep on a plateau" );
  infer->add_option( "--n-ceiling", inf.n_ceiling, "Largest N tried by complete-min-cegis (default C*K*P)" );
  infer->add_option( "--max-iterations", inf.max_iterations, "CEGIS iteration cap" );
  add_common( infer );
  add_solver( infer );

  verify_flags ver;
  auto* verify_cmd = app.add_subcommand( "verify", "Model-check a machine against LTL formulas" );
  verify_cmd->add_option( "--automaton", ver.automaton_file )->required()->check( CLI::ExistingFile );
  verify_cmd->add_option( "--ltl", ver.ltl )->required()->check( CLI::ExistingFile );
  verify_cmd->add_option( "--plant", ver.plant )->check( CLI::ExistingFile );
  verify_cmd->add_option( "--state-cap", ver.state_cap );
  add_common( verify_cmd );

  randgen_flags rg;
  auto* randgen = app.add_subcommand( "randgen", "Generate a random machine" );
  randgen->add_option( "-C", rg.g.states )->check( CLI::PositiveNumber );
  randgen->add_option( "--tmax", rg.g.max_transitions, "Transition limit (default C^2 * input events)" );
  randgen->add_option( "--invars", rg.g.input_vars );
  randgen->add_option( "--outvars", rg.g.output_vars );
  randgen->add_option( "--inevents", rg.g.input_events );
  randgen->add_option( "--outevents", rg.g.output_events );
  randgen->add_option( "--seed", rg.seed );
  add_common( randgen );

  simulate_flags sim;
  auto* simulate_cmd = app.add_subcommand( "simulate", "Random walks of a machine as scenarios" );
  simulate_cmd->add_option( "--automaton", sim.automaton_file )->required()->check( CLI::ExistingFile );
  simulate_cmd->add_option( "--count", sim.count )->check( CLI::PositiveNumber );
  simulate_cmd->add_option( "--length", sim.length )->check( CLI::PositiveNumber );
  simulate_cmd->add_option( "--seed", sim.seed );
  add_common( simulate_cmd );

  study_flags st;
  auto* study = app.add_subcommand( "study", "Generate, simulate, infer and validate repeatedly" );
  study->add_option( "-C", st.cfg.generator.states )->check( CLI::PositiveNumber );
  study->add_option( "--tmax", st.cfg.generator.max_transitions );
  study->add_option( "--invars", st.cfg.generator.input_vars );
  study->add_option( "--outvars", st.cfg.generator.output_vars );
  study->add_option( "--inevents", st.cfg.generator.input_events );
  study->add_option( "--outevents", st.cfg.generator.output_events );
  study->add_option( "--train", st.train, "Training shape COUNTxLENGTH" );
  study->add_option( "--valid", st.valid, "Validation shape COUNTxLENGTH" );
  study->add_option( "--reps", st.cfg.repetitions )->check( CLI::PositiveNumber );
  study->add_option( "-P", st.cfg.P )->check( CLI::PositiveNumber );
  study->add_option( "--threads", st.cfg.threads );
  study->add_option( "--seed", st.cfg.seed );
  study->add_option( "--csv", st.csv, "Per-repetition rows" );
  add_common( study );
  add_solver( study );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    auto const code = app.exit( e );
    return code == 0 ? ok : usage;
  }

  try
  {
    if ( *infer )
      return run_infer( inf, f );
    if ( *verify_cmd )
      return run_verify( ver, f );
    if ( *randgen )
      return run_randgen( rg, f );
    if ( *simulate_cmd )
      return run_simulate( sim, f );
    return run_study_cmd( st, f );
  }
  catch ( usage_error const& e )
  {
    std::cerr << "usage: " << e.what() << '\n';
    return usage;
  }
  catch ( io::parse_error const& e )
  {
    std::cerr << "input: " << e.what() << '\n';
    return usage;
  }
  catch ( scenario_error const& e )
  {
    std::cerr << "scenarios: " << e.what() << '\n';
    return no_solution;
  }
  catch ( std::invalid_argument const& e )
  {
    std::cerr << "usage: " << e.what() << '\n';
    return usage;
  }
  catch ( iteration_cap_exceeded const& e )
  {
    std::cerr << "no solution: " << e.what() << '\n';
    return no_solution;
  }
  catch ( n_bound_exceeded const& e )
  {
    std::cerr << "no solution: " << e.what() << '\n';
    return no_solution;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}

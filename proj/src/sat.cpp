#include <efsm/sat.hpp>

#include <cadical.hpp>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace efsm::sat
{

char const* to_string( verdict v )
{
  switch ( v )
  {
  case verdict::sat:
    return "SAT";
  case verdict::unsat:
    return "UNSAT";
  default:
    return "UNKNOWN";
  }
}

/* solver */

int solver::new_variable()
{
  return ++num_vars_;
}

void solver::add_clause( std::span<lit const> clause )
{
  ++num_clauses_;
  if ( clause.empty() )
    trivially_unsat_ = true;
  for ( auto l : clause )
    if ( l.var() == 0 || l.var() > num_vars_ )
      throw backend_error( "clause refers to unallocated variable " + std::to_string( l.dimacs() ) );
  if ( keep_log_ )
    log_.emplace_back( clause.begin(), clause.end() );
  if ( !clause.empty() )
    do_add_clause( clause );
}

solve_outcome solver::solve( std::span<lit const> assumptions )
{
  ++solve_calls_;
  if ( trivially_unsat_ )
    return { verdict::unsat, {}, {} };
  for ( auto l : assumptions )
    if ( l.var() == 0 || l.var() > num_vars_ )
      throw backend_error( "assumption refers to unallocated variable " + std::to_string( l.dimacs() ) );
  auto const start = std::chrono::steady_clock::now();
  auto r = do_solve( assumptions );
  solve_seconds_ += std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
  if ( r.is_sat() )
    r.model.resize( static_cast<std::size_t>( num_vars_ ) + 1, false );
  return r;
}

void solver::reset()
{
  num_vars_ = 0;
  num_clauses_ = 0;
  trivially_unsat_ = false;
  log_.clear();
  do_reset();
}

void solver::write_dimacs( std::ostream& os, std::function<std::string( int )> const& var_name ) const
{
  if ( var_name )
    for ( int v = 1; v <= num_vars_; ++v )
      if ( auto n = var_name( v ); !n.empty() )
        os << "c var " << v << ' ' << n << '\n';
  os << "p cnf " << num_vars_ << ' ' << log_.size() << '\n';
  for ( auto const& c : log_ )
  {
    for ( auto l : c )
      os << l.dimacs() << ' ';
    os << "0\n";
  }
}

namespace
{

/* CaDiCaL */

class deadline_terminator : public CaDiCaL::Terminator
{
public:
  explicit deadline_terminator( std::chrono::steady_clock::time_point deadline ) : deadline_( deadline ) {}
  bool terminate() override { return std::chrono::steady_clock::now() >= deadline_; }

private:
  std::chrono::steady_clock::time_point deadline_;
};

class cadical_solver final : public solver
{
public:
  cadical_solver() { do_reset(); }

protected:
  void do_add_clause( std::span<lit const> clause ) override
  {
    for ( auto l : clause )
      impl_->add( l.dimacs() );
    impl_->add( 0 );
  }

  solve_outcome do_solve( std::span<lit const> assumptions ) override
  {
    if ( num_variables() > 0 )
      impl_->reserve( num_variables() );
    for ( auto l : assumptions )
      impl_->assume( l.dimacs() );

    std::optional<deadline_terminator> term;
    if ( auto t = timeout() )
    {
      term.emplace( std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>( *t ) );
      impl_->connect_terminator( &*term );
    }
    int const r = impl_->solve();
    if ( term )
      impl_->disconnect_terminator();

    solve_outcome out;
    if ( r == 10 )
    {
      out.status = verdict::sat;
      out.model.assign( static_cast<std::size_t>( num_variables() ) + 1, false );
      for ( int v = 1; v <= num_variables(); ++v )
        out.model[v] = impl_->val( v ) > 0;
    }
    else if ( r == 20 )
      out.status = verdict::unsat;
    else
    {
      out.status = verdict::unknown;
      out.reason = term ? "timeout" : "solver returned no verdict";
    }
    return out;
  }

  void do_reset() override
  {
    impl_ = std::make_unique<CaDiCaL::Solver>();
    impl_->set( "quiet", 1 );
  }

private:
  std::unique_ptr<CaDiCaL::Solver> impl_;
};

/* external process */

class temp_file
{
public:
  explicit temp_file( char const* stem )
  {
    auto pattern = ( std::filesystem::temp_directory_path() / ( std::string( stem ) + "-XXXXXX" ) ).string();
    std::vector<char> buf( pattern.begin(), pattern.end() );
    buf.push_back( '\0' );
    int fd = ::mkstemp( buf.data() );
    if ( fd < 0 )
      throw backend_error( std::string( "cannot create temporary file: " ) + std::strerror( errno ) );
    ::close( fd );
    path_ = buf.data();
  }
  ~temp_file() { std::filesystem::remove( path_ ); }
  temp_file( temp_file const& ) = delete;
  temp_file& operator=( temp_file const& ) = delete;

  std::string const& path() const { return path_; }

private:
  std::string path_;
};

class dimacs_process_solver final : public solver
{
public:
  explicit dimacs_process_solver( dimacs_options options ) : options_( std::move( options ) )
  {
    if ( options_.executable.empty() )
      throw backend_error( "no external solver executable configured" );
    force_clause_log();
  }

protected:
  void do_add_clause( std::span<lit const> ) override {}
  void do_reset() override {}

  solve_outcome do_solve( std::span<lit const> assumptions ) override
  {
    temp_file cnf( "efsm-cnf" );
    temp_file out( "efsm-out" );
    {
      std::ofstream os( cnf.path() );
      os << "p cnf " << num_variables() << ' ' << clause_log().size() + assumptions.size() << '\n';
      for ( auto const& c : clause_log() )
      {
        for ( auto l : c )
          os << l.dimacs() << ' ';
        os << "0\n";
      }
      for ( auto l : assumptions )
        os << l.dimacs() << " 0\n";
      if ( !os )
        throw backend_error( "failed writing CNF to " + cnf.path() );
    }

    int const status = run( cnf.path(), out.path() );
    if ( status == -1 )
      return { verdict::unknown, {}, "timeout" };
    return parse( out.path(), status );
  }

private:
  int run( std::string const& cnf_path, std::string const& out_path ) const
  {
    std::vector<std::string> args{ options_.executable };
    args.insert( args.end(), options_.arguments.begin(), options_.arguments.end() );
    if ( !options_.use_stdin )
      args.push_back( cnf_path );
    std::vector<char*> argv;
    for ( auto& a : args )
      argv.push_back( a.data() );
    argv.push_back( nullptr );

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init( &actions );
    posix_spawn_file_actions_addopen( &actions, 1, out_path.c_str(), O_WRONLY | O_TRUNC, 0600 );
    posix_spawn_file_actions_addopen( &actions, 2, "/dev/null", O_WRONLY, 0 );
    posix_spawn_file_actions_addopen( &actions, 0, options_.use_stdin ? cnf_path.c_str() : "/dev/null", O_RDONLY, 0 );

    pid_t pid = 0;
    int const rc = posix_spawnp( &pid, argv[0], &actions, nullptr, argv.data(), environ );
    posix_spawn_file_actions_destroy( &actions );
    if ( rc != 0 )
      throw backend_error( "cannot start solver '" + options_.executable + "': " + std::strerror( rc ) );

    std::optional<std::chrono::steady_clock::time_point> deadline;
    if ( auto t = timeout() )
      deadline = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>( *t );

    int wstatus = 0;
    auto pause = std::chrono::microseconds( 200 );
    for ( ;; )
    {
      pid_t const w = ::waitpid( pid, &wstatus, deadline ? WNOHANG : 0 );
      if ( w == pid )
        break;
      if ( w < 0 && errno != EINTR )
        throw backend_error( std::string( "waitpid failed: " ) + std::strerror( errno ) );
      if ( deadline && std::chrono::steady_clock::now() >= *deadline )
      {
        ::kill( pid, SIGKILL );
        ::waitpid( pid, &wstatus, 0 );
        return -1;
      }
      std::this_thread::sleep_for( pause );
      pause = std::min( pause * 2, std::chrono::microseconds( 20000 ) );
    }
    if ( WIFEXITED( wstatus ) )
      return WEXITSTATUS( wstatus );
    return 256;
  }

  solve_outcome parse( std::string const& out_path, int exit_status ) const
  {
    std::ifstream is( out_path );
    solve_outcome out;
    verdict from_s_line = verdict::unknown;
    std::vector<int> values;
    std::string line;
    while ( std::getline( is, line ) )
    {
      if ( line.rfind( "s ", 0 ) == 0 )
      {
        if ( line.find( "UNSATISFIABLE" ) != std::string::npos )
          from_s_line = verdict::unsat;
        else if ( line.find( "SATISFIABLE" ) != std::string::npos )
          from_s_line = verdict::sat;
      }
      else if ( line.rfind( "v ", 0 ) == 0 || line == "v" )
      {
        std::istringstream ls( line.substr( 1 ) );
        int x = 0;
        while ( ls >> x )
          if ( x != 0 )
            values.push_back( x );
      }
    }

    out.status = exit_status == 10 ? verdict::sat : exit_status == 20 ? verdict::unsat : from_s_line;
    if ( out.status == verdict::unknown )
    {
      out.reason = "external solver exited with status " + std::to_string( exit_status );
      return out;
    }
    if ( out.status == verdict::sat )
    {
      out.model.assign( static_cast<std::size_t>( num_variables() ) + 1, false );
      for ( int x : values )
        if ( x > 0 && x <= num_variables() )
          out.model[x] = true;
    }
    return out;
  }

  dimacs_options options_;
};

} // namespace

std::unique_ptr<solver> make_incremental_solver()
{
  return std::make_unique<cadical_solver>();
}

std::unique_ptr<solver> make_dimacs_solver( dimacs_options options )
{
  return std::make_unique<dimacs_process_solver>( std::move( options ) );
}

std::optional<std::string> external_solver_from_env()
{
  if ( char const* p = std::getenv( "EFSM_SOLVER" ); p && *p )
    return std::string( p );
  return std::nullopt;
}

solver_factory incremental_factory()
{
  return [] { return make_incremental_solver(); };
}

solver_factory dimacs_factory( dimacs_options options )
{
  return [options] { return make_dimacs_solver( options ); };
}

} // namespace efsm::sat

#pragma once

/*!
  \file sat.hpp
  \brief Incremental SAT interface with an in-process backend and an
         external-process DIMACS backend
*/

#include <chrono>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace efsm::sat
{

/*! \brief Literal in DIMACS convention: +v or -v, v > 0 */
class lit
{
public:
  constexpr lit() = default;
  constexpr explicit lit( int dimacs ) : value_( dimacs ) {}

  static constexpr lit pos( int var ) { return lit( var ); }

  constexpr int var() const { return value_ < 0 ? -value_ : value_; }
  constexpr bool negative() const { return value_ < 0; }
  constexpr int dimacs() const { return value_; }

  constexpr lit operator~() const { return lit( -value_ ); }
  constexpr bool operator==( lit const& ) const = default;
  constexpr auto operator<=>( lit const& ) const = default;

private:
  int value_ = 0;
};

enum class verdict
{
  sat,
  unsat,
  unknown
};

char const* to_string( verdict v );

struct solve_outcome
{
  verdict status = verdict::unknown;
  std::vector<bool> model; // indexed by variable id; entry 0 unused
  std::string reason;      // set for unknown

  bool is_sat() const { return status == verdict::sat; }
  bool is_unsat() const { return status == verdict::unsat; }
  bool value( lit l ) const { return model.at( l.var() ) != l.negative(); }
};

class backend_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Monotone clause store with assumption-based solving

  Not thread-safe; distinct instances are independent.
*/
class solver
{
public:
  virtual ~solver() = default;

  /*! \brief Fresh variable id: 1, 2, 3, ... */
  int new_variable();
  int num_variables() const { return num_vars_; }
  std::size_t num_clauses() const { return num_clauses_; }

  /*! \brief An empty clause makes the store trivially UNSAT */
  void add_clause( std::span<lit const> clause );
  void add_clause( std::initializer_list<lit> clause ) { add_clause( std::span<lit const>( clause.begin(), clause.size() ) ); }

  /*! \brief Decides clauses + assumptions; leaves the clause store unchanged */
  solve_outcome solve( std::span<lit const> assumptions = {} );
  solve_outcome solve( std::initializer_list<lit> assumptions ) { return solve( std::span<lit const>( assumptions.begin(), assumptions.size() ) ); }

  /*! \brief Discards all variables and clauses */
  void reset();

  void set_timeout( std::optional<std::chrono::duration<double>> t ) { timeout_ = t; }

  /*! \brief Keeps a copy of every clause so that write_dimacs works */
  void keep_clause_log( bool on ) { keep_log_ = on; }
  void write_dimacs( std::ostream& os, std::function<std::string( int )> const& var_name = {} ) const;

  std::size_t num_solve_calls() const { return solve_calls_; }
  double solve_seconds() const { return solve_seconds_; }

protected:
  virtual void do_add_clause( std::span<lit const> clause ) = 0;
  virtual solve_outcome do_solve( std::span<lit const> assumptions ) = 0;
  virtual void do_reset() = 0;

  std::optional<std::chrono::duration<double>> timeout() const { return timeout_; }
  std::vector<std::vector<lit>> const& clause_log() const { return log_; }
  void force_clause_log() { keep_log_ = true; }

private:
  int num_vars_ = 0;
  std::size_t num_clauses_ = 0;
  bool trivially_unsat_ = false;
  bool keep_log_ = false;
  std::vector<std::vector<lit>> log_;
  std::optional<std::chrono::duration<double>> timeout_;
  std::size_t solve_calls_ = 0;
  double solve_seconds_ = 0.0;
};

/*! \brief In-process incremental solver (CaDiCaL) */
std::unique_ptr<solver> make_incremental_solver();

struct dimacs_options
{
  std::string executable;     // solver binary; see default_external_solver()
  std::vector<std::string> arguments;
  bool use_stdin = false;     // feed CNF on standard input instead of a file argument
};

/*! \brief Runs an external DIMACS solver as a child process per solve call

  The whole clause store plus assumptions as unit clauses is written out on
  every call. Verdict comes from the exit status (10/20) with the `s` line
  as fallback; the model is read from `v` lines.
*/
std::unique_ptr<solver> make_dimacs_solver( dimacs_options options );

/*! \brief Path from the EFSM_SOLVER environment variable, if set */
std::optional<std::string> external_solver_from_env();

using solver_factory = std::function<std::unique_ptr<solver>()>;

solver_factory incremental_factory();
solver_factory dimacs_factory( dimacs_options options );

} // namespace efsm::sat

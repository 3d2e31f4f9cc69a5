#pragma once

/*!
  \file synthesis.hpp
  \brief Minimization drivers: smallest state count, transition count and
         total guard size
*/

#include <efsm/automaton.hpp>
#include <efsm/encoder.hpp>
#include <efsm/sat.hpp>

#include <chrono>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace efsm
{

/*! \brief One solver call of a driver */
struct solver_call
{
  std::string phase;    // e.g. "basic", "extended-min"
  std::size_t C = 0;
  std::size_t K = 0;
  std::optional<std::size_t> P;
  std::optional<std::size_t> T; // transition bound, if any
  std::optional<std::size_t> N; // guard size bound, if any
  std::size_t negatives = 0;    // negative tree size (CEGIS)
  sat::verdict verdict = sat::verdict::unknown;
  double seconds = 0.0;
};

/*! \brief One line, machine-readable: `phase C=2 K=2 P=1 N=4 SAT 0.001` */
std::string to_string( solver_call const& c );

/*! \brief The backend gave up (timeout); carries the trail so far */
class synthesis_aborted : public std::runtime_error
{
public:
  synthesis_aborted( std::string const& what, std::vector<solver_call> trail )
      : std::runtime_error( what ), trail_( std::move( trail ) )
  {
  }
  std::vector<solver_call> const& trail() const { return trail_; }

private:
  std::vector<solver_call> trail_;
};

struct synthesis_options
{
  sat::solver_factory factory = sat::incremental_factory();
  std::size_t max_transitions = 0;          // K cap; 0 means C * |input events|
  bool state_bfs = true;
  bool tree_bfs = true;
  amo_encoding amo = amo_encoding::pairwise;
  std::optional<std::chrono::duration<double>> timeout; // per solver call
  std::size_t max_states = 0;               // basic_min search limit; 0 = #active nodes + 1
  std::size_t max_guard_size = 32;          // extended_min_ub P limit
  std::function<void( solver_call const& )> on_call; // verdict trail listener
};

struct synthesis_result
{
  std::optional<automaton> machine; // none: UNSAT under the given bounds
  std::size_t C = 0;
  std::size_t T = 0;
  std::size_t N = 0;
  std::size_t P = 0;
  std::vector<solver_call> trail;
  std::size_t solver_calls = 0;
  double solver_seconds = 0.0;

  bool found() const { return machine.has_value(); }
};

inline constexpr std::size_t unbounded_width = std::numeric_limits<std::size_t>::max();

/*! \brief Truth-table guards at a fixed state count */
synthesis_result basic( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t C,
                        synthesis_options const& opts = {} );

/*! \brief Smallest C; the trail holds UNSAT for every smaller C */
synthesis_result basic_min( alphabet const& a, std::vector<scenario> const& scenarios,
                            synthesis_options const& opts = {} );

/*! \brief basic_min, then the smallest transition count at C_min */
synthesis_result basic_min_star( alphabet const& a, std::vector<scenario> const& scenarios,
                                 synthesis_options const& opts = {} );

/*! \brief Parse-tree guards of at most P nodes each, optionally N nodes in total */
synthesis_result extended( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t C, std::size_t P,
                           std::optional<std::size_t> N = std::nullopt, synthesis_options const& opts = {} );

/*! \brief Smallest total guard size N at guard budget P; C from basic_min
           unless given */
synthesis_result extended_min( alphabet const& a, std::vector<scenario> const& scenarios, std::size_t P,
                               std::optional<std::size_t> C = std::nullopt, synthesis_options const& opts = {} );

/*! \brief Sweeps P = 1, 2, ... with extended_min. Stops when P exceeds
           N_best - T_min or after `w` successive P values without a strict
           improvement of N. */
synthesis_result extended_min_ub( alphabet const& a, std::vector<scenario> const& scenarios,
                                  std::size_t w = 2, synthesis_options const& opts = {} );

/*! \brief Shared plumbing for drivers that own a solver and an encoder */
class synthesis_session
{
public:
  synthesis_session( alphabet const& a, encoding_params p, synthesis_options const& opts, std::string phase );

  encoder& enc() { return *enc_; }
  sat::solver& solver() { return *solver_; }

  /*! \brief Solves under the current bounds; logs the call, throws
             synthesis_aborted on UNKNOWN */
  sat::solve_outcome solve( std::vector<solver_call>& trail, std::optional<std::size_t> T,
                            std::optional<std::size_t> N, std::size_t negatives = 0 );

  void set_phase( std::string phase ) { phase_ = std::move( phase ); }

private:
  synthesis_options const& opts_;
  std::unique_ptr<sat::solver> solver_;
  std::unique_ptr<encoder> enc_;
  std::string phase_;
};

/*! \brief Throws std::logic_error unless `m` satisfies every scenario */
void recheck( automaton const& m, std::vector<scenario> const& scenarios );

void write_trail( std::ostream& os, std::vector<solver_call> const& trail );

} // namespace efsm

#pragma once

/*!
  \file eval.hpp
  \brief Random-automaton study: generate, simulate, infer, validate
*/

#include <efsm/synthesis.hpp>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace efsm
{

class generation_failed : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct generator_config
{
  std::size_t states = 4;
  std::size_t max_transitions = 0; // 0: states^2 * input events
  std::size_t input_vars = 4;
  std::size_t output_vars = 3;
  std::size_t input_events = 1;
  std::size_t output_events = 1;

  /*! \brief Throws std::invalid_argument */
  void validate() const;
  std::size_t transition_limit() const;
};

/*! \brief Input events I1.., output events O1.., variables x1.., z1.. */
alphabet generator_alphabet( generator_config const& cfg );

using rng_type = std::mt19937_64;

/*! \brief Random machine with every state reachable from state 0

  Guards are a single terminal with probability 1/2, else a negated
  terminal or a conjunction/disjunction of two distinct terminals.
  No state has two transitions on the same event with the same truth table.
  States without incoming transitions are silent; all others emit.
*/
automaton random_automaton( generator_config const& cfg, rng_type& rng );

/*! \brief `count` random walks of `length` steps from the initial state */
std::vector<scenario> simulate( automaton const& m, std::size_t count, std::size_t length, rng_type& rng );

/*! \brief Percentage of scenarios the candidate satisfies completely */
double forward_check( automaton const& candidate, std::vector<scenario> const& validation );

struct experiment_config
{
  generator_config generator;
  std::size_t train_count = 20;
  std::size_t train_length = 30;
  std::size_t valid_count = 100;
  std::size_t valid_length = 50;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  std::size_t P = 3;       // extended_min guard budget
  std::size_t threads = 0; // 0: hardware concurrency
  synthesis_options synth;
};

struct experiment_row
{
  std::size_t repetition = 0;
  std::size_t true_C = 0;
  std::size_t true_T = 0;
  std::string status; // ok, unsat, or the error text
  std::size_t C = 0;
  std::size_t P = 0;
  std::size_t T = 0;
  std::size_t N = 0;
  double seconds = 0.0; // wall time of inference
  double p = 0.0;       // forward check; 0 unless status is ok
};

struct experiment_report
{
  experiment_config config;
  std::vector<experiment_row> rows;

  double mean_seconds = 0.0;   // over ok rows
  double stddev_seconds = 0.0; // population, over ok rows
  double mean_p = 0.0;         // over all rows
  std::size_t full = 0;        // rows with p = 100
  std::size_t failed = 0;

  /*! \brief Recomputes the aggregates from rows */
  void aggregate();
};

/*! \brief basic_min for C, then extended_min at cfg.P, raising C until SAT */
synthesis_result infer_for_study( alphabet const& a, std::vector<scenario> const& train, std::size_t P,
                                  std::size_t max_C, synthesis_options const& opts );

/*! \brief Runs every repetition; row failures are recorded, not thrown.
           Repetition i draws from its own generator seeded by (seed, i). */
experiment_report run_study( experiment_config const& cfg );

void write_csv( std::ostream& os, experiment_report const& r, bool with_times = true );
void write_summary( std::ostream& os, experiment_report const& r );

} // namespace efsm

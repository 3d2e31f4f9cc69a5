#pragma once

/*!
  \file cegis.hpp
  \brief Counterexample-guided synthesis against an LTL specification
*/

#include <efsm/synthesis.hpp>
#include <efsm/verifier.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace efsm
{

class iteration_cap_exceeded : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief CEGIS stayed UNSAT while raising N up to a ceiling below C*K*P */
class n_bound_exceeded : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct cegis_iteration
{
  std::size_t index = 0;       // 1-based over the whole run
  std::optional<std::size_t> N_bound;
  sat::verdict verdict = sat::verdict::unknown;
  std::size_t C = 0, T = 0, N = 0; // candidate, when SAT
  std::size_t counterexamples = 0;
  std::size_t negative_nodes = 0; // negative tree size after the iteration
  double solver_seconds = 0.0;
  double verifier_seconds = 0.0;
};

std::string to_string( cegis_iteration const& it );

struct cegis_options
{
  synthesis_options synth;
  verify_options verify;
  std::size_t max_iterations = 1000;
  std::size_t w = 2;                    // plateau width for the P sweep
  std::optional<std::size_t> n_ceiling; // default C*K*P
  std::function<void( cegis_iteration const& )> on_iteration;
};

struct cegis_result
{
  std::optional<automaton> machine; // none: UNSAT
  std::size_t C = 0;
  std::size_t P = 0;
  std::optional<std::size_t> N_bound;    // final bound (min variant)
  std::optional<synthesis_result> start; // scenario-only estimate (star variants)
  std::vector<cegis_iteration> iterations;
  std::vector<automaton> candidates;     // every decoded candidate, in order
  std::vector<negative_scenario> negatives;
  std::vector<solver_call> trail;

  bool found() const { return machine.has_value(); }
};

/*! \brief One solve with positive and negative scenarios */
synthesis_result complete( alphabet const& a, std::vector<scenario> const& positives,
                           std::vector<negative_scenario> const& negatives, std::size_t C, std::size_t P,
                           std::optional<std::size_t> N = std::nullopt, synthesis_options const& opts = {} );

/*! \brief Synthesize, verify, add counterexamples, repeat */
cegis_result complete_cegis( alphabet const& a, std::vector<scenario> const& positives,
                             std::vector<ltl::formula_ptr> const& spec, plant_model const& plant, std::size_t C,
                             std::size_t P, std::optional<std::size_t> N = std::nullopt,
                             cegis_options const& opts = {} );

/*! \brief C and P from extended_min_ub on the positives, then CEGIS with N unbounded */
cegis_result complete_star_cegis( alphabet const& a, std::vector<scenario> const& positives,
                                  std::vector<ltl::formula_ptr> const& spec, plant_model const& plant,
                                  cegis_options const& opts = {} );

/*! \brief As complete_star_cegis but starting from the scenario-only N and
           raising it by one (with a fresh solver) whenever CEGIS is UNSAT */
cegis_result complete_star_min_cegis( alphabet const& a, std::vector<scenario> const& positives,
                                      std::vector<ltl::formula_ptr> const& spec, plant_model const& plant,
                                      cegis_options const& opts = {} );

} // namespace efsm

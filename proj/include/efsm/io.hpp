#pragma once

/*!
  \file io.hpp
  \brief Text formats: scenarios, automata, LTL lists, plant models; DOT and
         JSON export

  Header lines shared by scenario and automaton files:

      inevents R
      outevents A B
      invars 2          (or a list of names)
      outvars 1

  Scenario files continue with blocks opened by `scenario` or
  `negscenario [loop=K]`, one element per line, e.g. `R[01] -> B[1]` and
  `R[00] -> .[0]`. `#` starts a comment.
*/

#include <efsm/automaton.hpp>
#include <efsm/ltl.hpp>
#include <efsm/scenario_tree.hpp>
#include <efsm/verifier.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace efsm::io
{

class parse_error : public std::runtime_error
{
public:
  parse_error( std::string const& what, std::size_t line, std::size_t column );

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

struct scenario_file
{
  alphabet alpha;
  std::vector<scenario> positives;
  std::vector<negative_scenario> negatives;
};

scenario_file parse_scenarios( std::string_view text );
std::string serialize_scenarios( scenario_file const& f );

/*! \brief Infix with ~ & | (tightest first), binary chains nested to the right */
std::string guard_to_string( guard_expr const& g, alphabet const& a );
guard_expr parse_guard( std::string_view text, alphabet const& a );

/*! \brief Canonical listing

      state 0 . 00/11
        R [x1 & ~x2] -> 1

  The state line gives the output event and the algorithm as new values
  for old value 0 and old value 1. Transitions are in priority order.
*/
std::string to_text( automaton const& m );
automaton parse_automaton( std::string_view text );

std::string to_dot( automaton const& m );
std::string to_json( automaton const& m );

/*! \brief One formula per line */
std::vector<ltl::formula_ptr> parse_ltl( std::string_view text, alphabet const& a );

/*! \brief Either the single word `free`, or

      states 2
      initial 0
      0 . -> 0 R[1]        from, last output event (* any, . none), to, emitted input
      0 A 1- -> 1 R[0]     optional pattern on the last output values
*/
plant_model parse_plant( std::string_view text, alphabet const& a );

std::string read_file( std::filesystem::path const& p );
void write_file( std::filesystem::path const& p, std::string const& text );

} // namespace efsm::io

#include <efsm/io.hpp>

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace efsm::io
{

parse_error::parse_error( std::string const& what, std::size_t line, std::size_t column )
    : std::runtime_error( std::to_string( line ) + ":" + std::to_string( column ) + ": " + what ), line_( line ),
      column_( column )
{
}

namespace
{

/* one line of input with a column cursor; comments already stripped */
class cursor
{
public:
  cursor( std::string_view text, std::size_t line ) : s_( text ), line_( line ) {}

  [[noreturn]] void fail( std::string const& what ) const { throw parse_error( what, line_, i_ + 1 ); }

  void skip_ws()
  {
    while ( i_ < s_.size() && std::isspace( static_cast<unsigned char>( s_[i_] ) ) )
      ++i_;
  }

  bool done()
  {
    skip_ws();
    return i_ == s_.size();
  }

  bool peek( char c )
  {
    skip_ws();
    return i_ < s_.size() && s_[i_] == c;
  }

  bool accept( std::string_view tok )
  {
    skip_ws();
    if ( s_.substr( i_, tok.size() ) != tok )
      return false;
    i_ += tok.size();
    return true;
  }

  void expect( std::string_view tok )
  {
    if ( !accept( tok ) )
      fail( "expected '" + std::string( tok ) + "'" );
  }

  std::string name()
  {
    skip_ws();
    auto const b = i_;
    while ( i_ < s_.size() && ( std::isalnum( static_cast<unsigned char>( s_[i_] ) ) || s_[i_] == '_' ) )
      ++i_;
    if ( i_ == b )
      fail( "expected a name" );
    return std::string( s_.substr( b, i_ - b ) );
  }

  /* non-space run */
  std::string word()
  {
    skip_ws();
    auto const b = i_;
    while ( i_ < s_.size() && !std::isspace( static_cast<unsigned char>( s_[i_] ) ) )
      ++i_;
    if ( i_ == b )
      fail( "unexpected end of line" );
    return std::string( s_.substr( b, i_ - b ) );
  }

  std::size_t number()
  {
    skip_ws();
    std::size_t v = 0;
    auto const [p, ec] = std::from_chars( s_.data() + i_, s_.data() + s_.size(), v );
    if ( ec != std::errc() )
      fail( "expected a number" );
    i_ = static_cast<std::size_t>( p - s_.data() );
    return v;
  }

  /* [0101] */
  bits bracketed_bits( std::size_t n )
  {
    expect( "[" );
    auto const b = i_;
    bits v;
    while ( i_ < s_.size() && ( s_[i_] == '0' || s_[i_] == '1' ) )
      v.push_back( s_[i_++] == '1' );
    if ( v.size() != n )
    {
      i_ = b;
      fail( "expected " + std::to_string( n ) + " bits" );
    }
    if ( i_ >= s_.size() || s_[i_] != ']' )
      fail( "expected ']'" );
    ++i_;
    return v;
  }

  /* column of the next token */
  std::size_t column()
  {
    skip_ws();
    return i_ + 1;
  }
  std::size_t line() const { return line_; }
  std::string_view rest() const { return s_.substr( i_ ); }

private:
  std::string_view s_;
  std::size_t line_;
  std::size_t i_ = 0;
};

struct line_view
{
  std::size_t number;
  std::string_view text;
};

/* non-blank lines with comments removed */
std::vector<line_view> lines_of( std::string_view text )
{
  std::vector<line_view> out;
  std::size_t n = 0;
  while ( !text.empty() )
  {
    ++n;
    auto const eol = text.find( '\n' );
    auto line = text.substr( 0, eol );
    text = eol == std::string_view::npos ? std::string_view{} : text.substr( eol + 1 );
    if ( auto h = line.find( '#' ); h != std::string_view::npos )
      line = line.substr( 0, h );
    if ( line.find_first_not_of( " \t\r" ) != std::string_view::npos )
      out.push_back( { n, line } );
  }
  return out;
}

bool is_header( std::string_view line )
{
  cursor c( line, 0 );
  auto const w = c.word();
  return w == "inevents" || w == "outevents" || w == "invars" || w == "outvars";
}

std::vector<std::string> default_names( char prefix, std::size_t n )
{
  std::vector<std::string> v;
  for ( std::size_t i = 1; i <= n; ++i )
    v.push_back( prefix + std::to_string( i ) );
  return v;
}

/* consumes header lines from the front; returns index of first other line */
std::size_t parse_header( std::vector<line_view> const& lines, alphabet& a )
{
  bool seen[4] = { false, false, false, false };
  std::size_t i = 0;
  for ( ; i < lines.size() && is_header( lines[i].text ); ++i )
  {
    cursor c( lines[i].text, lines[i].number );
    auto const key = c.name();
    int const k = key == "inevents" ? 0 : key == "outevents" ? 1 : key == "invars" ? 2 : 3;
    if ( seen[k] )
      c.fail( "duplicate '" + key + "'" );
    seen[k] = true;
    std::vector<std::string> names;
    if ( k >= 2 && !c.done() && std::isdigit( static_cast<unsigned char>( c.rest()[0] ) ) )
    {
      auto const n = c.number();
      names = default_names( k == 2 ? 'x' : 'z', n );
    }
    else
      while ( !c.done() )
        names.push_back( c.name() );
    if ( !c.done() )
      c.fail( "unexpected text" );
    ( k == 0 ? a.input_events : k == 1 ? a.output_events : k == 2 ? a.input_vars : a.output_vars ) = names;
  }
  auto const where = i < lines.size() ? lines[i].number : ( lines.empty() ? 1 : lines.back().number );
  if ( !seen[0] )
    throw parse_error( "missing 'inevents' header", where, 1 );
  try
  {
    a.validate();
  }
  catch ( structural_error const& e )
  {
    throw parse_error( e.what(), where, 1 );
  }
  return i;
}

void write_names( std::ostream& os, std::vector<std::string> const& names )
{
  for ( auto const& n : names )
    os << ' ' << n;
}

void write_header( std::ostream& os, alphabet const& a )
{
  os << "inevents";
  write_names( os, a.input_events );
  os << "\noutevents";
  write_names( os, a.output_events );
  os << "\ninvars";
  if ( a.input_vars == default_names( 'x', a.num_input_vars() ) )
    os << ' ' << a.num_input_vars();
  else
    write_names( os, a.input_vars );
  os << "\noutvars";
  if ( a.output_vars == default_names( 'z', a.num_output_vars() ) )
    os << ' ' << a.num_output_vars();
  else
    write_names( os, a.output_vars );
  os << '\n';
}

event_id input_event( cursor& c, alphabet const& a )
{
  auto const col = c.column();
  auto const n = c.name();
  auto e = a.find_input_event( n );
  if ( !e )
    throw parse_error( "unknown input event '" + n + "'", c.line(), col );
  return *e;
}

event_id output_event_or_dot( cursor& c, alphabet const& a )
{
  if ( c.accept( "." ) )
    return epsilon;
  auto const col = c.column();
  auto const n = c.name();
  auto e = a.find_output_event( n );
  if ( !e )
    throw parse_error( "unknown output event '" + n + "'", c.line(), col );
  return *e;
}

input_action input_action_of( cursor& c, alphabet const& a )
{
  auto const e = input_event( c, a );
  return { e, c.bracketed_bits( a.num_input_vars() ) };
}

scenario_element element_of( cursor& c, alphabet const& a )
{
  scenario_element el;
  el.in = input_action_of( c, a );
  c.expect( "->" );
  el.out.event = output_event_or_dot( c, a );
  el.out.output = c.bracketed_bits( a.num_output_vars() );
  if ( !c.done() )
    c.fail( "unexpected text after element" );
  return el;
}

void write_element( std::ostream& os, scenario_element const& e, alphabet const& a )
{
  os << a.input_events.at( static_cast<std::size_t>( e.in.event ) ) << '[' << to_string( e.in.input ) << "] -> "
     << a.output_event_name( e.out.event ) << '[' << to_string( e.out.output ) << "]\n";
}

} // namespace

scenario_file parse_scenarios( std::string_view text )
{
  auto const lines = lines_of( text );
  if ( lines.empty() )
    throw parse_error( "empty scenario file", 1, 1 );
  scenario_file f;
  auto i = parse_header( lines, f.alpha );

  enum class block
  {
    none,
    positive,
    negative
  } current = block::none;
  std::size_t opened_at = 0;
  auto close = [&] {
    auto const empty = current == block::positive ? f.positives.back().empty()
                       : current == block::negative ? f.negatives.back().elements.empty()
                                                   : false;
    if ( empty )
      throw parse_error( "scenario without elements", opened_at, 1 );
    if ( current == block::negative )
    {
      auto const& n = f.negatives.back();
      if ( n.loop_start && *n.loop_start >= n.elements.size() )
        throw parse_error( "loop start must be before the last element", opened_at, 1 );
    }
  };

  for ( ; i < lines.size(); ++i )
  {
    cursor c( lines[i].text, lines[i].number );
    if ( c.accept( "negscenario" ) )
    {
      close();
      current = block::negative;
      opened_at = lines[i].number;
      negative_scenario n;
      if ( c.accept( "loop" ) )
      {
        c.expect( "=" );
        auto const col = c.column();
        n.loop_start = c.number();
        if ( *n.loop_start == 0 )
          throw parse_error( "loop start is 1-based", c.line(), col );
      }
      if ( !c.done() )
        c.fail( "unexpected text" );
      f.negatives.push_back( std::move( n ) );
    }
    else if ( c.accept( "scenario" ) )
    {
      close();
      if ( !c.done() )
        c.fail( "unexpected text" );
      current = block::positive;
      opened_at = lines[i].number;
      f.positives.emplace_back();
    }
    else if ( current == block::none )
      c.fail( "element outside a scenario block" );
    else
    {
      auto el = element_of( c, f.alpha );
      if ( current == block::positive )
        f.positives.back().push_back( std::move( el ) );
      else
        f.negatives.back().elements.push_back( std::move( el ) );
    }
  }
  close();
  if ( current == block::none )
    throw parse_error( "no scenarios", lines.back().number, 1 );
  return f;
}

std::string serialize_scenarios( scenario_file const& f )
{
  std::ostringstream os;
  write_header( os, f.alpha );
  for ( auto const& s : f.positives )
  {
    os << "scenario\n";
    for ( auto const& e : s )
      write_element( os, e, f.alpha );
  }
  for ( auto const& n : f.negatives )
  {
    os << "negscenario";
    if ( n.loop_start )
      os << " loop=" << *n.loop_start;
    os << '\n';
    for ( auto const& e : n.elements )
      write_element( os, e, f.alpha );
  }
  return os.str();
}

/* guards */

namespace
{

int binding( guard_expr::kind k )
{
  switch ( k )
  {
  case guard_expr::kind::disjunction:
    return 0;
  case guard_expr::kind::conjunction:
    return 1;
  default:
    return 2;
  }
}

void write_guard( std::ostream& os, guard_expr const& g, std::uint32_t i, alphabet const& a )
{
  auto const& n = g.at( i );
  auto child = [&]( std::uint32_t c, bool parens ) {
    if ( parens )
      os << '(';
    write_guard( os, g, c, a );
    if ( parens )
      os << ')';
  };
  switch ( n.type )
  {
  case guard_expr::kind::terminal:
    os << a.input_vars.at( n.var );
    return;
  case guard_expr::kind::negation:
    os << '~';
    child( n.left, binding( g.at( n.left ).type ) < 2 );
    return;
  default:
  {
    auto const b = binding( n.type );
    child( n.left, binding( g.at( n.left ).type ) <= b );
    os << ( n.type == guard_expr::kind::conjunction ? " & " : " | " );
    child( n.right, binding( g.at( n.right ).type ) < b );
  }
  }
}

class guard_parser
{
public:
  guard_parser( cursor& c, alphabet const& a ) : c_( c ), a_( a ) {}

  guard_expr disjunction()
  {
    auto lhs = conjunction();
    if ( c_.accept( "|" ) )
      return guard_expr::disjoin( lhs, disjunction() );
    return lhs;
  }

private:
  guard_expr conjunction()
  {
    auto lhs = unary();
    if ( c_.accept( "&" ) )
      return guard_expr::conjoin( lhs, conjunction() );
    return lhs;
  }

  guard_expr unary()
  {
    if ( c_.accept( "~" ) )
      return guard_expr::negate( unary() );
    if ( c_.accept( "(" ) )
    {
      auto g = disjunction();
      c_.expect( ")" );
      return g;
    }
    auto const col = c_.column();
    auto const n = c_.name();
    for ( std::size_t i = 0; i < a_.input_vars.size(); ++i )
      if ( a_.input_vars[i] == n )
        return guard_expr::terminal( static_cast<std::uint32_t>( i ) );
    throw parse_error( "unknown input variable '" + n + "'", c_.line(), col );
  }

  cursor& c_;
  alphabet const& a_;
};

} // namespace

std::string guard_to_string( guard_expr const& g, alphabet const& a )
{
  std::ostringstream os;
  write_guard( os, g, 0, a );
  return os.str();
}

guard_expr parse_guard( std::string_view text, alphabet const& a )
{
  cursor c( text, 1 );
  auto g = guard_parser( c, a ).disjunction();
  if ( !c.done() )
    c.fail( "unexpected text after guard" );
  return g;
}

/* automata */

namespace
{

std::string algorithm_text( state_algorithm const& alg )
{
  std::string f, t;
  for ( auto const& u : alg )
  {
    f += u.when_false ? '1' : '0';
    t += u.when_true ? '1' : '0';
  }
  return f + "/" + t;
}

std::string algorithm_label( state_algorithm const& alg, alphabet const& a )
{
  std::string out;
  for ( std::size_t i = 0; i < alg.size(); ++i )
  {
    auto const& u = alg[i];
    if ( u.is_keep() )
      continue;
    if ( !out.empty() )
      out += ' ';
    auto const& z = a.output_vars.at( i );
    if ( u.when_false && !u.when_true )
      out += "~" + z;
    else
      out += z + ":=" + ( u.when_false ? "1" : "0" );
  }
  return out;
}

} // namespace

std::string to_text( automaton const& m )
{
  auto const& a = m.alphabet();
  std::ostringstream os;
  write_header( os, a );
  for ( std::size_t q = 0; q < m.num_states(); ++q )
  {
    auto const& s = m.states()[q];
    os << "state " << q << ' ' << a.output_event_name( s.output_event ) << ' ' << algorithm_text( s.algorithm )
       << '\n';
    for ( auto const& t : s.transitions )
      os << "  " << a.input_events.at( static_cast<std::size_t>( t.input_event ) ) << " ["
         << guard_to_string( t.guard, a ) << "] -> " << t.dest << '\n';
  }
  return os.str();
}

automaton parse_automaton( std::string_view text )
{
  auto const lines = lines_of( text );
  if ( lines.empty() )
    throw parse_error( "empty automaton file", 1, 1 );
  alphabet a;
  auto i = parse_header( lines, a );
  std::vector<state> states;
  struct pending_dest
  {
    std::size_t state, transition, line, column, dest;
  };
  std::vector<pending_dest> dests;

  for ( ; i < lines.size(); ++i )
  {
    cursor c( lines[i].text, lines[i].number );
    if ( c.accept( "state" ) )
    {
      auto const col = c.column();
      if ( c.number() != states.size() )
        throw parse_error( "states must be numbered 0, 1, ... in order", c.line(), col );
      state s;
      s.output_event = output_event_or_dot( c, a );
      auto const acol = c.column();
      auto const alg = c.word();
      auto const slash = alg.find( '/' );
      auto const n = a.num_output_vars();
      if ( slash != n || alg.size() != 2 * n + 1 ||
           alg.find_first_not_of( "01/" ) != std::string::npos || alg.find( '/', slash + 1 ) != std::string::npos )
        throw parse_error( "algorithm must be " + std::to_string( n ) + " bits, '/', " + std::to_string( n ) + " bits",
                           c.line(), acol );
      for ( std::size_t z = 0; z < n; ++z )
        s.algorithm.push_back( { alg[z] == '1', alg[n + 1 + z] == '1' } );
      if ( !c.done() )
        c.fail( "unexpected text" );
      states.push_back( std::move( s ) );
      continue;
    }
    if ( states.empty() )
      c.fail( "transition before the first state" );
    transition t;
    t.input_event = input_event( c, a );
    c.expect( "[" );
    auto const gcol = c.column();
    auto const close = c.rest().find( ']' );
    if ( close == std::string_view::npos )
      c.fail( "expected ']'" );
    auto const gtext = c.rest().substr( 0, close );
    try
    {
      t.guard = parse_guard( gtext, a );
    }
    catch ( parse_error const& e )
    {
      throw parse_error( std::string( e.what() ).substr( std::string( e.what() ).find( ' ' ) + 1 ), c.line(),
                         gcol + e.column() - 1 );
    }
    cursor after( c.rest().substr( close + 1 ), c.line() );
    after.expect( "->" );
    auto const dcol = gcol + close + 1 + after.column() - 1;
    auto const dest = after.number();
    if ( !after.done() )
      after.fail( "unexpected text" );
    dests.push_back( { states.size() - 1, states.back().transitions.size(), c.line(), dcol, dest } );
    states.back().transitions.push_back( std::move( t ) );
  }
  if ( states.empty() )
    throw parse_error( "automaton without states", lines.back().number, 1 );
  for ( auto const& d : dests )
  {
    if ( d.dest >= states.size() )
      throw parse_error( "destination state out of range", d.line, d.column );
    states[d.state].transitions[d.transition].dest = d.dest;
  }
  return automaton( a, std::move( states ) );
}

std::string to_dot( automaton const& m )
{
  auto const& a = m.alphabet();
  std::ostringstream os;
  os << "digraph efsm {\n  rankdir=LR;\n  node [shape=box];\n";
  for ( std::size_t q = 0; q < m.num_states(); ++q )
  {
    auto const& s = m.states()[q];
    os << "  q" << q << " [label=\"q" << q << "\\n" << a.output_event_name( s.output_event );
    auto const alg = algorithm_label( s.algorithm, a );
    if ( !alg.empty() )
      os << "\\n" << alg;
    os << "\"" << ( q == 0 ? ", peripheries=2" : "" ) << "];\n";
  }
  for ( std::size_t q = 0; q < m.num_states(); ++q )
  {
    auto const& ts = m.states()[q].transitions;
    for ( std::size_t k = 0; k < ts.size(); ++k )
      os << "  q" << q << " -> q" << ts[k].dest << " [label=\"" << k + 1 << ": "
         << a.input_events.at( static_cast<std::size_t>( ts[k].input_event ) ) << " ["
         << guard_to_string( ts[k].guard, a ) << "]\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_json( automaton const& m )
{
  auto const& a = m.alphabet();
  nlohmann::json j;
  j["inevents"] = a.input_events;
  j["outevents"] = a.output_events;
  j["invars"] = a.input_vars;
  j["outvars"] = a.output_vars;
  j["states"] = nlohmann::json::array();
  for ( auto const& s : m.states() )
  {
    nlohmann::json st;
    st["output_event"] = s.output_event == epsilon ? nlohmann::json() : nlohmann::json( a.output_event_name( s.output_event ) );
    std::string f, t;
    for ( auto const& u : s.algorithm )
    {
      f += u.when_false ? '1' : '0';
      t += u.when_true ? '1' : '0';
    }
    st["algorithm"] = { { "0", f }, { "1", t } };
    st["transitions"] = nlohmann::json::array();
    for ( auto const& tr : s.transitions )
      st["transitions"].push_back( { { "event", a.input_events.at( static_cast<std::size_t>( tr.input_event ) ) },
                                     { "guard", guard_to_string( tr.guard, a ) },
                                     { "dest", tr.dest } } );
    j["states"].push_back( std::move( st ) );
  }
  return j.dump( 2 ) + "\n";
}

/* LTL and plants */

std::vector<ltl::formula_ptr> parse_ltl( std::string_view text, alphabet const& a )
{
  std::vector<ltl::formula_ptr> out;
  for ( auto const& l : lines_of( text ) )
  {
    auto const offset = l.text.find_first_not_of( " \t" );
    try
    {
      out.push_back( ltl::parse( l.text, a ) );
    }
    catch ( ltl::syntax_error const& e )
    {
      std::string what = e.what();
      what = what.substr( 0, what.rfind( " at position" ) );
      throw parse_error( what, l.number, std::max( e.position(), offset ) + 1 );
    }
  }
  if ( out.empty() )
    throw parse_error( "no formulas", 1, 1 );
  return out;
}

plant_model parse_plant( std::string_view text, alphabet const& a )
{
  auto const lines = lines_of( text );
  if ( lines.empty() )
    throw parse_error( "empty plant file", 1, 1 );
  {
    cursor c( lines[0].text, lines[0].number );
    if ( c.accept( "free" ) )
    {
      if ( !c.done() || lines.size() > 1 )
        throw parse_error( "'free' must be the only statement", lines.size() > 1 ? lines[1].number : lines[0].number, 1 );
      return plant_model::free( a );
    }
  }

  std::optional<std::size_t> num_states, initial;
  std::vector<plant_rule> rules;
  for ( auto const& l : lines )
  {
    cursor c( l.text, l.number );
    if ( c.accept( "states" ) )
    {
      if ( num_states )
        c.fail( "duplicate 'states'" );
      num_states = c.number();
    }
    else if ( c.accept( "initial" ) )
    {
      if ( initial )
        c.fail( "duplicate 'initial'" );
      initial = c.number();
    }
    else
    {
      plant_rule r;
      r.from = c.number();
      if ( c.accept( "*" ) )
        r.on_event = std::nullopt;
      else
        r.on_event = output_event_or_dot( c, a );
      if ( !c.peek( '-' ) || c.rest().substr( 0, 2 ) != "->" )
      {
        auto const col = c.column();
        r.on_output = c.word();
        if ( r.on_output.size() != a.num_output_vars() || r.on_output.find_first_not_of( "01-" ) != std::string::npos )
          throw parse_error( "output pattern must be " + std::to_string( a.num_output_vars() ) + " of 0 1 -",
                             l.number, col );
      }
      c.expect( "->" );
      r.to = c.number();
      r.emit = input_action_of( c, a );
      if ( !c.done() )
        c.fail( "unexpected text" );
      rules.push_back( std::move( r ) );
    }
    if ( !c.done() )
      c.fail( "unexpected text" );
  }
  if ( !num_states )
    throw parse_error( "missing 'states'", lines.back().number, 1 );
  try
  {
    return plant_model( a, *num_states, initial.value_or( 0 ), std::move( rules ) );
  }
  catch ( std::invalid_argument const& e )
  {
    throw parse_error( e.what(), lines.front().number, 1 );
  }
}

std::string read_file( std::filesystem::path const& p )
{
  std::ifstream in( p, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot read " + p.string() );
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file( std::filesystem::path const& p, std::string const& text )
{
  std::ofstream out( p, std::ios::binary );
  if ( !out || !( out << text ) )
    throw std::runtime_error( "cannot write " + p.string() );
}

} // namespace efsm::io

#include <efsm/ltl.hpp>

#include <algorithm>
#include <cctype>
#include <functional>

namespace efsm::ltl
{

bool holds( atom const& a, step const& s )
{
  switch ( a.type )
  {
  case atom::kind::in_event:
    return s.in.event == a.index;
  case atom::kind::out_event:
    return s.out.event == a.index;
  case atom::kind::in_var:
    return s.in.input.at( static_cast<std::size_t>( a.index ) );
  case atom::kind::out_var:
    return s.out.output.at( static_cast<std::size_t>( a.index ) );
  }
  return false;
}

formula_ptr formula::make( op type, formula_ptr lhs, formula_ptr rhs )
{
  auto f = std::make_shared<formula>();
  f->type = type;
  f->lhs = std::move( lhs );
  f->rhs = std::move( rhs );
  return f;
}

formula_ptr formula::make_atom( atom a )
{
  auto f = std::make_shared<formula>();
  f->type = op::prop;
  f->a = a;
  return f;
}

bool operator==( formula const& x, formula const& y )
{
  if ( x.type != y.type )
    return false;
  if ( x.type == op::prop )
    return x.a == y.a;
  auto same = []( formula_ptr const& p, formula_ptr const& q ) { return ( !p && !q ) || ( p && q && *p == *q ); };
  return same( x.lhs, y.lhs ) && same( x.rhs, y.rhs );
}

/* parser */

namespace
{

class parser
{
public:
  parser( std::string_view text, alphabet const& alpha ) : text_( text ), alpha_( alpha ) {}

  formula_ptr run()
  {
    auto f = implication();
    skip();
    if ( pos_ != text_.size() )
      throw syntax_error( "unexpected '" + std::string( 1, text_[pos_] ) + "'", pos_ );
    return f;
  }

private:
  void skip()
  {
    while ( pos_ < text_.size() && std::isspace( static_cast<unsigned char>( text_[pos_] ) ) )
      ++pos_;
  }

  bool accept( std::string_view token )
  {
    skip();
    if ( text_.substr( pos_, token.size() ) != token )
      return false;
    pos_ += token.size();
    return true;
  }

  static bool ident_char( char c ) { return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_'; }

  /* identifier, without consuming it */
  std::string_view peek_ident()
  {
    skip();
    auto end = pos_;
    while ( end < text_.size() && ident_char( text_[end] ) )
      ++end;
    return text_.substr( pos_, end - pos_ );
  }

  formula_ptr implication()
  {
    auto lhs = disjunction();
    if ( accept( "->" ) )
      return formula::make( op::implication, lhs, implication() );
    return lhs;
  }

  formula_ptr disjunction()
  {
    auto f = conjunction();
    for ( ;; )
    {
      if ( accept( "||" ) || accept( "|" ) )
        f = formula::make( op::disjunction, f, conjunction() );
      else
        return f;
    }
  }

  formula_ptr conjunction()
  {
    auto f = binary_temporal();
    for ( ;; )
    {
      if ( accept( "&&" ) || accept( "&" ) )
        f = formula::make( op::conjunction, f, binary_temporal() );
      else
        return f;
    }
  }

  formula_ptr binary_temporal()
  {
    auto lhs = unary();
    auto const id = peek_ident();
    if ( id == "U" || id == "R" )
    {
      pos_ += 1;
      return formula::make( id == "U" ? op::until : op::release, lhs, binary_temporal() );
    }
    return lhs;
  }

  formula_ptr unary()
  {
    skip();
    if ( pos_ < text_.size() && ( text_[pos_] == '!' || text_[pos_] == '~' ) && text_.substr( pos_, 2 ) != "!=" )
    {
      ++pos_;
      return formula::make( op::negation, unary() );
    }
    auto const id = peek_ident();
    if ( id == "X" || id == "F" || id == "G" )
    {
      pos_ += 1;
      return formula::make( id == "X" ? op::next : id == "F" ? op::finally : op::globally, unary() );
    }
    return primary();
  }

  formula_ptr primary()
  {
    skip();
    auto const start = pos_;
    if ( accept( "(" ) )
    {
      auto f = implication();
      if ( !accept( ")" ) )
        throw syntax_error( "expected ')'", pos_ );
      return f;
    }
    auto const id = std::string( peek_ident() );
    if ( id.empty() )
      throw syntax_error( pos_ < text_.size() ? "unexpected '" + std::string( 1, text_[pos_] ) + "'"
                                              : "unexpected end of formula",
                          pos_ );
    pos_ += id.size();
    if ( id == "true" )
      return formula::make( op::top );
    if ( id == "false" )
      return formula::make( op::bottom );
    if ( id == "in" || id == "out" )
      return event_atom( id == "in", start );
    return formula::make_atom( variable( id, start ) );
  }

  formula_ptr event_atom( bool input, std::size_t start )
  {
    bool negated = false;
    if ( accept( "!=" ) )
      negated = true;
    else if ( !accept( "=" ) )
      throw syntax_error( "expected '=' or '!=' after event keyword", pos_ );
    skip();
    atom a;
    a.type = input ? atom::kind::in_event : atom::kind::out_event;
    if ( !input && accept( "." ) )
      a.index = epsilon;
    else
    {
      auto const name = std::string( peek_ident() );
      if ( name.empty() )
        throw syntax_error( "expected event name", pos_ );
      auto const e = input ? alpha_.find_input_event( name ) : alpha_.find_output_event( name );
      if ( !e )
        throw syntax_error( "unknown " + std::string( input ? "input" : "output" ) + " event '" + name + "'", start );
      pos_ += name.size();
      a.index = *e;
    }
    auto f = formula::make_atom( a );
    return negated ? formula::make( op::negation, f ) : f;
  }

  atom variable( std::string const& id, std::size_t start )
  {
    auto find = []( std::vector<std::string> const& names, std::string const& n ) -> int {
      for ( std::size_t i = 0; i < names.size(); ++i )
        if ( names[i] == n )
          return static_cast<int>( i );
      return -1;
    };
    if ( auto i = find( alpha_.input_vars, id ); i >= 0 )
      return { atom::kind::in_var, i };
    if ( auto i = find( alpha_.output_vars, id ); i >= 0 )
      return { atom::kind::out_var, i };
    if ( id.size() > 1 && ( id[0] == 'x' || id[0] == 'z' ) &&
         std::all_of( id.begin() + 1, id.end(), []( char c ) { return std::isdigit( static_cast<unsigned char>( c ) ); } ) )
    {
      auto const n = std::stoul( id.substr( 1 ) );
      auto const limit = id[0] == 'x' ? alpha_.num_input_vars() : alpha_.num_output_vars();
      if ( n >= 1 && n <= limit )
        return { id[0] == 'x' ? atom::kind::in_var : atom::kind::out_var, static_cast<int>( n - 1 ) };
    }
    throw syntax_error( "unknown proposition '" + id + "'", start );
  }

  std::string_view text_;
  alphabet const& alpha_;
  std::size_t pos_ = 0;
};

} // namespace

formula_ptr parse( std::string_view text, alphabet const& alpha )
{
  return parser( text, alpha ).run();
}

std::string to_string( formula const& f, alphabet const& alpha )
{
  switch ( f.type )
  {
  case op::top:
    return "true";
  case op::bottom:
    return "false";
  case op::prop:
    switch ( f.a.type )
    {
    case atom::kind::in_event:
      return "in=" + alpha.input_events.at( f.a.index );
    case atom::kind::out_event:
      return "out=" + alpha.output_event_name( f.a.index );
    case atom::kind::in_var:
      return alpha.input_vars.at( f.a.index );
    case atom::kind::out_var:
      return alpha.output_vars.at( f.a.index );
    }
    break;
  case op::negation:
    return "!(" + to_string( *f.lhs, alpha ) + ")";
  case op::next:
    return "X(" + to_string( *f.lhs, alpha ) + ")";
  case op::globally:
    return "G(" + to_string( *f.lhs, alpha ) + ")";
  case op::finally:
    return "F(" + to_string( *f.lhs, alpha ) + ")";
  default:
    break;
  }
  char const* sym = f.type == op::conjunction   ? " & "
                    : f.type == op::disjunction ? " | "
                    : f.type == op::implication ? " -> "
                    : f.type == op::until       ? " U "
                                                : " R ";
  return "(" + to_string( *f.lhs, alpha ) + sym + to_string( *f.rhs, alpha ) + ")";
}

/* normal form */

namespace
{

formula_ptr push( formula_ptr const& f, bool negate )
{
  using F = formula;
  switch ( f->type )
  {
  case op::top:
    return F::make( negate ? op::bottom : op::top );
  case op::bottom:
    return F::make( negate ? op::top : op::bottom );
  case op::prop:
    return negate ? F::make( op::negation, f ) : f;
  case op::negation:
    return push( f->lhs, !negate );
  case op::conjunction:
    return F::make( negate ? op::disjunction : op::conjunction, push( f->lhs, negate ), push( f->rhs, negate ) );
  case op::disjunction:
    return F::make( negate ? op::conjunction : op::disjunction, push( f->lhs, negate ), push( f->rhs, negate ) );
  case op::implication:
    return F::make( negate ? op::conjunction : op::disjunction, push( f->lhs, !negate ), push( f->rhs, negate ) );
  case op::next:
    return F::make( op::next, push( f->lhs, negate ) );
  case op::until:
    return F::make( negate ? op::release : op::until, push( f->lhs, negate ), push( f->rhs, negate ) );
  case op::release:
    return F::make( negate ? op::until : op::release, push( f->lhs, negate ), push( f->rhs, negate ) );
  case op::globally:
    return F::make( negate ? op::until : op::release, F::make( negate ? op::top : op::bottom ),
                    push( f->lhs, negate ) );
  case op::finally:
    return F::make( negate ? op::release : op::until, F::make( negate ? op::bottom : op::top ),
                    push( f->lhs, negate ) );
  }
  return f;
}

} // namespace

formula_ptr nnf( formula_ptr const& f )
{
  return push( f, false );
}

bool is_propositional( formula const& f )
{
  switch ( f.type )
  {
  case op::top:
  case op::bottom:
  case op::prop:
    return true;
  case op::negation:
    return is_propositional( *f.lhs );
  case op::conjunction:
  case op::disjunction:
  case op::implication:
    return is_propositional( *f.lhs ) && is_propositional( *f.rhs );
  default:
    return false;
  }
}

bool holds( formula const& f, step const& s )
{
  switch ( f.type )
  {
  case op::top:
    return true;
  case op::bottom:
    return false;
  case op::prop:
    return holds( f.a, s );
  case op::negation:
    return !holds( *f.lhs, s );
  case op::conjunction:
    return holds( *f.lhs, s ) && holds( *f.rhs, s );
  case op::disjunction:
    return holds( *f.lhs, s ) || holds( *f.rhs, s );
  case op::implication:
    return !holds( *f.lhs, s ) || holds( *f.rhs, s );
  default:
    throw std::invalid_argument( "temporal operator in a propositional context" );
  }
}

std::size_t depth( formula const& f )
{
  std::size_t d = 0;
  if ( f.lhs )
    d = std::max( d, depth( *f.lhs ) );
  if ( f.rhs )
    d = std::max( d, depth( *f.rhs ) );
  return f.type == op::prop || f.type == op::top || f.type == op::bottom ? 0 : d + 1;
}

/* lasso semantics: fixpoints over the finite position graph */

namespace
{

std::vector<bool> evaluate( formula const& f, std::vector<step> const& trace, std::size_t cycle_begin )
{
  auto const n = trace.size();
  auto succ = [&]( std::size_t i ) { return i + 1 < n ? i + 1 : cycle_begin; };
  std::vector<bool> v( n );

  auto fixpoint = [&]( std::vector<bool> const& a, std::vector<bool> const& b, bool until ) {
    /* until: least fixpoint of b | (a & X v); release: greatest of b & (a | X v) */
    std::vector<bool> r( n, !until );
    for ( bool changed = true; changed; )
    {
      changed = false;
      for ( std::size_t k = n; k-- > 0; )
      {
        bool const next = r[succ( k )];
        bool const val = until ? ( b[k] || ( a[k] && next ) ) : ( b[k] && ( a[k] || next ) );
        if ( val != r[k] )
        {
          r[k] = val;
          changed = true;
        }
      }
    }
    return r;
  };

  switch ( f.type )
  {
  case op::top:
  case op::bottom:
  case op::prop:
    for ( std::size_t i = 0; i < n; ++i )
      v[i] = f.type == op::top || ( f.type == op::prop && holds( f.a, trace[i] ) );
    return v;
  case op::negation:
  {
    auto a = evaluate( *f.lhs, trace, cycle_begin );
    for ( std::size_t i = 0; i < n; ++i )
      v[i] = !a[i];
    return v;
  }
  case op::conjunction:
  case op::disjunction:
  case op::implication:
  {
    auto a = evaluate( *f.lhs, trace, cycle_begin );
    auto b = evaluate( *f.rhs, trace, cycle_begin );
    for ( std::size_t i = 0; i < n; ++i )
      v[i] = f.type == op::conjunction ? a[i] && b[i] : f.type == op::disjunction ? a[i] || b[i] : !a[i] || b[i];
    return v;
  }
  case op::next:
  {
    auto a = evaluate( *f.lhs, trace, cycle_begin );
    for ( std::size_t i = 0; i < n; ++i )
      v[i] = a[succ( i )];
    return v;
  }
  case op::until:
  case op::release:
    return fixpoint( evaluate( *f.lhs, trace, cycle_begin ), evaluate( *f.rhs, trace, cycle_begin ),
                     f.type == op::until );
  case op::globally:
    return fixpoint( std::vector<bool>( n, false ), evaluate( *f.lhs, trace, cycle_begin ), false );
  case op::finally:
    return fixpoint( std::vector<bool>( n, true ), evaluate( *f.lhs, trace, cycle_begin ), true );
  }
  return v;
}

} // namespace

bool holds_on_lasso( formula const& f, std::vector<step> const& trace, std::size_t cycle_begin )
{
  if ( trace.empty() || cycle_begin >= trace.size() )
    throw std::invalid_argument( "lasso needs a nonempty cycle" );
  return evaluate( f, trace, cycle_begin )[0];
}

} // namespace efsm::ltl

#include <charconv>
#include <cstdint>
#include <optional>
#include <set>

#include "adapterforge/spec_lang.hpp"

namespace adapterforge::spec {

namespace {

enum class Tok {
  Ident,
  String,
  Int,
  Float,
  ByteString,
  Punct,  // single character in `text`
  Arrow,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, decoded string, number spelling, or punctuation
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Returns the byte offset of the first malformed UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s)
{
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file) : src_(text), file_(file)
  {
    if (src_.starts_with("\xFF\xFE") || src_.starts_with("\xFE\xFF")) {
      throw ParseError(ErrorCode::Syntax, file_, 1, 1, "UTF-16 input is not supported; expected UTF-8");
    }
    if (src_.starts_with("\xEF\xBB\xBF")) {
      src_.remove_prefix(3);
    }
    if (auto bad = find_invalid_utf8(src_); bad != std::string_view::npos) {
      advance_to(bad);
      fail("invalid UTF-8 byte sequence");
    }
  }

  std::vector<Token> run()
  {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (c == 'x' && peek(1) == '"') {
        bump();
        t.kind = Tok::ByteString;
        t.text = read_string(t);
      } else if (is_ident_start(c)) {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) t.text += bump();
      } else if (c == '"') {
        t.kind = Tok::String;
        t.text = read_string(t);
      } else if (is_digit(c) || (c == '-' && is_digit(peek(1)))) {
        read_number(t);
      } else if (c == '-' && peek(1) == '>') {
        bump();
        bump();
        t.kind = Tok::Arrow;
        t.text = "->";
      } else if (std::string_view("{}()<>,;:=.[]@").find(c) != std::string_view::npos) {
        t.kind = Tok::Punct;
        t.text = std::string(1, bump());
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  char bump()
  {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
    return c;
  }

  void advance_to(std::size_t target)
  {
    while (pos_ < target) bump();
  }

  [[noreturn]] void fail(const std::string& msg) const
  {
    throw ParseError(ErrorCode::Syntax, file_, line_, col_, msg);
  }

  void skip_trivia()
  {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else {
        return;
      }
    }
  }

  std::string read_string(const Token& start)
  {
    bump();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw ParseError(ErrorCode::Syntax, file_, start.line, start.column, "unterminated string literal");
      }
      char c = bump();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= src_.size()) fail("unterminated escape");
      char e = bump();
      switch (e) {
        case '\\': out += '\\'; break;
        case '"': out += '"'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
  }

  void read_number(Token& t)
  {
    std::string text;
    if (src_[pos_] == '-') text += bump();
    while (is_digit(peek(0))) text += bump();
    bool is_float = false;
    if (peek(0) == '.' && is_digit(peek(1))) {
      is_float = true;
      text += bump();
      while (is_digit(peek(0))) text += bump();
    }
    if (peek(0) == 'e' || peek(0) == 'E') {
      std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
      if (is_digit(peek(1 + sign))) {
        is_float = true;
        text += bump();
        if (sign) text += bump();
        while (is_digit(peek(0))) text += bump();
      }
    }
    if (is_ident_start(peek(0))) fail("malformed number literal");
    t.kind = is_float ? Tok::Float : Tok::Int;
    t.text = std::move(text);
  }

  std::string_view src_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const std::string& file) : file_(file), toks_(Lexer(text, file).run()) {}

  ComponentSpec component()
  {
    ComponentSpec spec;
    const Token& head = expect_word("component");
    spec.loc = loc(head);
    const Token& name = expect(Tok::String, "component name string");
    if (!is_identifier(name.text)) error(name, ErrorCode::Syntax, "component name '" + name.text + "' is not an identifier");
    spec.name = name.text;
    expect_word("version");
    const Token& ver = expect(Tok::String, "version string");
    auto v = Version::parse(ver.text);
    if (!v) error(ver, ErrorCode::BadVersion, "version '" + ver.text + "' is not MAJOR.MINOR.PATCH");
    spec.version = *v;
    expect_punct('{');
    while (!at_punct('}')) {
      if (at_word("meta")) {
        next();
        MetaEntry entry;
        entry.key = dotted_name();
        expect_punct('=');
        entry.value = expect(Tok::String, "meta value string").text;
        expect_punct(';');
        spec.meta.push_back(std::move(entry));
      } else if (at_word("provides") || at_word("requires")) {
        InterfaceSpec iface = interface();
        auto& list = iface.direction == Direction::Provided ? spec.provided : spec.required;
        for (const auto& other : list) {
          if (other.name == iface.name) {
            throw ParseError(ErrorCode::DupName, file_, iface.loc.line, iface.loc.column,
                             "duplicate " + std::string(to_string(iface.direction)) + " interface '" + iface.name + "'");
          }
        }
        list.push_back(std::move(iface));
      } else {
        error(peek(), ErrorCode::Syntax, "expected 'meta', 'provides' or 'requires', found " + describe(peek()));
      }
    }
    expect_punct('}');
    expect_end();
    spec.normalize();
    return spec;
  }

  ProjectSpec project()
  {
    ProjectSpec spec;
    spec.loc = loc(expect_word("project"));
    const Token& name = expect(Tok::String, "project name string");
    if (!is_identifier(name.text)) error(name, ErrorCode::Syntax, "project name '" + name.text + "' is not an identifier");
    spec.name = name.text;
    expect_punct('{');
    std::set<std::string> seen_demands;
    while (!at_punct('}')) {
      if (at_word("uses")) {
        const Token& kw = next();
        ComponentUse use;
        use.loc = loc(kw);
        const Token& comp = expect(Tok::String, "component name string");
        if (!is_identifier(comp.text)) error(comp, ErrorCode::Syntax, "component name '" + comp.text + "' is not an identifier");
        use.component = comp.text;
        if (at_word("version")) {
          next();
          const Token& c = expect(Tok::String, "version constraint string");
          auto constraint = VersionConstraint::parse(c.text);
          if (!constraint) error(c, ErrorCode::BadConstraint, "constraint '" + c.text + "' must be '*', '=x.y.z' or '>=x.y.z'");
          use.constraint = *constraint;
        }
        expect_punct(';');
        if (spec.find_use(use.component)) error(comp, ErrorCode::DupUse, "component '" + use.component + "' is used twice");
        spec.uses.push_back(std::move(use));
      } else if (at_word("connect")) {
        Connection c;
        c.loc = loc(next());
        c.consumer = endpoint("requires");
        expect(Tok::Arrow, "'->'");
        c.provider = endpoint("provides");
        expect_punct(';');
        spec.connections.push_back(std::move(c));
      } else if (at_word("demand")) {
        next();
        ConceptId id = concept_path();
        expect_punct(';');
        if (seen_demands.insert(id.to_string()).second) spec.demands.push_back(std::move(id));
      } else {
        error(peek(), ErrorCode::Syntax, "expected 'uses', 'connect' or 'demand', found " + describe(peek()));
      }
    }
    expect_punct('}');
    expect_end();
    return spec;
  }

  OperationSig single_operation()
  {
    OperationSig op = operation();
    expect_end();
    return op;
  }

  Value single_literal()
  {
    Value v = literal();
    expect_end();
    return v;
  }

  SemType single_type()
  {
    SemType t = type();
    expect_end();
    return t;
  }

 private:
  InterfaceSpec interface()
  {
    InterfaceSpec iface;
    const Token& dir = next();
    iface.direction = dir.text == "provides" ? Direction::Provided : Direction::Required;
    expect_word("interface");
    const Token& name = expect(Tok::Ident, "interface name");
    iface.name = name.text;
    iface.loc = loc(name);
    expect_punct('{');
    while (!at_punct('}')) {
      OperationSig op = operation();
      if (iface.find_operation(op.name)) {
        throw ParseError(ErrorCode::DupName, file_, op.loc.line, op.loc.column,
                         "duplicate operation '" + op.name + "' in interface '" + iface.name + "'");
      }
      iface.operations.push_back(std::move(op));
    }
    expect_punct('}');
    return iface;
  }

  OperationSig operation()
  {
    OperationSig op;
    std::optional<ConceptId> concept_id;
    const Token& first = peek();
    while (at_punct('@')) {
      next();
      const Token& which = expect(Tok::Ident, "annotation name");
      if (which.text != "concept") error(which, ErrorCode::Syntax, "operations accept only @concept, found @" + which.text);
      if (concept_id) error(which, ErrorCode::Syntax, "duplicate @concept annotation");
      expect_punct('(');
      concept_id = concept_path();
      expect_punct(')');
    }
    const Token& kw = expect_word("op");
    op.loc = loc(concept_id ? first : kw);
    op.name = expect(Tok::Ident, "operation name").text;
    expect_punct('(');
    if (!at_punct(')')) {
      while (true) {
        ParamSig p = param();
        for (const auto& other : op.params) {
          if (other.name == p.name) {
            throw ParseError(ErrorCode::DupName, file_, p.loc.line, p.loc.column,
                             "duplicate parameter '" + p.name + "' in operation '" + op.name + "'");
          }
        }
        op.params.push_back(std::move(p));
        if (at_punct(',')) {
          next();
          continue;
        }
        break;
      }
    }
    expect_punct(')');
    op.returns = SemType{Prim::Unit, 0};
    if (peek().kind == Tok::Arrow) {
      next();
      op.returns = type();
    }
    expect_punct(';');
    if (!concept_id) {
      throw ParseError(ErrorCode::NoConcept, file_, op.loc.line, op.loc.column,
                       "operation '" + op.name + "' has no @concept annotation");
    }
    op.concept_id = std::move(*concept_id);
    return op;
  }

  ParamSig param()
  {
    ParamSig p;
    const Token& name = expect(Tok::Ident, "parameter name");
    p.name = name.text;
    p.loc = loc(name);
    expect_punct(':');
    p.ty = type();
    while (at_punct('@')) {
      next();
      const Token& which = expect(Tok::Ident, "annotation name");
      expect_punct('(');
      if (which.text == "concept") {
        if (p.concept_id) error(which, ErrorCode::Syntax, "duplicate @concept annotation");
        p.concept_id = concept_path();
      } else if (which.text == "unit") {
        if (p.unit) error(which, ErrorCode::Syntax, "duplicate @unit annotation");
        p.unit = expect(Tok::Ident, "unit name").text;
      } else {
        error(which, ErrorCode::Syntax, "unknown parameter annotation @" + which.text);
      }
      expect_punct(')');
    }
    if (at_punct('=')) {
      next();
      p.default_value = literal();
    }
    return p;
  }

  SemType type()
  {
    const Token& t = expect(Tok::Ident, "type");
    if (t.text == "list") {
      expect_punct('<');
      SemType inner = type();
      expect_punct('>');
      return {inner.base, inner.list_depth + 1};
    }
    auto prim = prim_from_string(t.text);
    if (!prim) error(t, ErrorCode::Syntax, "unknown type '" + t.text + "'");
    return {*prim, 0};
  }

  ConceptId concept_path()
  {
    const Token& start = peek();
    std::string path = expect(Tok::Ident, "concept segment").text;
    while (at_punct('.')) {
      next();
      path += '.';
      path += expect(Tok::Ident, "concept segment").text;
    }
    auto id = ConceptId::parse(path);
    if (!id) error(start, ErrorCode::Syntax, "concept '" + path + "' must use lowercase segments [a-z][a-z0-9_]*");
    return *id;
  }

  std::string dotted_name()
  {
    std::string out = expect(Tok::Ident, "name").text;
    while (at_punct('.')) {
      next();
      out += '.';
      out += expect(Tok::Ident, "name").text;
    }
    return out;
  }

  InterfaceRef endpoint(std::string_view direction_word)
  {
    InterfaceRef ref;
    ref.component = expect(Tok::Ident, "component name").text;
    expect_punct('.');
    expect_word(direction_word);
    expect_punct('.');
    ref.interface_name = expect(Tok::Ident, "interface name").text;
    return ref;
  }

  Value literal()
  {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Int: {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) error(t, ErrorCode::Syntax, "integer literal out of range");
        return Value(v);
      }
      case Tok::Float: {
        double v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) error(t, ErrorCode::Syntax, "float literal out of range");
        return Value(v);
      }
      case Tok::String: return Value(t.text);
      case Tok::ByteString: {
        if (t.text.size() % 2 != 0) error(t, ErrorCode::Syntax, "byte string needs an even number of hex digits");
        Bytes b;
        for (std::size_t i = 0; i < t.text.size(); i += 2) {
          unsigned int byte = 0;
          auto [ptr, ec] = std::from_chars(t.text.data() + i, t.text.data() + i + 2, byte, 16);
          if (ec != std::errc{} || ptr != t.text.data() + i + 2) error(t, ErrorCode::Syntax, "byte string must be hex");
          b.data.push_back(static_cast<std::uint8_t>(byte));
        }
        return Value(std::move(b));
      }
      case Tok::Ident:
        if (t.text == "true") return Value(true);
        if (t.text == "false") return Value(false);
        break;
      case Tok::Punct:
        if (t.text == "[") {
          Value::List items;
          if (!at_punct(']')) {
            while (true) {
              items.push_back(literal());
              if (!at_punct(',')) break;
              next();
            }
          }
          expect_punct(']');
          return Value(std::move(items));
        }
        break;
      default: break;
    }
    error(t, ErrorCode::Syntax, "expected literal, found " + describe(t));
  }

  const Token& peek() const { return toks_[idx_]; }

  const Token& next()
  {
    const Token& t = toks_[idx_];
    if (t.kind != Tok::End) ++idx_;
    return t;
  }

  bool at_punct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  const Token& expect(Tok kind, std::string_view what)
  {
    if (peek().kind != kind) error(peek(), ErrorCode::Syntax, "expected " + std::string(what) + ", found " + describe(peek()));
    return next();
  }

  const Token& expect_word(std::string_view w)
  {
    if (!at_word(w)) error(peek(), ErrorCode::Syntax, "expected '" + std::string(w) + "', found " + describe(peek()));
    return next();
  }

  void expect_punct(char c)
  {
    if (!at_punct(c)) error(peek(), ErrorCode::Syntax, std::string("expected '") + c + "', found " + describe(peek()));
    next();
  }

  void expect_end()
  {
    if (peek().kind != Tok::End) error(peek(), ErrorCode::Syntax, "unexpected trailing " + describe(peek()));
  }

  static std::string describe(const Token& t)
  {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string \"" + t.text + "\"";
      case Tok::ByteString: return "byte string";
      default: return "'" + t.text + "'";
    }
  }

  SourceLoc loc(const Token& t) const { return SourceLoc{file_, t.line, t.column}; }

  [[noreturn]] void error(const Token& t, ErrorCode code, const std::string& msg) const
  {
    throw ParseError(code, file_, t.line, t.column, msg);
  }

  std::string file_;
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

}  // namespace

ComponentSpec parse_component(std::string_view text, const std::string& file)
{
  return Parser(text, file).component();
}

ProjectSpec parse_project(std::string_view text, const std::string& file)
{
  return Parser(text, file).project();
}

OperationSig parse_operation(std::string_view text, const std::string& file)
{
  return Parser(text, file).single_operation();
}

Value parse_literal(std::string_view text)
{
  return Parser(text, {}).single_literal();
}

SemType parse_type(std::string_view text)
{
  return Parser(text, {}).single_type();
}

}  // namespace adapterforge::spec

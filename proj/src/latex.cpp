#include "mathseed/latex.hpp"

#include <array>
#include <unordered_map>

#include "mathseed/error.hpp"

namespace mathseed {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Command: return "Command";
    case TokenKind::Symbol: return "Symbol";
    case TokenKind::Digit: return "Digit";
    case TokenKind::Letter: return "Letter";
    case TokenKind::GroupOpen: return "GroupOpen";
    case TokenKind::GroupClose: return "GroupClose";
    case TokenKind::Superscript: return "Superscript";
    case TokenKind::Subscript: return "Subscript";
    case TokenKind::MathDelim: return "MathDelim";
    case TokenKind::Text: return "Text";
    case TokenKind::Whitespace: return "Whitespace";
  }
  return "?";
}

std::string_view to_string(AtomClass cls) {
  switch (cls) {
    case AtomClass::Ord: return "Ord";
    case AtomClass::Op: return "Op";
    case AtomClass::Bin: return "Bin";
    case AtomClass::Rel: return "Rel";
    case AtomClass::Open: return "Open";
    case AtomClass::Close: return "Close";
    case AtomClass::Punct: return "Punct";
  }
  return "?";
}

namespace {

struct CommandEntry {
  std::string_view name;
  CommandInfo info;
};

constexpr CommandInfo atom(std::string_view canonical, AtomClass cls) {
  return {canonical, CommandRole::Atom, cls};
}

const std::vector<CommandEntry>& command_entries() {
  using C = AtomClass;
  static const std::vector<CommandEntry> entries = [] {
    std::vector<CommandEntry> e;
    for (std::string_view g :
         {"\\alpha", "\\beta", "\\gamma", "\\delta", "\\epsilon", "\\varepsilon", "\\zeta", "\\eta",
          "\\theta", "\\vartheta", "\\iota", "\\kappa", "\\lambda", "\\mu", "\\nu", "\\xi", "\\pi",
          "\\rho", "\\sigma", "\\tau", "\\upsilon", "\\phi", "\\varphi", "\\chi", "\\psi", "\\omega",
          "\\Gamma", "\\Delta", "\\Theta", "\\Lambda", "\\Xi", "\\Pi", "\\Sigma", "\\Upsilon", "\\Phi",
          "\\Psi", "\\Omega", "\\infty", "\\ldots", "\\cdots"}) {
      e.push_back({g, atom(g, C::Ord)});
    }
    for (std::string_view b : {"\\cdot", "\\times", "\\div", "\\pm", "\\mp", "\\circ"}) {
      e.push_back({b, atom(b, C::Bin)});
    }
    for (std::string_view r : {"\\leq", "\\geq", "\\neq", "\\approx"}) e.push_back({r, atom(r, C::Rel)});
    e.push_back({"\\le", atom("\\leq", C::Rel)});
    e.push_back({"\\ge", atom("\\geq", C::Rel)});
    e.push_back({"\\ne", atom("\\neq", C::Rel)});
    for (std::string_view op : {"\\sum", "\\prod", "\\int"}) {
      e.push_back({op, {op, CommandRole::BigOp, C::Op}});
    }
    for (std::string_view f : {"\\frac", "\\dfrac", "\\tfrac"}) {
      e.push_back({f, {"\\frac", CommandRole::Frac, C::Ord}});
    }
    e.push_back({"\\sqrt", {"\\sqrt", CommandRole::Sqrt, C::Ord}});
    return e;
  }();
  return entries;
}

const std::unordered_map<std::string_view, CommandInfo>& command_map() {
  static const auto map = [] {
    std::unordered_map<std::string_view, CommandInfo> m;
    for (const auto& e : command_entries()) m.emplace(e.name, e.info);
    return m;
  }();
  return map;
}

constexpr std::string_view kSymbolChars = "+-=<>()[],.;:!?/*|'";
constexpr std::string_view kEscapable = "{}$%&#_";

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == '~';
}

// Returns the byte length of the code point at i, or 0 if the sequence is invalid.
std::size_t utf8_length(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len;
  std::uint32_t cp;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
    cp = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (len == 3 && (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF))) return 0;
  if (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) return 0;
  return len;
}

void validate_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t len = utf8_length(s, i);
    if (len == 0) throw Error(ErrorKind::InvalidUtf8, "malformed UTF-8 sequence", i);
    i += len;
  }
}

MathNode make_row(std::vector<MathNode> items) {
  if (items.size() == 1) return std::move(items.front());
  return Row{std::move(items)};
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : t_(tokens) {}

  MathNode parse_top() {
    const std::size_t start = t_.empty() ? 0 : t_.front().byte_offset;
    auto items = parse_items(Stop::End, start);
    if (items.empty()) throw Error(ErrorKind::EmptyMath, "math contains no atoms", start);
    return make_row(std::move(items));
  }

 private:
  enum class Stop { End, Group, Bracket };

  const std::vector<Token>& t_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= t_.size(); }

  void skip_ws() {
    while (!at_end() && t_[pos_].kind == TokenKind::Whitespace) ++pos_;
  }

  std::vector<MathNode> parse_items(Stop stop, std::size_t open_offset) {
    std::vector<MathNode> items;
    for (;;) {
      skip_ws();
      if (at_end()) {
        if (stop == Stop::End) return items;
        throw Error(ErrorKind::UnbalancedGroup,
                    stop == Stop::Group ? "unclosed '{'" : "unclosed '['", open_offset);
      }
      const Token& tok = t_[pos_];
      switch (tok.kind) {
        case TokenKind::GroupClose:
          if (stop != Stop::Group) throw Error(ErrorKind::UnbalancedGroup, "unmatched '}'", tok.byte_offset);
          ++pos_;
          return items;
        case TokenKind::Superscript:
        case TokenKind::Subscript: {
          ++pos_;
          MathNode arg = parse_arg(tok);
          attach(items, tok, std::move(arg));
          break;
        }
        case TokenKind::GroupOpen:
          ++pos_;
          items.push_back(Group{parse_group_body(tok.byte_offset)});
          break;
        case TokenKind::Symbol:
          if (stop == Stop::Bracket && tok.lexeme == "]") {
            ++pos_;
            return items;
          }
          items.push_back(parse_primary());
          break;
        default:
          items.push_back(parse_primary());
          break;
      }
    }
  }

  MathNode parse_group_body(std::size_t open_offset) {
    auto items = parse_items(Stop::Group, open_offset);
    if (items.empty()) throw Error(ErrorKind::EmptyGroup, "empty group", open_offset);
    return make_row(std::move(items));
  }

  MathNode parse_arg(const Token& owner) {
    skip_ws();
    if (at_end()) throw Error(ErrorKind::MissingArgument, owner.lexeme + " expects an argument", owner.byte_offset);
    const Token& tok = t_[pos_];
    switch (tok.kind) {
      case TokenKind::GroupOpen:
        ++pos_;
        return parse_group_body(tok.byte_offset);
      case TokenKind::GroupClose:
      case TokenKind::Superscript:
      case TokenKind::Subscript:
        throw Error(ErrorKind::MissingArgument, owner.lexeme + " expects an argument", tok.byte_offset);
      default:
        return parse_primary();
    }
  }

  MathNode parse_primary() {
    const Token& tok = t_[pos_++];
    switch (tok.kind) {
      case TokenKind::Letter:
      case TokenKind::Digit:
        return Atom{tok.lexeme, AtomClass::Ord};
      case TokenKind::Symbol: {
        auto cls = symbol_class(tok.lexeme);
        if (!cls) throw Error(ErrorKind::UnsupportedSymbol, "'" + tok.lexeme + "' in math", tok.byte_offset);
        return Atom{tok.lexeme, *cls};
      }
      case TokenKind::Command:
        return parse_command(tok);
      case TokenKind::MathDelim:
        throw Error(ErrorKind::NestedMath, "math delimiter inside math", tok.byte_offset);
      case TokenKind::Text:
        throw Error(ErrorKind::UnsupportedSymbol, "'" + tok.lexeme + "' in math", tok.byte_offset);
      default:
        throw Error(ErrorKind::MissingArgument, "unexpected " + std::string(to_string(tok.kind)),
                    tok.byte_offset);
    }
  }

  MathNode parse_command(const Token& tok) {
    const CommandInfo* info = lookup_command(tok.lexeme);
    if (!info) throw Error(ErrorKind::UnknownCommand, tok.lexeme, tok.byte_offset);
    switch (info->role) {
      case CommandRole::Atom:
        return Atom{std::string(info->canonical), info->cls};
      case CommandRole::BigOp:
        return BigOp{std::string(info->canonical), std::nullopt, std::nullopt};
      case CommandRole::Frac: {
        MathNode num = parse_arg(tok);
        MathNode den = parse_arg(tok);
        return Frac{std::move(num), std::move(den)};
      }
      case CommandRole::Sqrt: {
        skip_ws();
        std::optional<NodePtr> index;
        if (!at_end() && t_[pos_].kind == TokenKind::Symbol && t_[pos_].lexeme == "[") {
          const std::size_t open = t_[pos_].byte_offset;
          ++pos_;
          auto items = parse_items(Stop::Bracket, open);
          if (items.empty()) throw Error(ErrorKind::EmptyGroup, "empty radical index", open);
          index = NodePtr(make_row(std::move(items)));
        }
        MathNode radicand = parse_arg(tok);
        return Sqrt{std::move(radicand), std::move(index)};
      }
    }
    throw Error(ErrorKind::UnknownCommand, tok.lexeme, tok.byte_offset);
  }

  static void attach(std::vector<MathNode>& items, const Token& tok, MathNode arg) {
    if (items.empty()) throw Error(ErrorKind::DanglingScript, tok.lexeme + " has no base", tok.byte_offset);
    const bool sup = tok.kind == TokenKind::Superscript;
    MathNode& last = items.back();
    auto fill = [&](std::optional<NodePtr>& slot) {
      if (slot) throw Error(ErrorKind::DoubleScript, sup ? "double superscript" : "double subscript", tok.byte_offset);
      slot = NodePtr(std::move(arg));
    };
    if (last.is<BigOp>()) {
      BigOp op = last.as<BigOp>();
      fill(sup ? op.upper : op.lower);
      last = std::move(op);
    } else if (last.is<Script>()) {
      Script s = last.as<Script>();
      fill(sup ? s.superscript : s.subscript);
      last = std::move(s);
    } else {
      Script s{NodePtr(last), std::nullopt, std::nullopt};
      fill(sup ? s.superscript : s.subscript);
      last = std::move(s);
    }
  }
};

bool ends_with_letter_command(const std::string& s) {
  std::size_t i = s.size();
  while (i > 0 && is_ascii_alpha(s[i - 1])) --i;
  return i < s.size() && i > 0 && s[i - 1] == '\\';
}

void append_piece(std::string& out, const std::string& piece) {
  if (!piece.empty() && is_ascii_alpha(piece.front()) && ends_with_letter_command(out)) out += ' ';
  out += piece;
}

void debug_into(const MathNode& node, int depth, std::string& out);

void debug_child(std::string_view label, const MathNode& node, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += label;
  out += ":\n";
  debug_into(node, depth + 1, out);
}

void debug_into(const MathNode& node, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          out += "Atom " + n.symbol + " (" + std::string(to_string(n.cls)) + ")\n";
        } else if constexpr (std::is_same_v<T, Row>) {
          out += "Row\n";
          for (const auto& c : n.children) debug_into(c, depth + 1, out);
        } else if constexpr (std::is_same_v<T, Frac>) {
          out += "Frac\n";
          debug_child("num", *n.numerator, depth + 1, out);
          debug_child("den", *n.denominator, depth + 1, out);
        } else if constexpr (std::is_same_v<T, Script>) {
          out += "Script\n";
          debug_child("base", *n.base, depth + 1, out);
          if (n.superscript) debug_child("sup", **n.superscript, depth + 1, out);
          if (n.subscript) debug_child("sub", **n.subscript, depth + 1, out);
        } else if constexpr (std::is_same_v<T, Sqrt>) {
          out += "Sqrt\n";
          if (n.index) debug_child("index", **n.index, depth + 1, out);
          debug_child("radicand", *n.radicand, depth + 1, out);
        } else if constexpr (std::is_same_v<T, Group>) {
          out += "Group\n";
          debug_into(*n.child, depth + 1, out);
        } else {
          out += "BigOp " + n.symbol + "\n";
          if (n.lower) debug_child("lower", **n.lower, depth + 1, out);
          if (n.upper) debug_child("upper", **n.upper, depth + 1, out);
        }
      },
      node.v);
}

}  // namespace

const CommandInfo* lookup_command(std::string_view name) {
  const auto& m = command_map();
  auto it = m.find(name);
  return it == m.end() ? nullptr : &it->second;
}

std::optional<AtomClass> symbol_class(std::string_view s) {
  if (s.size() == 2 && s[0] == '\\') {
    if (s[1] == '{') return AtomClass::Open;
    if (s[1] == '}') return AtomClass::Close;
    if (kEscapable.find(s[1]) != std::string_view::npos) return AtomClass::Ord;
    return std::nullopt;
  }
  if (s.size() != 1) return std::nullopt;
  switch (s[0]) {
    case '+': case '-': case '*': return AtomClass::Bin;
    case '=': case '<': case '>': case ':': return AtomClass::Rel;
    case '(': case '[': return AtomClass::Open;
    case ')': case ']': return AtomClass::Close;
    case ',': case ';': return AtomClass::Punct;
    case '.': case '/': case '\'': case '|': case '!': case '?': return AtomClass::Ord;
    default: break;
  }
  if (is_ascii_alpha(s[0]) || is_ascii_digit(s[0])) return AtomClass::Ord;
  return std::nullopt;
}

std::vector<std::string> whitelist_symbols() {
  std::vector<std::string> out;
  for (char c = 'a'; c <= 'z'; ++c) out.emplace_back(1, c);
  for (char c = 'A'; c <= 'Z'; ++c) out.emplace_back(1, c);
  for (char c = '0'; c <= '9'; ++c) out.emplace_back(1, c);
  for (char c : kSymbolChars) out.emplace_back(1, c);
  for (char c : kEscapable) out.push_back(std::string("\\") + c);
  for (const auto& e : command_entries()) {
    if ((e.info.role == CommandRole::Atom || e.info.role == CommandRole::BigOp) && e.name == e.info.canonical) {
      out.emplace_back(e.name);
    }
  }
  return out;
}

std::vector<Token> tokenize(std::string_view src) {
  validate_utf8(src);
  std::vector<Token> out;
  auto push = [&](TokenKind kind, std::string_view lexeme, std::size_t offset) {
    if (kind == TokenKind::Whitespace && !out.empty() && out.back().kind == TokenKind::Whitespace) return;
    out.push_back(Token{kind, std::string(lexeme), offset});
  };
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (is_space(c)) {
      push(TokenKind::Whitespace, " ", i);
      ++i;
    } else if (c == '\\') {
      if (i + 1 >= n) throw Error(ErrorKind::UnknownCommand, "lone backslash", i);
      const char d = src[i + 1];
      if (is_ascii_alpha(d)) {
        std::size_t j = i + 1;
        while (j < n && is_ascii_alpha(src[j])) ++j;
        const std::string_view name = src.substr(i, j - i);
        if (name == "\\quad" || name == "\\qquad") {
          push(TokenKind::Whitespace, " ", i);
        } else if (lookup_command(name)) {
          push(TokenKind::Command, name, i);
        } else {
          throw Error(ErrorKind::UnknownCommand, std::string(name), i);
        }
        i = j;
        continue;
      }
      if (d == '[' || d == ']' || d == '(' || d == ')') {
        push(TokenKind::MathDelim, src.substr(i, 2), i);
      } else if (kEscapable.find(d) != std::string_view::npos) {
        push(TokenKind::Symbol, src.substr(i, 2), i);
      } else if (d == ',' || d == ';' || d == ':' || d == '!' || d == '\\' || is_space(d)) {
        push(TokenKind::Whitespace, " ", i);
      } else {
        throw Error(ErrorKind::UnknownCommand, "\\" + std::string(1, d), i);
      }
      i += 2;
    } else if (c == '$') {
      const bool dbl = i + 1 < n && src[i + 1] == '$';
      push(TokenKind::MathDelim, dbl ? "$$" : "$", i);
      i += dbl ? 2 : 1;
    } else if (c == '{') {
      push(TokenKind::GroupOpen, "{", i++);
    } else if (c == '}') {
      push(TokenKind::GroupClose, "}", i++);
    } else if (c == '^') {
      push(TokenKind::Superscript, "^", i++);
    } else if (c == '_') {
      push(TokenKind::Subscript, "_", i++);
    } else if (is_ascii_digit(c)) {
      push(TokenKind::Digit, src.substr(i, 1), i);
      ++i;
    } else if (is_ascii_alpha(c)) {
      push(TokenKind::Letter, src.substr(i, 1), i);
      ++i;
    } else if (kSymbolChars.find(c) != std::string_view::npos) {
      push(TokenKind::Symbol, src.substr(i, 1), i);
      ++i;
    } else {
      const std::size_t len = utf8_length(src, i);
      push(TokenKind::Text, src.substr(i, len), i);
      i += len;
    }
  }
  return out;
}

MathNode parse_math(const std::vector<Token>& tokens) { return Parser(tokens).parse_top(); }

MathNode parse_math(std::string_view source) { return parse_math(tokenize(source)); }

ProblemDocument parse_document(std::string_view source) {
  auto tokens = tokenize(source);
  ProblemDocument doc;
  std::string text;
  auto flush_text = [&] {
    if (text.empty()) return;
    if (!doc.segments.empty() && std::holds_alternative<TextRun>(doc.segments.back())) {
      std::get<TextRun>(doc.segments.back()).text += text;
    } else {
      doc.segments.push_back(TextRun{text});
    }
    text.clear();
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& tok = tokens[i];
    if (tok.kind != TokenKind::MathDelim) {
      text += tok.lexeme;
      ++i;
      continue;
    }
    if (tok.lexeme == "\\]" || tok.lexeme == "\\)") {
      throw Error(ErrorKind::StrayDelimiter, tok.lexeme + " without opener", tok.byte_offset);
    }
    const bool display = tok.lexeme == "$$" || tok.lexeme == "\\[";
    const std::string closer = tok.lexeme == "\\[" ? "\\]" : tok.lexeme == "\\(" ? "\\)" : tok.lexeme;
    std::vector<Token> body;
    std::size_t j = i + 1;
    bool closed = false;
    bool reopen = false;
    for (; j < tokens.size(); ++j) {
      const Token& t = tokens[j];
      if (t.kind != TokenKind::MathDelim) {
        body.push_back(t);
        continue;
      }
      if (t.lexeme == closer) {
        closed = true;
        break;
      }
      // "$a$$b$" is two adjacent inline formulas, as in TeX.
      if (closer == "$" && t.lexeme == "$$") {
        closed = true;
        reopen = true;
        break;
      }
      throw Error(ErrorKind::NestedMath, t.lexeme + " inside math", t.byte_offset,
                  doc.segments.size() + (text.empty() ? 0 : 1));
    }
    if (!closed) throw Error(ErrorKind::UnterminatedMath, tok.lexeme + " never closed", tok.byte_offset);

    flush_text();
    const std::size_t segment = doc.segments.size();
    bool only_space = true;
    for (const auto& t : body) only_space = only_space && t.kind == TokenKind::Whitespace;
    if (only_space) throw Error(ErrorKind::EmptyMath, "empty formula", tok.byte_offset, segment);
    try {
      MathNode node = parse_math(body);
      if (display) {
        doc.segments.push_back(DisplayMath{std::move(node)});
      } else {
        doc.segments.push_back(InlineMath{std::move(node)});
      }
    } catch (const Error& e) {
      throw Error(e.kind(), e.detail(), e.offset(), segment);
    }
    if (reopen) {
      // The second '$' of "$$" opens the next inline formula.
      tokens[j] = Token{TokenKind::MathDelim, "$", tokens[j].byte_offset + 1};
      i = j;
      continue;
    }
    i = j + 1;
  }
  flush_text();
  return doc;
}

std::string canonical_form(const MathNode& node) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          return n.symbol;
        } else if constexpr (std::is_same_v<T, Row>) {
          std::string out;
          for (const auto& c : n.children) append_piece(out, canonical_form(c));
          return out;
        } else if constexpr (std::is_same_v<T, Frac>) {
          return "\\frac{" + canonical_form(*n.numerator) + "}{" + canonical_form(*n.denominator) + "}";
        } else if constexpr (std::is_same_v<T, Script>) {
          std::string out = canonical_form(*n.base);
          if (n.subscript) out += "_{" + canonical_form(**n.subscript) + "}";
          if (n.superscript) out += "^{" + canonical_form(**n.superscript) + "}";
          return out;
        } else if constexpr (std::is_same_v<T, Sqrt>) {
          std::string out = "\\sqrt";
          if (n.index) out += "[" + canonical_form(**n.index) + "]";
          return out + "{" + canonical_form(*n.radicand) + "}";
        } else if constexpr (std::is_same_v<T, Group>) {
          return "{" + canonical_form(*n.child) + "}";
        } else {
          std::string out = n.symbol;
          if (n.lower) out += "_{" + canonical_form(**n.lower) + "}";
          if (n.upper) out += "^{" + canonical_form(**n.upper) + "}";
          return out;
        }
      },
      node.v);
}

std::string serialize_document(const ProblemDocument& doc) {
  std::string out;
  bool prev_inline = false;
  for (const auto& seg : doc.segments) {
    if (const auto* t = std::get_if<TextRun>(&seg)) {
      out += t->text;
      prev_inline = false;
    } else if (const auto* m = std::get_if<InlineMath>(&seg)) {
      const std::string body = canonical_form(m->node);
      out += prev_inline ? "\\(" + body + "\\)" : "$" + body + "$";
      prev_inline = true;
    } else {
      out += "\\[" + canonical_form(std::get<DisplayMath>(seg).node) + "\\]";
      prev_inline = false;
    }
  }
  return out;
}

std::string debug_string(const MathNode& node) {
  std::string out;
  debug_into(node, 0, out);
  return out;
}

}  // namespace mathseed

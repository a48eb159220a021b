#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace mathseed {

enum class TokenKind {
  Command,
  Symbol,
  Digit,
  Letter,
  GroupOpen,
  GroupClose,
  Superscript,
  Subscript,
  MathDelim,
  Text,
  Whitespace,
};

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t byte_offset = 0;
  bool operator==(const Token&) const = default;
};

std::string_view to_string(TokenKind kind);

enum class AtomClass { Ord, Op, Bin, Rel, Open, Close, Punct };

std::string_view to_string(AtomClass cls);

// Immutable shared box giving recursive AST nodes value semantics.
template <class T>
class Indirect {
 public:
  Indirect(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}
  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  const T& get() const { return *ptr_; }
  friend bool operator==(const Indirect& a, const Indirect& b) {
    return a.ptr_ == b.ptr_ || *a.ptr_ == *b.ptr_;
  }

 private:
  std::shared_ptr<const T> ptr_;
};

struct MathNode;
using NodePtr = Indirect<MathNode>;

struct Atom {
  std::string symbol;
  AtomClass cls = AtomClass::Ord;
  bool operator==(const Atom&) const = default;
};

struct Row {
  std::vector<MathNode> children;  // size >= 2 when produced by the parser
  bool operator==(const Row& other) const;
};

struct Frac {
  NodePtr numerator;
  NodePtr denominator;
  bool operator==(const Frac&) const = default;
};

struct Script {
  NodePtr base;
  std::optional<NodePtr> superscript;
  std::optional<NodePtr> subscript;
  bool operator==(const Script&) const = default;
};

struct Sqrt {
  NodePtr radicand;
  std::optional<NodePtr> index;
  bool operator==(const Sqrt&) const = default;
};

struct Group {
  NodePtr child;
  bool operator==(const Group&) const = default;
};

struct BigOp {
  std::string symbol;
  std::optional<NodePtr> lower;
  std::optional<NodePtr> upper;
  bool operator==(const BigOp&) const = default;
};

struct MathNode {
  std::variant<Atom, Row, Frac, Script, Sqrt, Group, BigOp> v;

  template <class T>
    requires(!std::is_same_v<std::decay_t<T>, MathNode>)
  MathNode(T value) : v(std::move(value)) {}

  template <class T>
  bool is() const { return std::holds_alternative<T>(v); }
  template <class T>
  const T& as() const { return std::get<T>(v); }

  bool operator==(const MathNode& other) const { return v == other.v; }
};

inline bool Row::operator==(const Row& other) const { return children == other.children; }

struct TextRun {
  std::string text;
  bool operator==(const TextRun&) const = default;
};
struct InlineMath {
  MathNode node;
  bool operator==(const InlineMath&) const = default;
};
struct DisplayMath {
  MathNode node;
  bool operator==(const DisplayMath&) const = default;
};

using Segment = std::variant<TextRun, InlineMath, DisplayMath>;

struct ProblemDocument {
  std::vector<Segment> segments;
  bool operator==(const ProblemDocument&) const = default;
};

// Whitelist entry for a backslash command.
enum class CommandRole { Atom, BigOp, Frac, Sqrt };

struct CommandInfo {
  std::string_view canonical;  // aliases resolve to their primary spelling
  CommandRole role;
  AtomClass cls;
};

const CommandInfo* lookup_command(std::string_view name);

// Every atom or big-operator symbol the parser can emit.
std::vector<std::string> whitelist_symbols();

// Classification used for single-character atoms; nullopt if the character is not a math symbol.
std::optional<AtomClass> symbol_class(std::string_view symbol);

std::vector<Token> tokenize(std::string_view source);
MathNode parse_math(const std::vector<Token>& tokens);
MathNode parse_math(std::string_view source);
ProblemDocument parse_document(std::string_view source);

std::string canonical_form(const MathNode& node);
std::string serialize_document(const ProblemDocument& doc);

// Renders the node tree as an indented outline for debugging and CLI output.
std::string debug_string(const MathNode& node);

}  // namespace mathseed

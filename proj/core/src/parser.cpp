/*
 * Copyright (C) 2026 The gbcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gbcalc/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace gbcalc {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

namespace {

enum class TokKind { Ident, Punct, End };

struct Token {
  TokKind kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      out.push_back({TokKind::Ident, std::string(src.substr(i, j - i)), line, col});
      advance(j - i);
      continue;
    }
    if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') {
      out.push_back({TokKind::Punct, ":=", line, col});
      advance(2);
      continue;
    }
    if (std::string_view("{}();,.=").find(c) != std::string_view::npos) {
      out.push_back({TokKind::Punct, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({TokKind::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, bool allow_itself)
      : toks_(std::move(toks)), allow_itself_(allow_itself) {}

  Program program() {
    Program p;
    while (!at_end()) {
      if (peek_is("class")) {
        parse_class(p);
      } else if (peek_is("main")) {
        parse_main(p);
      } else {
        fail("expected 'class' or 'main'");
      }
    }
    return p;
  }

  ExprPtr expression_only() {
    auto e = expr();
    if (!at_end()) fail("unexpected '" + peek().text + "' after expression");
    return e;
  }

  // Pieces used by the annotation reader.
  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == TokKind::End; }
  bool peek_is(const char* text) const {
    return peek().kind != TokKind::End && peek().text == text;
  }
  Token take() { return toks_[pos_++]; }

  void expect(const char* text) {
    if (!peek_is(text)) {
      fail(std::string("expected '") + text + "' but found " + describe(peek()));
    }
    take();
  }

  std::string any_ident(const char* what) {
    if (peek().kind != TokKind::Ident) {
      fail(std::string("expected ") + what + " but found " + describe(peek()));
    }
    return take().text;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }

  ExprPtr expr() {
    ExprPtr e = primary();
    while (peek_is(".")) {
      take();
      e = make_field(e, name("field name"));
    }
    return e;
  }

 private:
  static std::string describe(const Token& t) {
    if (t.kind == TokKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  // An identifier used as a binder or member name: reserved words rejected.
  std::string name(const char* what) {
    const Token& t = peek();
    if (t.kind != TokKind::Ident) {
      fail(std::string("expected ") + what + " but found " + describe(t));
    }
    if (is_reserved_word(t.text)) {
      fail("reserved word '" + t.text + "' cannot be used as " + what);
    }
    return take().text;
  }

  void parse_class(Program& p) {
    Token kw = take();
    ClassDecl cls;
    cls.name = name("class name");
    if (cls.name == kObjectClass || p.classes.count(cls.name)) {
      throw ParseError("duplicate class '" + cls.name + "'", kw.line, kw.column);
    }
    if (peek_is("extends")) {
      take();
      if (peek_is(kObjectClass)) {
        cls.parent = take().text;
      } else {
        cls.parent = name("superclass name");
      }
    }
    expect("{");
    while (!peek_is("}")) {
      if (!peek_is("method")) fail("expected 'method' or '}'");
      Token mkw = take();
      std::string m = name("method name");
      if (cls.methods.count(m)) {
        throw ParseError("duplicate method '" + cls.name + "." + m + "'", mkw.line,
                         mkw.column);
      }
      expect("(");
      expect(")");
      cls.methods.emplace(m, body());
    }
    expect("}");
    p.classes.emplace(cls.name, std::move(cls));
  }

  void parse_main(Program& p) {
    Token kw = take();
    if (p.classes.count(kMainClass)) {
      throw ParseError("duplicate main block", kw.line, kw.column);
    }
    ClassDecl cls;
    cls.name = kMainClass;
    cls.methods.emplace(kMainMethod, body());
    p.classes.emplace(cls.name, std::move(cls));
  }

  // { stmts } with a trailing skip appended (method bodies are skip-terminated).
  CommandPtr body() {
    expect("{");
    auto stmts = statements();
    expect("}");
    stmts.push_back(make_skip());
    return make_block(stmts);
  }

  std::vector<CommandPtr> statements() {
    std::vector<CommandPtr> out;
    while (!peek_is("}") && !at_end()) out.push_back(statement());
    return out;
  }

  CommandPtr statement() {
    if (peek_is("decl")) {
      take();
      std::string x = name("variable name");
      expect("=");
      auto e = expr();
      expect(";");
      return make_decl(std::move(x), std::move(e));
    }
    if (peek_is("skip")) {
      take();
      expect(";");
      return make_skip();
    }
    if (peek_is("spawn")) {
      take();
      auto [recv, method] = call_target();
      expect(";");
      return make_spawn(std::move(recv), std::move(method));
    }
    if (peek_is("sync")) {
      take();
      expect("(");
      auto g = expr();
      expect(")");
      expect("{");
      auto stmts = statements();
      expect("}");
      return make_sync(std::move(g), make_block(stmts));
    }
    if (peek_is("lock") || peek_is("unlock")) {
      fail("lock/unlock cannot be written in source; use sync");
    }
    // Assignment or call: both start with an expression chain.
    const Token start = peek();
    ExprPtr e = primary();
    while (peek_is(".")) {
      take();
      std::string member = name("member name");
      if (peek_is("(")) {
        take();
        expect(")");
        expect(";");
        return make_call(std::move(e), std::move(member));
      }
      e = make_field(std::move(e), std::move(member));
    }
    if (!peek_is(":=")) fail("expected ':=' or a method call");
    take();
    auto value = expr();
    expect(";");
    if (const auto* v = std::get_if<VarExpr>(&e->node)) {
      return make_assign_var(v->name, std::move(value));
    }
    if (const auto* f = std::get_if<FieldExpr>(&e->node)) {
      if (const auto* rv = std::get_if<VarExpr>(&f->receiver->node)) {
        return make_assign_field(rv->name, f->field, std::move(value));
      }
    }
    throw ParseError("assignment target must be a variable or x.f", start.line,
                     start.column);
  }

  std::pair<ExprPtr, std::string> call_target() {
    ExprPtr e = primary();
    for (;;) {
      expect(".");
      std::string member = name("member name");
      if (peek_is("(")) {
        take();
        expect(")");
        return {std::move(e), std::move(member)};
      }
      e = make_field(std::move(e), std::move(member));
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (t.kind != TokKind::Ident) fail("expected an expression but found " + describe(t));
    if (t.text == "new") {
      take();
      std::string cls = peek_is(kObjectClass) ? take().text : name("class name");
      std::vector<std::pair<std::string, ExprPtr>> inits;
      if (peek_is("{")) {
        take();
        std::set<std::string> seen;
        while (!peek_is("}")) {
          if (!inits.empty()) expect(",");
          const Token ft = peek();
          std::string f = name("field name");
          if (!seen.insert(f).second) {
            throw ParseError("field '" + f + "' initialised twice", ft.line, ft.column);
          }
          expect("=");
          inits.emplace_back(std::move(f), expr());
        }
        take();
      }
      return make_new(std::move(cls), std::move(inits));
    }
    if (t.text == kThis) {
      take();
      return make_var(kThis);
    }
    if (t.text == kItself && allow_itself_) {
      take();
      return make_var(kItself);
    }
    return make_var(name("variable name"));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool allow_itself_;
};

}  // namespace

Program parse_program(std::string_view text) {
  Parser p(lex(text), /*allow_itself=*/false);
  return p.program();
}

ExprPtr parse_expression(std::string_view text, bool allow_itself) {
  Parser p(lex(text), allow_itself);
  return p.expression_only();
}

std::vector<Annotation> parse_annotations(std::string_view text) {
  std::vector<Annotation> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::vector<Token> toks;
    try {
      toks = lex(line);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no, e.column());
    }
    for (auto& t : toks) t.line = line_no;
    Parser p(std::move(toks), /*allow_itself=*/true);

    Annotation a;
    p.expect("guard");
    std::string sem = p.any_ident("'name' or 'value'");
    if (sem == "name") {
      a.semantics = ProtectionSemantics::Name;
    } else if (sem == "value") {
      a.semantics = ProtectionSemantics::Value;
    } else {
      throw ParseError("expected 'name' or 'value' but found '" + sem + "'", line_no, 1);
    }
    std::string kind = p.any_ident("'field' or 'var'");
    if (kind == "field") {
      a.target = FieldTarget{p.any_ident("field name")};
    } else if (kind == "var") {
      VarTarget v;
      v.class_name = p.any_ident("class name");
      p.expect(".");
      v.method = p.any_ident("method name");
      p.expect(".");
      v.var = p.any_ident("variable name");
      a.target = v;
    } else {
      throw ParseError("expected 'field' or 'var' but found '" + kind + "'", line_no, 1);
    }
    p.expect("by");
    a.guard = p.expr();
    if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after guard");
    out.push_back(std::move(a));
    if (end == text.size()) break;
  }
  return out;
}

}  // namespace gbcalc

/*
 * Copyright 2026 The inferq Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "inferq/query.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace inferq {

namespace {

const std::set<std::string> kKeywords = {"SELECT", "FROM", "WHERE", "AS",   "AND",   "OR",
                                         "NOT",    "CASE", "WHEN",  "THEN", "ELSE",  "END",
                                         "TRUE",   "FALSE", "PREDICT", "SIGMOID"};

enum class Tok { kIdent, kKeyword, kInt, kFloat, kString, kSymbol, kEnd };

struct Token {
  Tok kind;
  std::string text;  // keywords upper-cased; strings unescaped
  int line, column;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::kEnd: return "end of input";
    case Tok::kString: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string word(text.substr(i, j - i));
      std::string up = upper(word);
      if (kKeywords.count(up)) {
        out.push_back({Tok::kKeyword, up, tl, tc});
      } else {
        out.push_back({Tok::kIdent, word, tl, tc});
      }
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      size_t j = i;
      bool is_float = false;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        is_float = true;
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          is_float = true;
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      out.push_back({is_float ? Tok::kFloat : Tok::kInt, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '\'') {
      std::string value;
      size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == '\'') {
          if (j + 1 < text.size() && text[j + 1] == '\'') {
            value += '\'';
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        value += text[j++];
      }
      if (!closed) throw SyntaxError(tl, tc, {"'"}, "unterminated string");
      out.push_back({Tok::kString, value, tl, tc});
      advance(j - i);
      continue;
    }
    static const char* kTwo[] = {"<=", ">=", "!=", "<>"};
    bool matched = false;
    for (const char* sym : kTwo) {
      if (text.substr(i, 2) == sym) {
        out.push_back({Tok::kSymbol, std::string(sym) == "<>" ? "!=" : sym, tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(),;*/+-<>=@").find(c) != std::string_view::npos) {
      out.push_back({Tok::kSymbol, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw SyntaxError(tl, tc, {}, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  QueryAst query() {
    QueryAst ast;
    expect_keyword("SELECT");
    do {
      ast.items.push_back(item());
    } while (accept_symbol(","));
    expect_keyword("FROM");
    ast.table = identifier();
    if (accept_keyword("WHERE")) ast.where = expr();
    accept_symbol(";");
    expect_end({"WHERE", ",", ";"});
    const auto predicts = std::count_if(ast.items.begin(), ast.items.end(),
                                        [](const SelectItem& s) { return s.predict.has_value(); });
    if (predicts > 1) {
      throw Error(ErrorCode::kSyntaxError, "at most one PREDICT call per query");
    }
    return ast;
  }

  Expr standalone() {
    Expr e = expr();
    expect_end({});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  [[noreturn]] void fail(std::set<std::string> expected) const {
    throw SyntaxError(peek().line, peek().column, std::move(expected), describe(peek()));
  }

  bool is_keyword(const char* kw) const { return peek().kind == Tok::kKeyword && peek().text == kw; }
  bool is_symbol(const char* s) const { return peek().kind == Tok::kSymbol && peek().text == s; }

  bool accept_keyword(const char* kw) {
    if (!is_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  bool accept_symbol(const char* s) {
    if (!is_symbol(s)) return false;
    ++pos_;
    return true;
  }
  void expect_keyword(const char* kw) {
    if (!accept_keyword(kw)) fail({kw});
  }
  void expect_symbol(const char* s) {
    if (!accept_symbol(s)) fail({s});
  }
  void expect_end(std::set<std::string> also) {
    if (peek().kind == Tok::kEnd) return;
    also.insert("end of input");
    fail(std::move(also));
  }
  std::string identifier() {
    if (peek().kind != Tok::kIdent) fail({"identifier"});
    return toks_[pos_++].text;
  }

  SelectItem item() {
    SelectItem it;
    if (accept_keyword("PREDICT")) {
      expect_symbol("(");
      PredictCall call;
      call.model = identifier();
      if (accept_symbol("@")) {
        if (peek().kind != Tok::kInt) fail({"version number"});
        const Token& t = toks_[pos_];
        int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size() || v < 1) fail({"version number"});
        ++pos_;
        call.version = v;
      }
      expect_symbol(",");
      do {
        call.args.push_back(identifier());
      } while (accept_symbol(","));
      expect_symbol(")");
      expect_keyword("AS");
      it.alias = identifier();
      it.predict = std::move(call);
      return it;
    }
    it.expr = expr();
    if (accept_keyword("AS")) {
      it.alias = identifier();
    } else if (!std::holds_alternative<ColumnRef>(it.expr.node().v)) {
      fail({"AS"});
    }
    return it;
  }

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    std::vector<Expr> ops{and_expr()};
    while (accept_keyword("OR")) ops.push_back(and_expr());
    return ops.size() == 1 ? ops[0] : ex::or_(std::move(ops));
  }

  Expr and_expr() {
    std::vector<Expr> ops{not_expr()};
    while (accept_keyword("AND")) ops.push_back(not_expr());
    return ops.size() == 1 ? ops[0] : ex::and_(std::move(ops));
  }

  Expr not_expr() {
    if (accept_keyword("NOT")) return ex::not_(not_expr());
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    static const std::pair<const char*, CmpOp> kOps[] = {{"<", CmpOp::kLt},  {"<=", CmpOp::kLe},
                                                          {">", CmpOp::kGt},  {">=", CmpOp::kGe},
                                                          {"=", CmpOp::kEq},  {"!=", CmpOp::kNe}};
    for (const auto& [sym, op] : kOps) {
      if (accept_symbol(sym)) return ex::cmp(op, lhs, additive());
    }
    return lhs;
  }

  Expr additive() {
    Expr e = multiplicative();
    while (true) {
      if (accept_symbol("+")) {
        e = ex::arith(ArithOp::kAdd, e, multiplicative());
      } else if (accept_symbol("-")) {
        e = ex::arith(ArithOp::kSub, e, multiplicative());
      } else {
        return e;
      }
    }
  }

  Expr multiplicative() {
    Expr e = unary();
    while (true) {
      if (accept_symbol("*")) {
        e = ex::arith(ArithOp::kMul, e, unary());
      } else if (accept_symbol("/")) {
        e = ex::arith(ArithOp::kDiv, e, unary());
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept_symbol("-")) {
      if (peek().kind == Tok::kInt || peek().kind == Tok::kFloat) return number(true);
      return ex::arith(ArithOp::kSub, ex::lit(int64_t{0}), unary());
    }
    return primary();
  }

  Expr number(bool negative) {
    const Token& t = toks_[pos_];
    const std::string text = (negative ? "-" : "") + t.text;
    if (t.kind == Tok::kInt) {
      int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size()) {
        throw SyntaxError(t.line, t.column, {"integer in range"}, t.text);
      }
      ++pos_;
      return ex::lit(v);
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(d)) {
      throw SyntaxError(t.line, t.column, {"finite number"}, t.text);
    }
    ++pos_;
    return ex::lit(d);
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kInt:
      case Tok::kFloat: return number(false);
      case Tok::kString: ++pos_; return ex::lit(t.text);
      case Tok::kIdent: ++pos_; return ex::col(t.text);
      case Tok::kKeyword:
        if (accept_keyword("TRUE")) return ex::lit(true);
        if (accept_keyword("FALSE")) return ex::lit(false);
        if (accept_keyword("SIGMOID")) {
          expect_symbol("(");
          Expr arg = expr();
          expect_symbol(")");
          return ex::sigmoid(arg);
        }
        if (accept_keyword("CASE")) {
          std::vector<CaseBranch> branches;
          expect_keyword("WHEN");
          do {
            Expr cond = expr();
            expect_keyword("THEN");
            branches.push_back({cond, expr()});
          } while (accept_keyword("WHEN"));
          if (!is_keyword("ELSE")) fail({"WHEN", "ELSE"});
          ++pos_;
          Expr otherwise = expr();
          expect_keyword("END");
          return ex::case_(std::move(branches), otherwise);
        }
        break;
      case Tok::kSymbol:
        if (accept_symbol("(")) {
          Expr e = expr();
          expect_symbol(")");
          return e;
        }
        break;
      case Tok::kEnd: break;
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

std::string join_set(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(int line, int column, std::set<std::string> expected, const std::string& found)
    : Error(ErrorCode::kSyntaxError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                (expected.empty() ? "" : "expected " + join_set(expected) + ", ") + "found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

std::string SelectItem::name() const {
  if (alias) return *alias;
  return std::get<ColumnRef>(expr.node().v).name;
}

QueryAst parse_query(std::string_view text) { return Parser(text).query(); }

Expr parse_expression(std::string_view text) { return Parser(text).standalone(); }

std::string print_query(const QueryAst& ast) {
  std::string out = "SELECT ";
  for (size_t i = 0; i < ast.items.size(); ++i) {
    const auto& it = ast.items[i];
    if (i > 0) out += ", ";
    if (it.predict) {
      out += "PREDICT(" + it.predict->model;
      if (it.predict->version) out += "@" + std::to_string(*it.predict->version);
      for (const auto& a : it.predict->args) out += ", " + a;
      out += ")";
    } else {
      out += to_string(it.expr);
    }
    if (it.alias) out += " AS " + *it.alias;
  }
  out += " FROM " + ast.table;
  if (ast.where) out += " WHERE " + to_string(*ast.where);
  return out;
}

Plan lower(const QueryAst& ast, const ModelSource& models, const std::map<std::string, Schema>& tables) {
  auto it = tables.find(ast.table);
  if (it == tables.end()) throw Error(ErrorCode::kUnknownTable, "unknown table '" + ast.table + "'");
  const Schema& schema = it->second;

  const SelectItem* predict_item = nullptr;
  std::set<std::string> referenced;
  for (const auto& item : ast.items) {
    if (item.predict) {
      predict_item = &item;
      referenced.insert(item.predict->args.begin(), item.predict->args.end());
    } else {
      collect_columns(item.expr, referenced);
    }
  }
  if (ast.where) collect_columns(*ast.where, referenced);
  if (predict_item) referenced.erase(*predict_item->alias);
  for (const auto& name : referenced) schema.field(name, "table '" + ast.table + "'");

  std::vector<std::string> scan_columns;
  for (const auto& f : schema.fields()) {
    if (referenced.count(f.name)) scan_columns.push_back(f.name);
  }
  if (scan_columns.empty() && !schema.empty()) scan_columns.push_back(schema[0].name);

  Plan p = plan::scan(ast.table, std::move(scan_columns));
  if (ast.where) p = plan::filter(p, *ast.where);
  if (predict_item) {
    const auto& call = *predict_item->predict;
    ResolvedModel rm = models.resolve(call.model, call.version);
    p = plan::predict(p, rm.ref, rm.model, call.args, *predict_item->alias);
  }
  std::vector<ProjectItem> items;
  for (const auto& item : ast.items) {
    items.push_back({item.predict ? ex::col(*item.alias) : item.expr, item.name()});
  }
  p = plan::project(p, std::move(items));
  validate(p, tables);
  return p;
}

}  // namespace inferq

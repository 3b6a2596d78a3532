#include "spe/ast.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

#include "spe/errors.hpp"

namespace spe {

namespace {

struct Token {
  enum class Kind { number, string, name, op, newline, indent, dedent, eof };
  Kind kind;
  std::string text;
  double number = 0.0;
  int line = 0, column = 0;
};

[[noreturn]] void parse_fail(int line, int column, const std::string& msg) {
  fail(ErrorKind::parse,
       "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { tokenize(); }
  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  void tokenize() {
    std::vector<int> indents = {0};
    size_t pos = 0;
    int line = 0;
    int paren_depth = 0;
    while (pos <= text_.size()) {
      size_t line_start = pos;
      size_t eol = text_.find('\n', pos);
      if (eol == std::string::npos) eol = text_.size();
      ++line;
      std::string raw = text_.substr(line_start, eol - line_start);
      // Strip comments outside strings.
      std::string content;
      bool in_str = false;
      char quote = 0;
      for (char ch : raw) {
        if (in_str) {
          content += ch;
          if (ch == quote) in_str = false;
        } else if (ch == '\'' || ch == '"') {
          in_str = true;
          quote = ch;
          content += ch;
        } else if (ch == '#') {
          break;
        } else {
          content += ch;
        }
      }
      size_t indent = 0;
      while (indent < content.size() && content[indent] == ' ') ++indent;
      if (indent < content.size() && content[indent] == '\t')
        parse_fail(line, static_cast<int>(indent) + 1, "tabs are not allowed for indentation");
      bool blank = content.find_first_not_of(" \r") == std::string::npos;
      if (!blank && paren_depth == 0) {
        int level = static_cast<int>(indent);
        if (level > indents.back()) {
          indents.push_back(level);
          tokens_.push_back({Token::Kind::indent, "", 0, line, 1});
        } else {
          while (level < indents.back()) {
            indents.pop_back();
            tokens_.push_back({Token::Kind::dedent, "", 0, line, 1});
          }
          if (level != indents.back())
            parse_fail(line, 1, "inconsistent indentation");
        }
      }
      if (!blank) lex_line(content, indent, line, &paren_depth);
      if (!blank && paren_depth == 0)
        tokens_.push_back({Token::Kind::newline, "", 0, line, static_cast<int>(content.size()) + 1});
      pos = eol + 1;
      if (eol == text_.size()) break;
    }
    while (indents.size() > 1) {
      indents.pop_back();
      tokens_.push_back({Token::Kind::dedent, "", 0, line + 1, 1});
    }
    tokens_.push_back({Token::Kind::eof, "", 0, line + 1, 1});
  }

  void lex_line(const std::string& s, size_t start, int line, int* paren_depth) {
    size_t i = start;
    while (i < s.size()) {
      char c = s[i];
      int col = static_cast<int>(i) + 1;
      if (c == ' ' || c == '\r') {
        ++i;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
        size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' ||
                                s[j] == 'e' || s[j] == 'E' ||
                                ((s[j] == '+' || s[j] == '-') && j > i &&
                                 (s[j - 1] == 'e' || s[j - 1] == 'E'))))
          ++j;
        std::string num = s.substr(i, j - i);
        char* end = nullptr;
        double v = std::strtod(num.c_str(), &end);
        if (end != num.c_str() + num.size()) parse_fail(line, col, "bad number '" + num + "'");
        tokens_.push_back({Token::Kind::number, num, v, line, col});
        i = j;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
          ++j;
        tokens_.push_back({Token::Kind::name, s.substr(i, j - i), 0, line, col});
        i = j;
        continue;
      }
      if (c == '\'' || c == '"') {
        size_t j = i + 1;
        std::string out;
        while (j < s.size() && s[j] != c) {
          if (s[j] == '\\' && j + 1 < s.size()) {
            out += s[j + 1];
            j += 2;
          } else {
            out += s[j];
            ++j;
          }
        }
        if (j >= s.size()) parse_fail(line, col, "unterminated string");
        tokens_.push_back({Token::Kind::string, out, 0, line, col});
        i = j + 1;
        continue;
      }
      if (c == '(' || c == '[' || c == '{') ++*paren_depth;
      if (c == ')' || c == ']' || c == '}') {
        if (*paren_depth == 0) parse_fail(line, col, "unbalanced bracket");
        --*paren_depth;
      }
      static const char* two_char[] = {"**", "==", "!=", "<=", ">=", "~=", nullptr};
      bool matched = false;
      for (int k = 0; two_char[k]; ++k) {
        if (s.compare(i, 2, two_char[k]) == 0) {
          tokens_.push_back({Token::Kind::op, two_char[k], 0, line, col});
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      static const std::string singles = "+-*/%<>=~(),[]{}:";
      if (singles.find(c) != std::string::npos) {
        tokens_.push_back({Token::Kind::op, std::string(1, c), 0, line, col});
        ++i;
        continue;
      }
      parse_fail(line, col, std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& text_;
  std::vector<Token> tokens_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text), toks_(lexer_.tokens()) {}

  CommandPtr program() {
    auto cmds = statements_until_eof();
    if (cmds.empty()) parse_fail(1, 1, "empty program");
    return sequence(std::move(cmds));
  }

  ExprPtr single_expression() {
    skip_newlines();
    ExprPtr e = expression();
    skip_newlines();
    if (!at(Token::Kind::eof)) parse_fail(cur().line, cur().column, "trailing input after expression");
    return e;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Token::Kind k) const { return cur().kind == k; }
  bool at_op(const std::string& s) const {
    return cur().kind == Token::Kind::op && cur().text == s;
  }
  bool at_name(const std::string& s) const {
    return cur().kind == Token::Kind::name && cur().text == s;
  }
  const Token& advance() { return toks_[pos_++]; }
  void expect_op(const std::string& s) {
    if (!at_op(s)) parse_fail(cur().line, cur().column, "expected '" + s + "'");
    advance();
  }
  void expect_newline() {
    if (at(Token::Kind::newline)) {
      advance();
      return;
    }
    if (at(Token::Kind::eof) || at(Token::Kind::dedent)) return;
    parse_fail(cur().line, cur().column, "expected end of statement");
  }
  void skip_newlines() {
    while (at(Token::Kind::newline)) advance();
  }

  static CommandPtr sequence(std::vector<CommandPtr> cmds) {
    if (cmds.size() == 1) return cmds[0];
    auto c = std::make_shared<Command>();
    c->kind = Command::Kind::sequence;
    c->body = std::move(cmds);
    c->line = c->body.empty() ? 0 : c->body.front()->line;
    return c;
  }

  std::vector<CommandPtr> statements_until_eof() {
    std::vector<CommandPtr> out;
    skip_newlines();
    while (!at(Token::Kind::eof)) {
      out.push_back(statement());
      skip_newlines();
    }
    return out;
  }

  // A block is either an indented suite or a single inline statement after ':'.
  CommandPtr block(int line) {
    if (!at(Token::Kind::newline)) {
      // Inline statement on the same line.
      return statement();
    }
    advance();
    skip_newlines();
    if (!at(Token::Kind::indent)) parse_fail(cur().line, cur().column, "expected an indented block");
    advance();
    std::vector<CommandPtr> out;
    skip_newlines();
    while (!at(Token::Kind::dedent) && !at(Token::Kind::eof)) {
      out.push_back(statement());
      skip_newlines();
    }
    if (at(Token::Kind::dedent)) advance();
    if (out.empty()) parse_fail(line, 1, "empty block");
    return sequence(std::move(out));
  }

  CommandPtr statement() {
    int line = cur().line;
    if (at_name("if")) return if_statement();
    if (at_name("for")) return for_statement();
    if (at_name("switch")) return switch_statement();
    if (at_name("condition") || at_name("constrain")) {
      bool is_condition = cur().text == "condition";
      advance();
      ExprPtr e = expression();
      expect_newline();
      auto c = std::make_shared<Command>();
      c->kind = is_condition ? Command::Kind::condition_event : Command::Kind::constrain_event;
      c->value = e;
      c->line = line;
      return c;
    }
    // target (~ | =) expr
    ExprPtr target = postfix_target();
    if (at_op("~")) {
      advance();
      ExprPtr v = expression();
      expect_newline();
      auto c = std::make_shared<Command>();
      c->kind = Command::Kind::sample;
      c->target = target;
      c->value = v;
      c->line = line;
      return c;
    }
    if (at_op("=")) {
      advance();
      ExprPtr v = expression();
      expect_newline();
      auto c = std::make_shared<Command>();
      c->kind = Command::Kind::assign;
      c->target = target;
      c->value = v;
      c->line = line;
      return c;
    }
    parse_fail(cur().line, cur().column, "expected '~' or '=' after variable");
  }

  ExprPtr postfix_target() {
    if (!at(Token::Kind::name))
      parse_fail(cur().line, cur().column, "expected a variable name");
    const Token& t = advance();
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::name;
    e->text = t.text;
    e->line = t.line;
    e->column = t.column;
    ExprPtr out = e;
    while (at_op("[")) {
      advance();
      ExprPtr idx = expression();
      expect_op("]");
      auto ix = std::make_shared<Expr>();
      ix->kind = Expr::Kind::index;
      ix->base = out;
      ix->index = idx;
      ix->line = t.line;
      ix->column = t.column;
      out = ix;
    }
    return out;
  }

  CommandPtr if_statement() {
    int line = cur().line;
    auto c = std::make_shared<Command>();
    c->kind = Command::Kind::if_else;
    c->line = line;
    advance();  // if
    ExprPtr test = expression();
    expect_op(":");
    CommandPtr body = block(line);
    c->branches.emplace_back(test, body);
    skip_newlines();
    while (at_name("elif")) {
      int l2 = cur().line;
      advance();
      ExprPtr t2 = expression();
      expect_op(":");
      c->branches.emplace_back(t2, block(l2));
      skip_newlines();
    }
    if (at_name("else")) {
      int l3 = cur().line;
      advance();
      expect_op(":");
      c->else_body = block(l3);
    }
    return c;
  }

  CommandPtr for_statement() {
    int line = cur().line;
    advance();  // for
    if (!at(Token::Kind::name)) parse_fail(cur().line, cur().column, "expected loop variable");
    std::string binder = advance().text;
    if (!at_name("in")) parse_fail(cur().line, cur().column, "expected 'in'");
    advance();
    if (!at_name("range")) parse_fail(cur().line, cur().column, "expected 'range'");
    advance();
    expect_op("(");
    ExprPtr first = expression();
    ExprPtr lo, hi;
    if (at_op(",")) {
      advance();
      lo = first;
      hi = expression();
    } else {
      auto zero = std::make_shared<Expr>();
      zero->kind = Expr::Kind::number;
      zero->number = 0.0;
      lo = zero;
      hi = first;
    }
    expect_op(")");
    expect_op(":");
    auto c = std::make_shared<Command>();
    c->kind = Command::Kind::for_loop;
    c->binder = binder;
    c->lo = lo;
    c->hi = hi;
    c->line = line;
    auto body = block(line);
    c->branches.emplace_back(nullptr, body);  // body stored as sole branch
    return c;
  }

  CommandPtr switch_statement() {
    int line = cur().line;
    advance();  // switch
    ExprPtr scrut = expression();
    if (!at_name("cases")) parse_fail(cur().line, cur().column, "expected 'cases'");
    advance();
    expect_op("(");
    if (!at(Token::Kind::name)) parse_fail(cur().line, cur().column, "expected case binder");
    std::string binder = advance().text;
    if (!at_name("in")) parse_fail(cur().line, cur().column, "expected 'in'");
    advance();
    ExprPtr values = expression();
    expect_op(")");
    expect_op(":");
    auto c = std::make_shared<Command>();
    c->kind = Command::Kind::switch_cases;
    c->scrutinee = scrut;
    c->binder = binder;
    c->values_list = values;
    c->line = line;
    auto body = block(line);
    c->branches.emplace_back(nullptr, body);
    return c;
  }

  // Expression grammar: or > and > not > comparison > additive >
  // multiplicative > unary > power > postfix > primary.
  ExprPtr expression() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr left = and_expr();
    if (!at_name("or")) return left;
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::logical_or;
    e->items.push_back(left);
    e->line = left->line;
    while (at_name("or")) {
      advance();
      e->items.push_back(and_expr());
    }
    return e;
  }

  ExprPtr and_expr() {
    ExprPtr left = not_expr();
    if (!at_name("and")) return left;
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::logical_and;
    e->items.push_back(left);
    e->line = left->line;
    while (at_name("and")) {
      advance();
      e->items.push_back(not_expr());
    }
    return e;
  }

  ExprPtr not_expr() {
    if (at_name("not")) {
      int line = cur().line;
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::logical_not;
      e->base = not_expr();
      e->line = line;
      return e;
    }
    return comparison();
  }

  std::optional<BinOp> comparison_op() {
    if (cur().kind != Token::Kind::op && cur().kind != Token::Kind::name) return std::nullopt;
    const std::string& s = cur().text;
    if (s == "<") return BinOp::lt;
    if (s == "<=") return BinOp::le;
    if (s == ">") return BinOp::gt;
    if (s == ">=") return BinOp::ge;
    if (s == "==") return BinOp::eq;
    if (s == "!=") return BinOp::ne;
    if (cur().kind == Token::Kind::name && s == "in") return BinOp::elem;
    return std::nullopt;
  }

  ExprPtr comparison() {
    ExprPtr left = additive();
    auto op = comparison_op();
    if (!op) return left;
    // Chained comparisons become a conjunction of pairwise comparisons.
    std::vector<ExprPtr> terms;
    while (auto o = comparison_op()) {
      int line = cur().line;
      advance();
      ExprPtr right = additive();
      auto b = std::make_shared<Expr>();
      b->kind = Expr::Kind::bin;
      b->op = *o;
      b->lhs = left;
      b->rhs = right;
      b->line = line;
      terms.push_back(b);
      left = right;
    }
    if (terms.size() == 1) return terms[0];
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::logical_and;
    e->items = std::move(terms);
    e->line = e->items.front()->line;
    return e;
  }

  ExprPtr additive() {
    ExprPtr left = multiplicative();
    while (at_op("+") || at_op("-")) {
      BinOp op = cur().text == "+" ? BinOp::add : BinOp::sub;
      int line = cur().line;
      advance();
      ExprPtr right = multiplicative();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::bin;
      e->op = op;
      e->lhs = left;
      e->rhs = right;
      e->line = line;
      left = e;
    }
    return left;
  }

  ExprPtr multiplicative() {
    ExprPtr left = unary();
    while (at_op("*") || at_op("/")) {
      BinOp op = cur().text == "*" ? BinOp::mul : BinOp::div;
      int line = cur().line;
      advance();
      ExprPtr right = unary();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::bin;
      e->op = op;
      e->lhs = left;
      e->rhs = right;
      e->line = line;
      left = e;
    }
    return left;
  }

  ExprPtr unary() {
    if (at_op("-")) {
      int line = cur().line;
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::neg;
      e->base = unary();
      e->line = line;
      return e;
    }
    if (at_op("+")) {
      advance();
      return unary();
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr left = postfix();
    if (at_op("**")) {
      int line = cur().line;
      advance();
      ExprPtr right = unary();  // right associative, allows -X ** -2 shapes
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::bin;
      e->op = BinOp::pow;
      e->lhs = left;
      e->rhs = right;
      e->line = line;
      return e;
    }
    return left;
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (true) {
      if (at_op("[")) {
        advance();
        ExprPtr idx = expression();
        expect_op("]");
        auto ix = std::make_shared<Expr>();
        ix->kind = Expr::Kind::index;
        ix->base = e;
        ix->index = idx;
        ix->line = e->line;
        e = ix;
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr primary() {
    const Token& t = cur();
    if (t.kind == Token::Kind::number) {
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::number;
      e->number = t.number;
      e->line = t.line;
      e->column = t.column;
      return e;
    }
    if (t.kind == Token::Kind::string) {
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::string;
      e->text = t.text;
      e->line = t.line;
      e->column = t.column;
      return e;
    }
    if (t.kind == Token::Kind::name) {
      advance();
      if (at_op("(")) {
        advance();
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::call;
        e->text = t.text;
        e->line = t.line;
        e->column = t.column;
        bool first = true;
        while (!at_op(")")) {
          if (!first) expect_op(",");
          first = false;
          if (at(Token::Kind::name) && toks_[pos_ + 1].kind == Token::Kind::op &&
              toks_[pos_ + 1].text == "=") {
            std::string kw = advance().text;
            advance();  // =
            e->pairs.emplace_back(kw, expression());
          } else {
            e->items.push_back(expression());
          }
        }
        advance();  // )
        return e;
      }
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::name;
      e->text = t.text;
      e->line = t.line;
      e->column = t.column;
      return e;
    }
    if (t.kind == Token::Kind::op && t.text == "(") {
      advance();
      ExprPtr e = expression();
      expect_op(")");
      return e;
    }
    if (t.kind == Token::Kind::op && t.text == "[") {
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::list;
      e->line = t.line;
      e->column = t.column;
      bool first = true;
      while (!at_op("]")) {
        if (!first) expect_op(",");
        first = false;
        e->items.push_back(expression());
      }
      advance();
      return e;
    }
    if (t.kind == Token::Kind::op && t.text == "{") {
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::dict;
      e->line = t.line;
      e->column = t.column;
      bool first = true;
      while (!at_op("}")) {
        if (!first) expect_op(",");
        first = false;
        if (!at(Token::Kind::string))
          parse_fail(cur().line, cur().column, "dict keys must be strings");
        std::string key = advance().text;
        expect_op(":");
        e->pairs.emplace_back(key, expression());
      }
      advance();
      return e;
    }
    parse_fail(t.line, t.column, "unexpected token '" + t.text + "'");
  }

  Lexer lexer_;
  const std::vector<Token>& toks_;
  size_t pos_ = 0;
};

}  // namespace

// ---- Substitution ----

ExprPtr substitute_name(const ExprPtr& e, const std::string& name, const ExprPtr& value) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::name:
      return e->text == name ? value : e;
    case Expr::Kind::number:
    case Expr::Kind::string:
      return e;
    default: {
      auto out = std::make_shared<Expr>(*e);
      out->base = substitute_name(e->base, name, value);
      out->index = substitute_name(e->index, name, value);
      out->lhs = substitute_name(e->lhs, name, value);
      out->rhs = substitute_name(e->rhs, name, value);
      for (auto& item : out->items) item = substitute_name(item, name, value);
      for (auto& [k, v] : out->pairs) v = substitute_name(v, name, value);
      return out;
    }
  }
}

CommandPtr substitute_name(const CommandPtr& c, const std::string& name, const ExprPtr& value) {
  if (!c) return c;
  // Nested binders of the same name shadow the substitution.
  if ((c->kind == Command::Kind::for_loop || c->kind == Command::Kind::switch_cases) &&
      c->binder == name) {
    auto out = std::make_shared<Command>(*c);
    out->lo = substitute_name(c->lo, name, value);
    out->hi = substitute_name(c->hi, name, value);
    out->scrutinee = substitute_name(c->scrutinee, name, value);
    out->values_list = substitute_name(c->values_list, name, value);
    return out;
  }
  auto out = std::make_shared<Command>(*c);
  out->target = substitute_name(c->target, name, value);
  out->value = substitute_name(c->value, name, value);
  out->lo = substitute_name(c->lo, name, value);
  out->hi = substitute_name(c->hi, name, value);
  out->scrutinee = substitute_name(c->scrutinee, name, value);
  out->values_list = substitute_name(c->values_list, name, value);
  for (auto& b : out->body) b = substitute_name(b, name, value);
  for (auto& [test, body] : out->branches) {
    test = substitute_name(test, name, value);
    body = substitute_name(body, name, value);
  }
  out->else_body = substitute_name(c->else_body, name, value);
  return out;
}

CommandPtr parse_program(const std::string& text) { return Parser(text).program(); }

ExprPtr parse_expression(const std::string& text) { return Parser(text).single_expression(); }

}  // namespace spe

// Copyright 2026 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Tiny recursive-descent evaluator for arithmetic formula strings, used as an
// independent reference for the calibration code. Grammar:
//   expr := term (('+'|'-') term)*
//   term := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
// Functions: sqrt, ln, exp, floor, max, min, pow.

#ifndef DPERM_TESTS_FORMULA_HPP_
#define DPERM_TESTS_FORMULA_HPP_

#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dperm::testing {

class Formula {
 public:
  using Env = std::map<std::string, double>;

  static double eval(const std::string& text, const Env& env) {
    Formula f(text, env);
    const double v = f.expr();
    f.skip();
    if (f.pos_ != f.s_.size()) throw std::runtime_error("formula: trailing input in " + text);
    return v;
  }

 private:
  Formula(const std::string& s, const Env& env) : s_(s), env_(env) {}

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    return power();
  }
  double power() {
    const double b = atom();
    if (eat('^')) return std::pow(b, unary());
    return b;
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) throw std::runtime_error("formula: expected )");
      return v;
    }
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return v;
    }
    std::string name;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      name += s_[pos_++];
    if (name.empty()) throw std::runtime_error("formula: unexpected character in " + s_);
    if (eat('(')) {
      std::vector<double> args{expr()};
      while (eat(',')) args.push_back(expr());
      if (!eat(')')) throw std::runtime_error("formula: expected ) after arguments");
      return call(name, args);
    }
    auto it = env_.find(name);
    if (it == env_.end()) throw std::runtime_error("formula: unbound variable " + name);
    return it->second;
  }
  static double call(const std::string& f, const std::vector<double>& a) {
    auto arity = [&](std::size_t k) {
      if (a.size() != k) throw std::runtime_error("formula: wrong arity for " + f);
    };
    if (f == "sqrt") return arity(1), std::sqrt(a[0]);
    if (f == "ln") return arity(1), std::log(a[0]);
    if (f == "exp") return arity(1), std::exp(a[0]);
    if (f == "floor") return arity(1), std::floor(a[0]);
    if (f == "max") return arity(2), std::max(a[0], a[1]);
    if (f == "min") return arity(2), std::min(a[0], a[1]);
    if (f == "pow") return arity(2), std::pow(a[0], a[1]);
    throw std::runtime_error("formula: unknown function " + f);
  }

  std::string s_;
  const Env& env_;
  std::size_t pos_ = 0;
};

}  // namespace dperm::testing

#endif  // DPERM_TESTS_FORMULA_HPP_

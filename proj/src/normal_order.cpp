#include "qherm/normal_order.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qherm {

namespace {

constexpr std::size_t kMaxTerms = 1000000;

using Kind = Symbol::Kind;

bool reducible(const Symbol& x, const Symbol& y) {
  if (x.kind == Kind::Semigroup && y.kind == Kind::Semigroup) return true;
  return y < x;
}

bool has_zero_semigroup(const Word& w) {
  return std::any_of(w.begin(), w.end(), [](const Symbol& s) { return s.kind == Kind::Semigroup && s.t == 0.0; });
}

Word drop_zero_semigroups(const Word& w) {
  Word r;
  for (const auto& s : w)
    if (!(s.kind == Kind::Semigroup && s.t == 0.0)) r.push_back(s);
  return r;
}

}  // namespace

double NOWord::semigroup_exponent() const {
  if (!factors.empty() && factors.back().kind == Kind::Semigroup) return factors.back().t;
  return 0.0;
}

bool NOWord::is_normal() const {
  for (std::size_t i = 0; i + 1 < factors.size(); ++i)
    if (reducible(factors[i], factors[i + 1])) return false;
  return !has_zero_semigroup(factors);
}

NOPoly NOPoly::scalar(double lambda, int n, cplx c) {
  NOPoly p(lambda, n);
  p.add_term({}, c);
  return p;
}

NOPoly NOPoly::word(double lambda, int n, const Word& w, cplx c) {
  NOPoly p(lambda, n);
  p.add_term(w, c);
  return p;
}

void NOPoly::add_term(const Word& w, cplx c) {
  for (const auto& s : w)
    if (s.kind != Kind::Semigroup && (s.j < 1 || s.j > n_))
      throw std::out_of_range("NOPoly: symbol index out of range");
  terms_[w] += c;
}

void NOPoly::check_compatible(const NOPoly& o) const {
  if (lambda_ != o.lambda_ || n_ != o.n_) throw ContextError("NOPoly: lambda or n mismatch");
}

NOPoly NOPoly::operator+(const NOPoly& o) const {
  check_compatible(o);
  NOPoly r = *this;
  for (const auto& [w, c] : o.terms_) r.terms_[w] += c;
  r.prune();
  return r;
}

NOPoly NOPoly::operator-(const NOPoly& o) const { return *this + o * cplx(-1.0); }

NOPoly NOPoly::operator*(cplx s) const {
  NOPoly r(lambda_, n_);
  for (const auto& [w, c] : terms_) r.terms_[w] = s * c;
  r.prune();
  return r;
}

NOPoly NOPoly::concat(const NOPoly& o) const {
  check_compatible(o);
  NOPoly r(lambda_, n_);
  for (const auto& [w1, c1] : terms_)
    for (const auto& [w2, c2] : o.terms_) {
      Word w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      r.terms_[w] += c1 * c2;
    }
  return r;
}

NOPoly NOPoly::operator*(const NOPoly& o) const { return normal_order(concat(o)); }

void NOPoly::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

int NOPoly::total_degree() const {
  int d = -1;
  for (const auto& [w, c] : terms_) {
    int k = 0;
    for (const auto& s : w) k += (s.kind != Kind::Semigroup);
    d = std::max(d, k);
  }
  return d;
}

bool NOPoly::is_normal() const {
  for (const auto& [w, c] : terms_)
    if (!NOWord{w, c}.is_normal()) return false;
  return true;
}

NOPoly normal_order(const NOPoly& p, std::mt19937* rng) {
  const double lam = p.lambda();
  NOPoly out(lam, p.n());
  std::map<Word, cplx> done;
  std::vector<std::pair<Word, cplx>> work(p.terms().begin(), p.terms().end());
  std::vector<std::size_t> pos;
  while (!work.empty()) {
    auto [w, c] = std::move(work.back());
    work.pop_back();
    if (has_zero_semigroup(w)) w = drop_zero_semigroups(w);
    pos.clear();
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (reducible(w[i], w[i + 1])) pos.push_back(i);
    if (pos.empty()) {
      done[w] += c;
      if (done.size() > kMaxTerms) throw TermOverflow("normal_order: term count exceeds limit");
      continue;
    }
    std::size_t i = pos.front();
    if (rng) i = pos[std::uniform_int_distribution<std::size_t>(0, pos.size() - 1)(*rng)];
    const Symbol x = w[i], y = w[i + 1];
    if (x.kind == Kind::Semigroup && y.kind == Kind::Semigroup) {
      Word r(w.begin(), w.begin() + i);
      r.push_back(Symbol::semigroup(x.t + y.t));
      r.insert(r.end(), w.begin() + i + 2, w.end());
      work.emplace_back(std::move(r), c);
    } else if (x.kind == Kind::Semigroup) {
      double f = (y.kind == Kind::Annihilate) ? std::exp(2 * x.t * lam) : std::exp(-2 * x.t * lam);
      Word r = w;
      std::swap(r[i], r[i + 1]);
      work.emplace_back(std::move(r), c * f);
    } else if (x.kind == Kind::Annihilate && y.kind == Kind::Create) {
      Word r = w;
      std::swap(r[i], r[i + 1]);
      work.emplace_back(std::move(r), c);
      if (x.j == y.j) {
        Word s(w.begin(), w.begin() + i);
        s.insert(s.end(), w.begin() + i + 2, w.end());
        work.emplace_back(std::move(s), c * (2.0 * lam));
      }
    } else {
      Word r = w;
      std::swap(r[i], r[i + 1]);
      work.emplace_back(std::move(r), c);
    }
    if (work.size() > kMaxTerms) throw TermOverflow("normal_order: work list exceeds limit");
  }
  for (const auto& [w, c] : done) out.add_term(w, c);
  out.prune();
  return out;
}

NOWord push_semigroup(const NOWord& w, double lambda) {
  NOWord r;
  r.coefficient = w.coefficient;
  double t_total = 0.0;
  for (std::size_t i = 0; i < w.factors.size(); ++i) {
    const auto& s = w.factors[i];
    if (s.kind != Kind::Semigroup) {
      r.factors.push_back(s);
      continue;
    }
    t_total += s.t;
    for (std::size_t k = i + 1; k < w.factors.size(); ++k) {
      const auto& y = w.factors[k];
      if (y.kind == Kind::Annihilate) r.coefficient *= std::exp(2 * s.t * lambda);
      if (y.kind == Kind::Create) r.coefficient *= std::exp(-2 * s.t * lambda);
    }
  }
  if (t_total != 0.0) r.factors.push_back(Symbol::semigroup(t_total));
  return r;
}

NOPoly apply_ladder_derivation(const Symbol& X, const NOPoly& p) {
  if (X.kind == Kind::Semigroup) throw std::invalid_argument("apply_ladder_derivation: X must be A_k or A_k*");
  const double lam = p.lambda();
  NOPoly r(lam, p.n());
  for (const auto& [w, c] : p.terms()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& s = w[i];
      if (s.kind == Kind::Semigroup) {
        double f = (X.kind == Kind::Annihilate) ? std::exp(2 * s.t * lam) - 1.0 : std::exp(-2 * s.t * lam) - 1.0;
        Word nw(w.begin(), w.begin() + i);
        nw.push_back(X);
        nw.insert(nw.end(), w.begin() + i, w.end());
        r.add_term(nw, c * f);
        continue;
      }
      if (s.j != X.j || s.kind == X.kind) continue;
      // d_{A_k}(A_k*) = -2 lambda, d_{A_k*}(A_k) = 2 lambda.
      double f = (X.kind == Kind::Annihilate) ? -2.0 * lam : 2.0 * lam;
      Word nw(w.begin(), w.begin() + i);
      nw.insert(nw.end(), w.begin() + i + 1, w.end());
      r.add_term(nw, c * f);
    }
  }
  return normal_order(r);
}

NOPoly apply_derivation(int j, const NOPoly& p) {
  const int n = p.n();
  if (j < 1 || j > 2 * n) throw std::out_of_range("apply_derivation: index out of range");
  const double lam = p.lambda();
  const double ep = std::exp(lam / 2), em = std::exp(-lam / 2);
  int k = (j <= n) ? j : j - n;
  NOPoly dA = apply_ladder_derivation(Symbol::annihilate(k), p);
  NOPoly dAs = apply_ladder_derivation(Symbol::create(k), p);
  if (j <= n) return (dA * cplx(em) - dAs * cplx(ep)) * cplx(0, 0.5);
  return (dAs * cplx(ep) + dA * cplx(em)) * cplx(0.5);
}

NOPoly p_mu(double lambda, int n, const MultiIndex& mu, double kappa0) {
  if (static_cast<int>(mu.size()) != 2 * n) throw std::invalid_argument("p_mu: mu must have length 2n");
  int deg = total_degree(mu);
  if (deg > 12) throw TermOverflow("p_mu: |mu| exceeds 12");
  for (int v : mu)
    if (v < 0) throw std::invalid_argument("p_mu: negative component");
  NOPoly p = NOPoly::word(lambda, n, {Symbol::semigroup(1.0)});
  for (int j = 1; j <= 2 * n; ++j)
    for (int r = 0; r < mu[j - 1]; ++r) p = apply_derivation(j, p);
  p = normal_order(p.concat(NOPoly::word(lambda, n, {Symbol::semigroup(-0.5)})));

  if (kappa0 <= 0) kappa0 = std::pow(2.0 * std::sinh(lambda), 0.5 * n);
  double fact = 1.0;
  for (int v : mu) fact *= std::tgamma(v + 1.0);
  double norm = kappa0 / std::sqrt(std::pow(2.0 * lambda * std::sinh(lambda), deg) * fact);

  NOPoly out(lambda, n);
  for (const auto& [w, c] : p.terms()) {
    if (w.empty() || w.back().kind != Kind::Semigroup || std::abs(w.back().t - 0.5) > 1e-12)
      throw std::logic_error("p_mu: term without trailing E_{1/2}");
    out.add_term(Word(w.begin(), w.end() - 1), norm * c);
  }
  out.prune();
  return out;
}

TruncatedOperator evaluate(const NOPoly& p, const ContextPtr& ctx) {
  if (p.n() != ctx->n) throw ContextError("evaluate: dimension mismatch");
  if (p.lambda() != ctx->lambda) throw ContextError("evaluate: lambda mismatch");
  Mat total = Mat::Zero(ctx->dim, ctx->dim);
  for (const auto& [w, c] : p.terms()) {
    Mat M = Mat::Identity(ctx->dim, ctx->dim);
    for (const auto& s : w) {
      switch (s.kind) {
        case Kind::Create: M = M * ctx->Astar[s.j - 1]; break;
        case Kind::Annihilate: M = M * ctx->A[s.j - 1]; break;
        case Kind::Semigroup:
          if (s.t < 0) throw std::domain_error("evaluate: E_t with negative t is unbounded");
          if (s.t > 0) M = M * heat_semigroup(ctx, s.t).m;
          break;
      }
    }
    total += c * M;
  }
  return {ctx, total};
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(const NOPoly& p) {
  if (p.terms().empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    if (!first) s += " + ";
    first = false;
    s += "(" + fmt_double(c.real());
    s += (std::signbit(c.imag()) ? "-" : "+") + fmt_double(std::abs(c.imag())) + "i)";
    if (w.empty()) continue;
    s += "·";
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += " ";
      const auto& y = w[i];
      if (y.kind == Kind::Create) s += "A*_" + std::to_string(y.j);
      if (y.kind == Kind::Annihilate) s += "A_" + std::to_string(y.j);
      if (y.kind == Kind::Semigroup) s += "E_{" + fmt_double(y.t) + "}";
    }
  }
  return s;
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse_nopoly: " + what + " at offset " + std::to_string(i));
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(const std::string& tok) {
    skip();
    if (s.compare(i, tok.size(), tok) == 0) {
      i += tok.size();
      return true;
    }
    return false;
  }
  double number() {
    skip();
    const char* b = s.c_str() + i;
    char* e = nullptr;
    double v = std::strtod(b, &e);
    if (e == b) fail("expected number");
    i += static_cast<std::size_t>(e - b);
    return v;
  }
  int integer() {
    skip();
    std::size_t st = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (st == i) fail("expected index");
    return std::stoi(s.substr(st, i - st));
  }
};

}  // namespace

NOPoly parse_nopoly(const std::string& text, double lambda, int n) {
  NOPoly p(lambda, n);
  Parser ps{text};
  ps.skip();
  if (ps.eat("0")) {
    ps.skip();
    if (ps.i != text.size()) ps.fail("trailing input");
    return p;
  }
  while (true) {
    if (!ps.eat("(")) ps.fail("expected '('");
    double re = ps.number();
    ps.skip();
    double sign = 1.0;
    if (ps.eat("+"))
      sign = 1.0;
    else if (ps.eat("-"))
      sign = -1.0;
    else
      ps.fail("expected sign of imaginary part");
    double im = sign * ps.number();
    if (!ps.eat("i)")) ps.fail("expected 'i)'");
    Word w;
    if (ps.eat("·")) {
      while (true) {
        ps.skip();
        if (ps.eat("A*_"))
          w.push_back(Symbol::create(ps.integer()));
        else if (ps.eat("A_"))
          w.push_back(Symbol::annihilate(ps.integer()));
        else if (ps.eat("E_{")) {
          w.push_back(Symbol::semigroup(ps.number()));
          if (!ps.eat("}")) ps.fail("expected '}'");
        } else
          break;
      }
      if (w.empty()) ps.fail("expected factor");
    }
    p.add_term(w, cplx(re, im));
    ps.skip();
    if (ps.i == text.size()) break;
    if (!ps.eat("+")) ps.fail("expected '+' between terms");
  }
  return p;
}

double term_distance(const NOPoly& a, const NOPoly& b) {
  double d = 0.0;
  for (const auto& [w, c] : a.terms()) {
    auto it = b.terms().find(w);
    d = std::max(d, std::abs(c - (it == b.terms().end() ? cplx(0) : it->second)));
  }
  for (const auto& [w, c] : b.terms())
    if (!a.terms().count(w)) d = std::max(d, std::abs(c));
  return d;
}

}  // namespace qherm

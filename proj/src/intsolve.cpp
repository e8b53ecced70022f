#include "ckit/intsolve.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ckit {

namespace {

using i128 = __int128;

long long gcd_ll(long long a, long long b) {
  a = std::abs(a);
  b = std::abs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

long long checked_ll(i128 v, const char* ctx) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    throw Error(std::string("rational overflow in ") + ctx);
  return static_cast<long long>(v);
}

Rat make_rat(i128 n, i128 d, const char* ctx) {
  if (d == 0) throw Error("rational division by zero");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long nn = checked_ll(n, ctx), dd = checked_ll(d, ctx);
  long long g = gcd_ll(nn, dd);
  if (g > 1) {
    nn /= g;
    dd /= g;
  }
  Rat r;
  r.num = nn;
  r.den = dd;
  return r;
}

}  // namespace

Rat::Rat(long long n) : num(n), den(1) {}

Rat::Rat(long long n, long long d) {
  Rat r = make_rat(n, d, "ctor");
  num = r.num;
  den = r.den;
}

Rat Rat::operator+(const Rat& o) const {
  return make_rat(i128(num) * o.den + i128(o.num) * den, i128(den) * o.den, "add");
}
Rat Rat::operator-(const Rat& o) const {
  return make_rat(i128(num) * o.den - i128(o.num) * den, i128(den) * o.den, "sub");
}
Rat Rat::operator*(const Rat& o) const {
  return make_rat(i128(num) * o.num, i128(den) * o.den, "mul");
}
Rat Rat::operator/(const Rat& o) const {
  if (o.num == 0) throw Error("rational division by zero");
  return make_rat(i128(num) * o.den, i128(den) * o.num, "div");
}
Rat Rat::operator-() const {
  Rat r;
  r.num = -num;
  r.den = den;
  return r;
}
bool Rat::operator<(const Rat& o) const { return i128(num) * o.den < i128(o.num) * den; }
bool Rat::operator<=(const Rat& o) const { return i128(num) * o.den <= i128(o.num) * den; }

namespace {

// row: coeffs . x <= rhs
struct Row {
  std::vector<Rat> c;
  Rat b;
};

void normalize_row(Row& r) {
  long long g = std::abs(r.b.num);
  long long l = r.b.den;
  for (const Rat& x : r.c) {
    g = gcd_ll(g, x.num);
    l = l / gcd_ll(l, x.den) * x.den;
  }
  if (g == 0) g = 1;
  // scale by l/g to get coprime integers; keeps rows comparable for dedup
  Rat s(l, g);
  for (Rat& x : r.c) x = x * s;
  r.b = r.b * s;
}

std::string row_key(const Row& r) {
  std::ostringstream os;
  for (const Rat& x : r.c) os << x.num << "/" << x.den << ",";
  os << "|" << r.b.num << "/" << r.b.den;
  return os.str();
}

}  // namespace

Feasibility solve_linear_feasibility(int vars, std::vector<LinConstraint> constraints) {
  std::vector<Row> rows;
  for (auto& con : constraints) {
    if (static_cast<int>(con.coeffs.size()) != vars)
      throw StructuralError("feasibility: constraint arity mismatch");
    Row le{con.coeffs, con.rhs};
    if (con.rel == Rel::LE || con.rel == Rel::EQ) rows.push_back(le);
    if (con.rel == Rel::GE || con.rel == Rel::EQ) {
      Row ge;
      ge.c.reserve(con.coeffs.size());
      for (const Rat& x : con.coeffs) ge.c.push_back(-x);
      ge.b = -con.rhs;
      rows.push_back(std::move(ge));
    }
  }

  std::vector<std::vector<Row>> eliminated(static_cast<size_t>(vars));
  for (int v = vars - 1; v >= 0; --v) {
    std::vector<Row> lows, highs, rest;
    for (auto& r : rows) {
      if (r.c[static_cast<size_t>(v)].num > 0)
        highs.push_back(r);  // x_v <= ...
      else if (r.c[static_cast<size_t>(v)].num < 0)
        lows.push_back(r);  // x_v >= ...
      else
        rest.push_back(r);
    }
    eliminated[static_cast<size_t>(v)] = rows;
    std::vector<Row> next = rest;
    std::vector<std::string> seen;
    for (const auto& lo : lows)
      for (const auto& hi : highs) {
        Rat a = -lo.c[static_cast<size_t>(v)];  // > 0
        Rat b = hi.c[static_cast<size_t>(v)];   // > 0
        Row comb;
        comb.c.resize(static_cast<size_t>(vars));
        for (int u = 0; u < vars; ++u)
          comb.c[static_cast<size_t>(u)] =
              lo.c[static_cast<size_t>(u)] * b + hi.c[static_cast<size_t>(u)] * a;
        comb.b = lo.b * b + hi.b * a;
        normalize_row(comb);
        std::string key = row_key(comb);
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
          seen.push_back(key);
          next.push_back(std::move(comb));
        }
      }
    rows = std::move(next);
  }

  // only constant rows remain: 0 <= b must hold
  for (const auto& r : rows)
    if (r.b < Rat(0)) {
      std::ostringstream os;
      os << "elimination yields 0 <= " << r.b.num << "/" << r.b.den
         << "; the system admits no solution";
      return {false, {}, os.str()};
    }

  // back-substitute, picking a rational point inside each interval
  std::vector<Rat> x(static_cast<size_t>(vars), Rat(0));
  for (int v = 0; v < vars; ++v) {
    bool has_lo = false, has_hi = false;
    Rat lo(0), hi(0);
    for (const auto& r : eliminated[static_cast<size_t>(v)]) {
      Rat cv = r.c[static_cast<size_t>(v)];
      if (cv.is_zero()) continue;
      Rat bound = r.b;
      for (int u = 0; u < v; ++u)
        bound = bound - r.c[static_cast<size_t>(u)] * x[static_cast<size_t>(u)];
      bound = bound / cv;
      if (cv.num > 0) {  // x_v <= bound
        if (!has_hi || bound < hi) hi = bound;
        has_hi = true;
      } else {  // x_v >= bound
        if (!has_lo || lo < bound) lo = bound;
        has_lo = true;
      }
    }
    Rat val(0);
    if (has_lo && has_hi)
      val = (lo + hi) * Rat(1, 2);
    else if (has_lo)
      val = lo + Rat(1);
    else if (has_hi)
      val = hi - Rat(1);
    x[static_cast<size_t>(v)] = val;
  }
  return {true, x, ""};
}

namespace {

FixedVectorResult integerize(const Feasibility& f, long long cap) {
  if (!f.feasible) return {false, {}, f.certificate};
  long long lcm = 1;
  for (const Rat& r : f.point) lcm = lcm / gcd_ll(lcm, r.den) * r.den;
  std::vector<long long> v;
  v.reserve(f.point.size());
  for (const Rat& r : f.point) v.push_back(r.num * (lcm / r.den));
  for (long long e : v)
    if (e > cap)
      return {false, {}, "solution exists but exceeds the entry cap " + std::to_string(cap)};
  return {true, v, ""};
}

std::vector<LinConstraint> positivity(int k) {
  std::vector<LinConstraint> cons;
  for (int j = 0; j < k; ++j) {
    LinConstraint c;
    c.coeffs.assign(static_cast<size_t>(k), Rat(0));
    c.coeffs[static_cast<size_t>(j)] = Rat(1);
    c.rel = Rel::GE;
    c.rhs = Rat(1);
    cons.push_back(std::move(c));
  }
  return cons;
}

}  // namespace

FixedVectorResult positive_fixed_vector(const IMat& mu, bool transpose, long long cap) {
  if (mu.rows() != mu.cols()) throw StructuralError("fixed vector: mu must be square");
  int k = static_cast<int>(mu.rows());
  std::vector<LinConstraint> cons = positivity(k);
  for (int j = 0; j < k; ++j) {
    LinConstraint c;
    c.coeffs.assign(static_cast<size_t>(k), Rat(0));
    for (int i = 0; i < k; ++i) {
      long long a = transpose ? mu(i, j) : mu(j, i);
      c.coeffs[static_cast<size_t>(i)] = c.coeffs[static_cast<size_t>(i)] + Rat(a);
    }
    c.coeffs[static_cast<size_t>(j)] = c.coeffs[static_cast<size_t>(j)] - Rat(1);
    c.rel = Rel::EQ;
    c.rhs = Rat(0);
    cons.push_back(std::move(c));
  }
  return integerize(solve_linear_feasibility(k, std::move(cons)), cap);
}

FixedVectorResult positive_subinvariant_vector(const IMat& mu, long long cap) {
  if (mu.rows() != mu.cols()) throw StructuralError("subinvariant vector: mu must be square");
  int k = static_cast<int>(mu.rows());
  std::vector<LinConstraint> cons = positivity(k);
  for (int j = 0; j < k; ++j) {
    LinConstraint c;
    c.coeffs.assign(static_cast<size_t>(k), Rat(0));
    for (int i = 0; i < k; ++i)
      c.coeffs[static_cast<size_t>(i)] = c.coeffs[static_cast<size_t>(i)] + Rat(mu(i, j));
    c.coeffs[static_cast<size_t>(j)] = c.coeffs[static_cast<size_t>(j)] - Rat(1);
    c.rel = Rel::LE;
    c.rhs = Rat(0);
    cons.push_back(std::move(c));
  }
  return integerize(solve_linear_feasibility(k, std::move(cons)), cap);
}

FixedVectorResult positive_fixed_vector_above(const IMat& mu, const std::vector<long long>& lower,
                                              long long cap) {
  if (mu.rows() != mu.cols()) throw StructuralError("fixed vector: mu must be square");
  int k = static_cast<int>(mu.rows());
  if (static_cast<int>(lower.size()) != k)
    throw StructuralError("fixed vector: lower bound arity mismatch");
  std::vector<LinConstraint> cons;
  for (int j = 0; j < k; ++j) {
    LinConstraint c;
    c.coeffs.assign(static_cast<size_t>(k), Rat(0));
    c.coeffs[static_cast<size_t>(j)] = Rat(1);
    c.rel = Rel::GE;
    c.rhs = Rat(std::max(lower[static_cast<size_t>(j)], 1LL));
    cons.push_back(std::move(c));
  }
  for (int j = 0; j < k; ++j) {
    LinConstraint c;
    c.coeffs.assign(static_cast<size_t>(k), Rat(0));
    for (int i = 0; i < k; ++i)
      c.coeffs[static_cast<size_t>(i)] = c.coeffs[static_cast<size_t>(i)] + Rat(mu(j, i));
    c.coeffs[static_cast<size_t>(j)] = c.coeffs[static_cast<size_t>(j)] - Rat(1);
    c.rel = Rel::EQ;
    c.rhs = Rat(0);
    cons.push_back(std::move(c));
  }
  return integerize(solve_linear_feasibility(k, std::move(cons)), cap);
}

}  // namespace ckit

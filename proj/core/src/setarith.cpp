#include "dslab/setarith.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace dslab {

namespace {

using i128 = __int128;

void require_1d_pair(const DiscretizedSet& a, const DiscretizedSet& b) {
  if (a.dim() != 1 || b.dim() != 1)
    throw std::invalid_argument("setarith: operands must be 1D");
  if (a.resolution() != b.resolution())
    throw std::invalid_argument("setarith: operands must share m");
}

std::vector<std::int64_t> abs_indices(const DiscretizedSet& s) {
  std::vector<std::int64_t> idx;
  idx.reserve(static_cast<std::size_t>(s.cell_count()));
  s.for_each_cell([&](std::int64_t x, std::int64_t) { idx.push_back(x + s.grid().ox); });
  return idx;
}

// Staging bitset over an absolute 1D index range [lo, hi].
class RangeBits {
 public:
  RangeBits(std::int64_t lo, std::int64_t hi) : lo_(lo), n_(hi - lo + 1) {
    if (n_ <= 0) throw std::invalid_argument("setarith: empty result range");
    if (n_ > (std::int64_t{1} << 34)) throw std::invalid_argument("setarith: result too large");
    w_.assign(static_cast<std::size_t>((n_ + 63) / 64), 0);
  }

  void mark(std::int64_t abs_index) {
    const std::int64_t i = abs_index - lo_;
    w_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  void mark_range(std::int64_t abs_lo, std::int64_t abs_hi) {
    for (std::int64_t t = abs_lo; t <= abs_hi; ++t) mark(t);
  }
  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }

  /// Shrinks to the marked span and builds the set; empty input yields an
  /// empty set on a minimal grid at the range start.
  DiscretizedSet build(int m) const {
    std::int64_t first = -1, last = -1;
    for (std::int64_t i = 0; i < n_; ++i) {
      if ((w_[i >> 6] >> (i & 63)) & 1) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first < 0) return DiscretizedSet(GridSpec::line(m, 0, 1));
    const std::int64_t bound = std::int64_t{8} << m;
    if (lo_ + first < -bound || lo_ + last + 1 > bound)
      throw std::domain_error("setarith: result leaves the [-8,8] domain");
    SetBuilder b(GridSpec::line(m, lo_ + first, last - first + 1));
    for (std::int64_t i = first; i <= last; ++i)
      if ((w_[i >> 6] >> (i & 63)) & 1) b.set(i - first);
    return b.build();
  }

  std::int64_t lo() const { return lo_; }

 private:
  std::int64_t lo_, n_;
  std::vector<std::uint64_t> w_;
};

// Positive-overlap cell range of the closed value interval
// [num_lo/den_lo, num_hi/den_hi] * delta (value numerators are in units of
// delta/den). Returns false for an empty range.
bool overlap_cells(i128 num_lo, i128 den_lo, i128 num_hi, i128 den_hi,
                   std::int64_t* t0, std::int64_t* t1) {
  // t_min: smallest t with (t+1) * den_lo > num_lo
  auto fdiv = [](i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  };
  i128 tmin = fdiv(num_lo, den_lo);
  // degenerate: exact point on a boundary -> keep the cell starting there
  const bool point = (num_lo * den_hi == num_hi * den_lo);
  // t_max: largest t with t * den_hi < num_hi
  const i128 qhi = fdiv(num_hi, den_hi);
  i128 tmax = (qhi * den_hi == num_hi) ? qhi - 1 : qhi;
  if (point && tmax < tmin) tmax = tmin;  // single-point interval
  if (tmax < tmin) return false;
  *t0 = static_cast<std::int64_t>(tmin);
  *t1 = static_cast<std::int64_t>(tmax);
  return true;
}

DiscretizedSet combine_add(const DiscretizedSet& a, const DiscretizedSet& b) {
  const auto ia = abs_indices(a), ib = abs_indices(b);
  if (ia.empty() || ib.empty())
    return DiscretizedSet(GridSpec::line(a.resolution(), 0, 1));
  const std::int64_t lo = ia.front() + ib.front();
  const std::int64_t hi = ia.back() + ib.back() + 1;
  RangeBits acc(lo, hi);
  for (std::int64_t jb : ib)
    for (std::int64_t ja : ia) {
      acc.mark(ja + jb);
      acc.mark(ja + jb + 1);
    }
  return acc.build(a.resolution());
}

DiscretizedSet negate_set(const DiscretizedSet& a) {
  const GridSpec& g = a.grid();
  SetBuilder b(GridSpec::line(g.m, -(g.ox + g.nx), g.nx));
  a.for_each_cell([&](std::int64_t x, std::int64_t) {
    b.set_abs(-(x + g.ox) - 1);
  });
  return b.build();
}

DiscretizedSet combine_mul(const DiscretizedSet& a, const DiscretizedSet& b) {
  const auto ia = abs_indices(a), ib = abs_indices(b);
  const int m = a.resolution();
  const std::int64_t scale = std::int64_t{1} << m;
  if (ia.empty() || ib.empty()) return DiscretizedSet(GridSpec::line(m, 0, 1));

  // Value extremes are attained at index extremes of the closed hulls.
  const i128 c1[2] = {ia.front(), ia.back() + 1};
  const i128 c2[2] = {ib.front(), ib.back() + 1};
  i128 plo = c1[0] * c2[0], phi = plo;
  for (i128 x : c1)
    for (i128 y : c2) {
      plo = std::min(plo, x * y);
      phi = std::max(phi, x * y);
    }
  auto fdiv = [](i128 a_, i128 b_) {
    i128 q = a_ / b_;
    if ((a_ % b_ != 0) && ((a_ < 0) != (b_ < 0))) --q;
    return q;
  };
  RangeBits acc(static_cast<std::int64_t>(fdiv(plo, scale)) - 1,
                static_cast<std::int64_t>(fdiv(phi, scale)) + 1);
  for (std::int64_t ja : ia) {
    for (std::int64_t jb : ib) {
      const i128 e1[2] = {ja, ja + 1}, e2[2] = {jb, jb + 1};
      i128 lo = e1[0] * e2[0], hi = lo;
      for (i128 x : e1)
        for (i128 y : e2) {
          lo = std::min(lo, x * y);
          hi = std::max(hi, x * y);
        }
      std::int64_t t0, t1;
      if (overlap_cells(lo, scale, hi, scale, &t0, &t1)) acc.mark_range(t0, t1);
    }
  }
  return acc.build(m);
}

DiscretizedSet combine_div(const DiscretizedSet& a, const DiscretizedSet& b) {
  const auto ia = abs_indices(a), ib = abs_indices(b);
  const int m = a.resolution();
  const std::int64_t scale = std::int64_t{1} << m;
  const std::int64_t eighth = scale / 8;
  for (std::int64_t jb : ib) {
    // occupied divisor cell [jb, jb+1] must stay within [1/8, 8] or [-8, -1/8]
    const bool pos = jb >= eighth;
    const bool neg = jb + 1 <= -eighth;
    if (!pos && !neg)
      throw std::domain_error("pointwise_combine: divisor touches the zone around 0");
  }
  if (ia.empty() || ib.empty()) return DiscretizedSet(GridSpec::line(m, 0, 1));

  // Exact rational quotient bounds per cell pair; fractions are normalized
  // to positive denominators before cross-multiplied comparison.
  bool have = false;
  std::int64_t tmin = 0, tmax = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> marked;
  for (std::int64_t ja : ia) {
    for (std::int64_t jb : ib) {
      const i128 nums[2] = {ja, ja + 1};
      const i128 dens[2] = {jb, jb + 1};
      i128 lo_n = 0, lo_d = 1, hi_n = 0, hi_d = 1;
      bool first = true;
      for (i128 nn : nums)
        for (i128 dd : dens) {
          i128 fn = nn, fd = dd;
          if (fd < 0) {
            fn = -fn;
            fd = -fd;
          }
          if (first) {
            lo_n = hi_n = fn;
            lo_d = hi_d = fd;
            first = false;
            continue;
          }
          if (fn * lo_d < lo_n * fd) {
            lo_n = fn;
            lo_d = fd;
          }
          if (fn * hi_d > hi_n * fd) {
            hi_n = fn;
            hi_d = fd;
          }
        }
      std::int64_t t0, t1;
      if (overlap_cells(lo_n * scale, lo_d, hi_n * scale, hi_d, &t0, &t1)) {
        marked.emplace_back(t0, t1);
        if (!have || t0 < tmin) tmin = t0;
        if (!have || t1 > tmax) tmax = t1;
        have = true;
      }
    }
  }
  if (!have) return DiscretizedSet(GridSpec::line(m, 0, 1));
  RangeBits acc(tmin, tmax);
  for (const auto& [t0, t1] : marked) acc.mark_range(t0, t1);
  return acc.build(m);
}

}  // namespace

DiscretizedSet pointwise_combine(const DiscretizedSet& a, const DiscretizedSet& b,
                                 BinaryOp op) {
  require_1d_pair(a, b);
  switch (op) {
    case BinaryOp::Add:
      return combine_add(a, b);
    case BinaryOp::Sub:
      return combine_add(a, negate_set(b));
    case BinaryOp::Mul:
      return combine_mul(a, b);
    case BinaryOp::Div:
      return combine_div(a, b);
  }
  throw std::invalid_argument("pointwise_combine: unknown op");
}

DiscretizedSet unary_transform(const DiscretizedSet& a, UnaryOp op) {
  if (a.dim() != 1) throw std::invalid_argument("unary_transform: operand must be 1D");
  const int m = a.resolution();
  const std::int64_t scale = std::int64_t{1} << m;
  const auto ia = abs_indices(a);
  switch (op) {
    case UnaryOp::Negate:
      return negate_set(a);
    case UnaryOp::Square: {
      if (ia.empty()) return DiscretizedSet(GridSpec::line(m, 0, 1));
      i128 lo_all = i128(ia.front()) * ia.front(), hi_all = lo_all;
      for (std::int64_t j : ia) {
        const i128 e[2] = {j, j + 1};
        for (i128 x : e)
          for (i128 y : e) {
            lo_all = std::min(lo_all, x * y);
            hi_all = std::max(hi_all, x * y);
          }
      }
      auto fdiv = [](i128 a_, i128 b_) {
        i128 q = a_ / b_;
        if ((a_ % b_ != 0) && ((a_ < 0) != (b_ < 0))) --q;
        return q;
      };
      RangeBits acc(static_cast<std::int64_t>(fdiv(lo_all, scale)) - 1,
                    static_cast<std::int64_t>(fdiv(hi_all, scale)) + 1);
      for (std::int64_t j : ia) {
        i128 lo, hi;
        if (j >= 0) {
          lo = i128(j) * j;
          hi = i128(j + 1) * (j + 1);
        } else if (j + 1 <= 0) {
          lo = i128(j + 1) * (j + 1);
          hi = i128(j) * j;
        } else {
          lo = 0;
          hi = std::max<i128>(i128(j) * j, i128(j + 1) * (j + 1));
        }
        std::int64_t t0, t1;
        if (overlap_cells(lo, scale, hi, scale, &t0, &t1)) acc.mark_range(t0, t1);
      }
      return acc.build(m);
    }
    case UnaryOp::Sqrt: {
      for (std::int64_t j : ia)
        if (j < 0) throw std::domain_error("unary_transform: sqrt of negative cells");
      if (ia.empty()) return DiscretizedSet(GridSpec::line(m, 0, 1));
      // sqrt([j, j+1] * delta): mark t iff t^2 < (j+1)*scale and (t+1)^2 > j*scale
      RangeBits acc(0, detail::isqrt((ia.back() + 1) * scale) + 1);
      for (std::int64_t j : ia) {
        const std::int64_t lo_units = j * scale;        // value^2 in delta^2 units
        const std::int64_t hi_units = (j + 1) * scale;
        for (std::int64_t t = detail::isqrt(lo_units); t * t < hi_units; ++t)
          acc.mark(t);
      }
      return acc.build(m);
    }
  }
  throw std::invalid_argument("unary_transform: unknown op");
}

namespace {

// Tiny recursive-descent parser for signed set expressions.
class ExprParser {
 public:
  ExprParser(const std::map<std::string, DiscretizedSet>& env, const std::string& src)
      : env_(env), src_(src) {}

  DiscretizedSet parse() {
    DiscretizedSet v = expr();
    skip_ws();
    if (pos_ != src_.size())
      throw std::invalid_argument("eval_expression: trailing input at position " +
                                  std::to_string(pos_));
    return v;
  }

 private:
  DiscretizedSet expr() {
    DiscretizedSet v = term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        v = pointwise_combine(v, term(), BinaryOp::Add);
      else if (eat('-'))
        v = pointwise_combine(v, term(), BinaryOp::Sub);
      else
        return v;
    }
  }

  DiscretizedSet term() {
    DiscretizedSet v = factor();
    for (;;) {
      skip_ws();
      if (eat('*'))
        v = pointwise_combine(v, factor(), BinaryOp::Mul);
      else if (eat('/'))
        v = pointwise_combine(v, factor(), BinaryOp::Div);
      else
        return v;
    }
  }

  DiscretizedSet factor() {
    skip_ws();
    DiscretizedSet v = primary();
    for (;;) {
      skip_ws();
      if (pos_ + 1 < src_.size() && src_[pos_] == '^' && src_[pos_ + 1] == '2') {
        pos_ += 2;
        v = unary_transform(v, UnaryOp::Square);
      } else {
        return v;
      }
    }
  }

  DiscretizedSet primary() {
    skip_ws();
    if (eat('-')) return unary_transform(primary(), UnaryOp::Negate);
    if (eat('(')) {
      DiscretizedSet v = expr();
      expect(')');
      return v;
    }
    const std::string name = identifier();
    if (name == "sqrt") {
      expect('(');
      DiscretizedSet v = expr();
      expect(')');
      return unary_transform(v, UnaryOp::Sqrt);
    }
    auto it = env_.find(name);
    if (it == env_.end())
      throw std::invalid_argument("eval_expression: unknown set '" + name + "'");
    return it->second;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    if (pos_ == start)
      throw std::invalid_argument("eval_expression: expected name at position " +
                                  std::to_string(start));
    return src_.substr(start, pos_ - start);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!eat(c))
      throw std::invalid_argument(std::string("eval_expression: expected '") + c +
                                  "' at position " + std::to_string(pos_));
  }

  const std::map<std::string, DiscretizedSet>& env_;
  const std::string& src_;
  std::size_t pos_ = 0;
};

}  // namespace

DiscretizedSet eval_expression(const std::map<std::string, DiscretizedSet>& bindings,
                               const std::string& expr) {
  int m = -1;
  for (const auto& [name, s] : bindings) {
    if (s.dim() != 1)
      throw std::invalid_argument("eval_expression: bindings must be 1D");
    if (m < 0) m = s.resolution();
    if (s.resolution() != m)
      throw std::invalid_argument("eval_expression: bindings must share m");
  }
  if (bindings.empty()) throw std::invalid_argument("eval_expression: no bindings");
  return ExprParser(bindings, expr).parse();
}

RelationMask::RelationMask(GridSpec grid_a, GridSpec grid_b)
    : ga_(grid_a), gb_(grid_b) {
  ga_.validate();
  gb_.validate();
  if (ga_.dim != 1 || gb_.dim != 1)
    throw std::invalid_argument("RelationMask: grids must be 1D");
  const std::int64_t bits = ga_.nx * gb_.nx;
  if (bits > (std::int64_t{1} << 34))
    throw std::invalid_argument("RelationMask: relation too large");
  bits_.assign(static_cast<std::size_t>((bits + 63) / 64), 0);
}

RelationMask RelationMask::full(const GridSpec& ga, const GridSpec& gb) {
  RelationMask r(ga, gb);
  for (std::int64_t ia = 0; ia < ga.nx; ++ia)
    for (std::int64_t ib = 0; ib < gb.nx; ++ib) r.set(ia, ib);
  return r;
}

void RelationMask::set(std::int64_t ia, std::int64_t ib, bool value) {
  if (ia < 0 || ia >= ga_.nx || ib < 0 || ib >= gb_.nx)
    throw std::invalid_argument("RelationMask: pair outside extent");
  const std::int64_t idx = ia * gb_.nx + ib;
  if (value)
    bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
  else
    bits_[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
}

bool RelationMask::test(std::int64_t ia, std::int64_t ib) const {
  if (ia < 0 || ia >= ga_.nx || ib < 0 || ib >= gb_.nx) return false;
  const std::int64_t idx = ia * gb_.nx + ib;
  return (bits_[idx >> 6] >> (idx & 63)) & 1;
}

std::int64_t RelationMask::pair_count() const {
  std::int64_t c = 0;
  for (auto w : bits_) c += __builtin_popcountll(w);
  return c;
}

DiscretizedSet partial_sumset(const DiscretizedSet& a, const DiscretizedSet& b,
                              const RelationMask& g) {
  require_1d_pair(a, b);
  if (g.grid_a() != a.grid() || g.grid_b() != b.grid())
    throw std::invalid_argument("partial_sumset: relation grids do not match operands");
  const auto ia = abs_indices(a), ib = abs_indices(b);
  if (ia.empty() || ib.empty())
    return DiscretizedSet(GridSpec::line(a.resolution(), 0, 1));
  RangeBits acc(ia.front() + ib.front(), ia.back() + ib.back() + 1);
  a.for_each_cell([&](std::int64_t xa, std::int64_t) {
    b.for_each_cell([&](std::int64_t xb, std::int64_t) {
      if (!g.test(xa, xb)) return;
      const std::int64_t s = (xa + a.grid().ox) + (xb + b.grid().ox);
      acc.mark(s);
      acc.mark(s + 1);
    });
  });
  if (!acc.any())
    return DiscretizedSet(GridSpec::line(a.resolution(), 0, 1));
  return acc.build(a.resolution());
}

namespace {

void checked_add(std::int64_t& acc, std::int64_t v) {
  if (__builtin_add_overflow(acc, v, &acc))
    throw std::overflow_error("representation_table: 64-bit count overflow");
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("representation_table: 64-bit count overflow");
  return r;
}

struct CountArray {
  std::int64_t offset = 0;
  std::vector<std::int64_t> v;
};

// c[k] = sum_{i+j=k} a[i] * b[j]
CountArray convolve(const CountArray& a, const CountArray& b) {
  CountArray c;
  c.offset = a.offset + b.offset;
  c.v.assign(a.v.size() + b.v.size() - 1, 0);
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (!a.v[i]) continue;
    for (std::size_t j = 0; j < b.v.size(); ++j) {
      if (!b.v[j]) continue;
      checked_add(c.v[i + j], checked_mul(a.v[i], b.v[j]));
    }
  }
  return c;
}

CountArray reflect(const CountArray& a) {
  CountArray r;
  r.offset = -(a.offset + static_cast<std::int64_t>(a.v.size()) - 1);
  r.v.assign(a.v.rbegin(), a.v.rend());
  return r;
}

CountArray indicator(const DiscretizedSet& s) {
  CountArray c;
  const auto idx = abs_indices(s);
  if (idx.empty()) {
    c.offset = 0;
    c.v = {0};
    return c;
  }
  c.offset = idx.front();
  c.v.assign(static_cast<std::size_t>(idx.back() - idx.front() + 1), 0);
  for (std::int64_t j : idx) c.v[static_cast<std::size_t>(j - c.offset)] = 1;
  return c;
}

}  // namespace

RepresentationTable representation_table(const DiscretizedSet& a,
                                         const DiscretizedSet& b) {
  require_1d_pair(a, b);
  RepresentationTable out;
  out.m = a.resolution();
  if (a.empty() || b.empty()) {
    out.offset = 0;
    out.counts = {0};
    return out;
  }
  const CountArray ca = indicator(a);
  const CountArray cb = indicator(b);
  const CountArray diff = convolve(ca, reflect(cb));       // a - b
  const CountArray two = convolve(diff, reflect(diff));    // (a1-b1) - (a2-b2)
  const CountArray three = convolve(two, diff);            // ... + (a3-b3)
  out.offset = three.offset;
  out.counts = three.v;
  return out;
}

std::int64_t RepresentationTable::count_at(std::int64_t abs_index) const {
  const std::int64_t i = abs_index - offset;
  if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
  return counts[static_cast<std::size_t>(i)];
}

double RepresentationTable::normalized(std::int64_t abs_index) const {
  return count_at(abs_index) * std::exp2(-5.0 * m);
}

std::int64_t RepresentationTable::total() const {
  std::int64_t t = 0;
  for (std::int64_t c : counts) checked_add(t, c);
  return t;
}

std::int64_t representation_count(const DiscretizedSet& a, const DiscretizedSet& b,
                                  std::int64_t target_abs_index) {
  return representation_table(a, b).count_at(target_abs_index);
}

PopularityCheck relation_popularity_check(const DiscretizedSet& a,
                                          const DiscretizedSet& b,
                                          const RelationMask& g, double lambda) {
  require_1d_pair(a, b);
  if (!(lambda > 0) || lambda > 1)
    throw std::invalid_argument("relation_popularity_check: lambda in (0, 1]");
  std::int64_t pairs = 0;
  std::int64_t deg_sq = 0;
  a.for_each_cell([&](std::int64_t xa, std::int64_t) {
    std::int64_t deg = 0;
    b.for_each_cell([&](std::int64_t xb, std::int64_t) {
      if (g.test(xa, xb)) ++deg;
    });
    checked_add(pairs, deg);
    checked_add(deg_sq, checked_mul(deg, deg));
  });
  const double d = a.delta();
  PopularityCheck out;
  out.pair_measure = pairs * d * d;
  out.triple_measure = deg_sq * d * d * d;
  const double ma = a.measure(), mb = b.measure();
  out.hypothesis = out.pair_measure >= lambda * ma * mb;
  if (!out.hypothesis) {
    out.verdict = true;  // nothing to conclude
    return out;
  }
  // exact integer form of triple >= pair^2 / |A|
  out.verdict = deg_sq * a.cell_count() >= pairs * pairs;
  return out;
}

}  // namespace dslab

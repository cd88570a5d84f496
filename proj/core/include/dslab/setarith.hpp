#pragma once

#include <map>
#include <string>
#include <vector>

#include "dslab/grid.hpp"

namespace dslab {

enum class BinaryOp { Add, Sub, Mul, Div };
enum class UnaryOp { Square, Sqrt, Negate };

/// Outer interval-arithmetic combination of two 1D sets at the same
/// resolution: a result cell is marked iff the closed-interval image of some
/// pair of occupied source cells overlaps it with positive length (or hits
/// it as a degenerate point). The result grid is auto-sized to the exact
/// range of the operation; a result leaving [-8, 8] is an error.
DiscretizedSet pointwise_combine(const DiscretizedSet& a, const DiscretizedSet& b,
                                 BinaryOp op);

DiscretizedSet unary_transform(const DiscretizedSet& a, UnaryOp op);

/// Evaluates a signed arithmetic word over named 1D sets with outer rounding
/// at every step. Grammar: identifiers, + - * /, parentheses, postfix ^2,
/// sqrt(...), unary minus; equal precedence evaluates left to right.
DiscretizedSet eval_expression(const std::map<std::string, DiscretizedSet>& bindings,
                               const std::string& expr);

/// Bit-packed relation over cell pairs of two 1D grids (a-cell major).
class RelationMask {
 public:
  RelationMask(GridSpec grid_a, GridSpec grid_b);  // empty relation

  static RelationMask full(const GridSpec& ga, const GridSpec& gb);

  const GridSpec& grid_a() const { return ga_; }
  const GridSpec& grid_b() const { return gb_; }

  void set(std::int64_t ia, std::int64_t ib, bool value = true);
  bool test(std::int64_t ia, std::int64_t ib) const;
  std::int64_t pair_count() const;

 private:
  GridSpec ga_, gb_;
  std::vector<std::uint64_t> bits_;
};

/// Outer cover of { a + b : (a, b) masked in G, both cells occupied }.
DiscretizedSet partial_sumset(const DiscretizedSet& a, const DiscretizedSet& b,
                              const RelationMask& g);

/// Exact per-cell counts of six-tuples (a1,a2,a3,b1,b2,b3) with
/// (a1-b1) - (a2-b2) + (a3-b3) landing on each lattice value, in the
/// lattice semantics where a cell stands for its left-endpoint index.
/// Counts are exact 64-bit integers; overflow throws std::overflow_error.
struct RepresentationTable {
  std::int64_t offset = 0;  // absolute index of counts[0]
  std::vector<std::int64_t> counts;
  int m = 0;

  std::int64_t count_at(std::int64_t abs_index) const;
  /// count * delta^5
  double normalized(std::int64_t abs_index) const;
  std::int64_t total() const;
};

RepresentationTable representation_table(const DiscretizedSet& a,
                                         const DiscretizedSet& b);

std::int64_t representation_count(const DiscretizedSet& a, const DiscretizedSet& b,
                                  std::int64_t target_abs_index);

struct PopularityCheck {
  double pair_measure = 0.0;    // |{(a,b): a~b}| in the plane
  double triple_measure = 0.0;  // |{(a,b,b'): a~b, a~b'}| in 3-space
  bool hypothesis = false;      // pair_measure >= lambda |A||B|
  bool verdict = false;         // Cauchy-Schwarz conclusion (or vacuous pass)
};

/// Counts relation pairs and same-a triples exactly and checks the
/// Cauchy-Schwarz implication; a false verdict indicates a counting bug.
PopularityCheck relation_popularity_check(const DiscretizedSet& a,
                                          const DiscretizedSet& b,
                                          const RelationMask& g, double lambda);

}  // namespace dslab

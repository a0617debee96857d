#pragma once
#include <limits>
#include <vector>

namespace batsv2x {

// Small dense LP:  max c'x  s.t.  Ax <= b, x >= 0.
// Two-phase simplex with Bland-style tie-breaking; suited to the problem
// sizes here (tens to a few hundred rows/columns).
class Simplex {
  public:
    using Vec = std::vector<double>;
    using Mat = std::vector<Vec>;

    Simplex(const Mat& a, const Vec& b, const Vec& c);

    // Returns the objective, -inf if infeasible, +inf if unbounded.
    double solve(Vec& x);

    static constexpr double kInf = std::numeric_limits<double>::infinity();

  private:
    void pivot(int r, int s);
    bool iterate(int phase);

    int m_, n_;
    std::vector<int> nb_, bs_;
    Mat d_;
    static constexpr double kEps = 1e-9;
};

} // namespace batsv2x

#ifndef LATNEG_KAHAN_HPP
#define LATNEG_KAHAN_HPP

#include <cmath>

namespace latneg {

/// Neumaier-compensated accumulator. Used wherever a sum must be
/// independent of how the terms were partitioned across workers.
class KahanSum {
public:
  KahanSum() = default;
  explicit KahanSum(double init) : sum_(init) {}

  KahanSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace latneg

#endif

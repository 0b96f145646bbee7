#pragma once

namespace nlslab {

// Compensated (Kahan) accumulator. Norm sums over wide windows stay honest
// even when terms span many orders of magnitude.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace nlslab

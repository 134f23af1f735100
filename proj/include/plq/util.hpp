#pragma once

#include <cmath>
#include <functional>

#include "plq/common.hpp"

namespace plq {

/// Neumaier-compensated accumulator for complex sums.
class CompensatedSum {
public:
    void add(cplx x) {
        add_part(re_, cre_, x.real());
        add_part(im_, cim_, x.imag());
    }
    cplx value() const { return {re_ + cre_, im_ + cim_}; }

private:
    static void add_part(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double re_ = 0, cre_ = 0, im_ = 0, cim_ = 0;
};

/// Runs body(0..n-1) on a small worker pool. Each index must write only its own
/// output slot; the first exception thrown is rethrown after all workers join.
/// PLQ_THREADS caps the pool size.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace plq

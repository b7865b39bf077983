#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace mcut {

using mpreal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                             boost::multiprecision::et_off>;

// Sets the working precision of newly created mpreal values for the guard's lifetime.
class DigitsGuard {
public:
    explicit DigitsGuard(unsigned digits) : old_(mpreal::default_precision()) {
        mpreal::default_precision(digits);
    }
    ~DigitsGuard() { mpreal::default_precision(old_); }
    DigitsGuard(const DigitsGuard&) = delete;
    DigitsGuard& operator=(const DigitsGuard&) = delete;

private:
    unsigned old_;
};

}  // namespace mcut

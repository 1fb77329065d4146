#pragma once

#include <cmath>
#include <complex>

namespace markoff {

// Neumaier summation, real and imaginary parts carried separately
template <class T>
class compensated_sum {
public:
    void add(T x)
    {
        T t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    compensated_sum& operator+=(T x)
    {
        add(x);
        return *this;
    }
    T value() const { return s_ + c_; }

private:
    T s_ = 0;
    T c_ = 0;
};

template <class T>
class compensated_sum<std::complex<T>> {
public:
    void add(std::complex<T> z)
    {
        re_.add(z.real());
        im_.add(z.imag());
    }
    compensated_sum& operator+=(std::complex<T> z)
    {
        add(z);
        return *this;
    }
    std::complex<T> value() const { return {re_.value(), im_.value()}; }

private:
    compensated_sum<T> re_, im_;
};

}  // namespace markoff

#pragma once

#include <vector>

namespace fracdens {

// Truncated Taylor series c[0] + c[1] h + ... + c[n] h^n.
class Taylor {
public:
    Taylor() = default;
    explicit Taylor(int degree, double value = 0.0) : c_(degree + 1, 0.0) { c_[0] = value; }
    static Taylor variable(int degree, double at);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }
    // i-th derivative at the expansion point
    double derivative(int i) const;

    Taylor& operator+=(const Taylor& o);
    Taylor& operator-=(const Taylor& o);
    Taylor& operator*=(double s);

    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator*(Taylor a, double s) { return a *= s; }
    friend Taylor operator*(double s, Taylor a) { return a *= s; }
    friend Taylor operator*(const Taylor& a, const Taylor& b);
    friend Taylor operator/(const Taylor& a, const Taylor& b);
    Taylor operator-() const { return *this * -1.0; }

    // d/dh, lowering the degree by one
    Taylor differentiate() const;

private:
    std::vector<double> c_;
};

Taylor exp(const Taylor& a);
Taylor log(const Taylor& a);
Taylor sin(const Taylor& a);
Taylor cos(const Taylor& a);
Taylor pow(const Taylor& a, double r);
Taylor ipow(const Taylor& a, int n);

// Composition F(a(h)) given the derivatives F^(m)(a[0]) for m = 0..degree.
Taylor compose(const std::vector<double>& outer_derivs, const Taylor& a);

}  // namespace fracdens

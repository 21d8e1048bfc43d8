#include "fracdens/taylor.hpp"

#include <cmath>

#include "fracdens/errors.hpp"
#include "fracdens/specfun.hpp"

namespace fracdens {

Taylor Taylor::variable(int degree, double at) {
    Taylor t(degree, at);
    if (degree >= 1) t.c_[1] = 1.0;
    return t;
}

double Taylor::derivative(int i) const {
    if (i > degree()) return 0.0;
    return c_[i] * factorial(i);
}

Taylor& Taylor::operator+=(const Taylor& o) {
    for (int i = 0; i <= degree() && i <= o.degree(); ++i) c_[i] += o.c_[i];
    return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
    for (int i = 0; i <= degree() && i <= o.degree(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Taylor& Taylor::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
    const int n = std::min(a.degree(), b.degree());
    Taylor r(n);
    for (int i = 0; i <= n; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += a.c_[j] * b.c_[i - j];
        r.c_[i] = s;
    }
    return r;
}

Taylor operator/(const Taylor& a, const Taylor& b) {
    const int n = std::min(a.degree(), b.degree());
    if (b.c_[0] == 0.0) throw_domain("taylor: division by a series with zero constant term");
    Taylor r(n);
    for (int i = 0; i <= n; ++i) {
        double s = a.c_[i];
        for (int j = 0; j < i; ++j) s -= r.c_[j] * b.c_[i - j];
        r.c_[i] = s / b.c_[0];
    }
    return r;
}

Taylor Taylor::differentiate() const {
    Taylor r(std::max(degree() - 1, 0));
    for (int i = 1; i <= degree(); ++i) r.c_[i - 1] = i * c_[i];
    return r;
}

Taylor exp(const Taylor& a) {
    const int n = a.degree();
    Taylor e(n, std::exp(a[0]));
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int i = 1; i <= k; ++i) s += i * a[i] * e[k - i];
        e[k] = s / k;
    }
    return e;
}

Taylor log(const Taylor& a) {
    const int n = a.degree();
    if (!(a[0] > 0.0)) throw_domain("taylor: log of a non-positive value");
    Taylor l(n, std::log(a[0]));
    for (int k = 1; k <= n; ++k) {
        double s = a[k];
        for (int i = 1; i < k; ++i) s -= static_cast<double>(i) / k * l[i] * a[k - i];
        l[k] = s / a[0];
    }
    return l;
}

namespace {
void sincos(const Taylor& a, Taylor& s, Taylor& c) {
    const int n = a.degree();
    s = Taylor(n, std::sin(a[0]));
    c = Taylor(n, std::cos(a[0]));
    for (int k = 1; k <= n; ++k) {
        double ss = 0.0, cc = 0.0;
        for (int i = 1; i <= k; ++i) {
            ss += i * a[i] * c[k - i];
            cc -= i * a[i] * s[k - i];
        }
        s[k] = ss / k;
        c[k] = cc / k;
    }
}
}  // namespace

Taylor sin(const Taylor& a) {
    Taylor s, c;
    sincos(a, s, c);
    return s;
}

Taylor cos(const Taylor& a) {
    Taylor s, c;
    sincos(a, s, c);
    return c;
}

Taylor ipow(const Taylor& a, int n) {
    if (n < 0) return Taylor(a.degree(), 1.0) / ipow(a, -n);
    Taylor r(a.degree(), 1.0);
    Taylor base = a;
    while (n > 0) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return r;
}

Taylor pow(const Taylor& a, double r) {
    if (r == std::floor(r) && std::abs(r) < 64) return ipow(a, static_cast<int>(r));
    const int n = a.degree();
    if (!(a[0] > 0.0)) throw_domain("taylor: non-integer power of a non-positive value");
    Taylor p(n, std::pow(a[0], r));
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int i = 1; i <= k; ++i) s += ((r + 1.0) * i - k) * a[i] * p[k - i];
        p[k] = s / (k * a[0]);
    }
    return p;
}

Taylor compose(const std::vector<double>& outer_derivs, const Taylor& a) {
    const int n = a.degree();
    Taylor d = a;
    d[0] = 0.0;
    Taylor r(n, outer_derivs.empty() ? 0.0 : outer_derivs[0]);
    Taylor dm(n, 1.0);
    for (int m = 1; m <= n && m < static_cast<int>(outer_derivs.size()); ++m) {
        dm = dm * d;
        r += dm * (outer_derivs[m] / factorial(m));
    }
    return r;
}

}  // namespace fracdens

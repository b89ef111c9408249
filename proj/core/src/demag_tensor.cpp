#include "magnex/demag_tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "magnex/error.hpp"

namespace magnex {

namespace {

using LD = long double;
constexpr LD kPiL = 3.141592653589793238462643383279502884L;

// Doubly compensated summation after sorting by decreasing magnitude.
LD accurate_sum(LD* a, int n) {
    if (n == 0) return 0.0L;
    std::sort(a, a + n, [](LD x, LD y) { return std::fabs(x) > std::fabs(y); });
    LD sum = a[0];
    LD corr = 0.0L;
    for (int i = 1; i < n; ++i) {
        const LD x = a[i];
        const LD y = corr + x;
        const LD u = x - (y - corr);
        const LD t = y + sum;
        const LD v = y - (t - sum);
        const LD z = u + v;
        sum = t + z;
        corr = z - (sum - t);
    }
    return sum;
}

// Nxx * 4π dx dy dz for the cell-averaged tensor (positive-N convention).
LD sda00(LD x, LD y, LD z, LD dx, LD dy, LD dz) {
    if (x == 0 && y == 0 && z == 0) return self_demag_nx(dx, dy, dz) * (4 * kPiL * dx * dy * dz);
    std::array<LD, 27> a{
        -newell_f(x + dx, y + dy, z + dz), -newell_f(x + dx, y - dy, z + dz),
        -newell_f(x + dx, y - dy, z - dz), -newell_f(x + dx, y + dy, z - dz),
        -newell_f(x - dx, y + dy, z - dz), -newell_f(x - dx, y + dy, z + dz),
        -newell_f(x - dx, y - dy, z + dz), -newell_f(x - dx, y - dy, z - dz),
        2 * newell_f(x, y - dy, z - dz),   2 * newell_f(x, y - dy, z + dz),
        2 * newell_f(x, y + dy, z + dz),   2 * newell_f(x, y + dy, z - dz),
        2 * newell_f(x + dx, y + dy, z),   2 * newell_f(x + dx, y, z + dz),
        2 * newell_f(x + dx, y, z - dz),   2 * newell_f(x + dx, y - dy, z),
        2 * newell_f(x - dx, y - dy, z),   2 * newell_f(x - dx, y, z + dz),
        2 * newell_f(x - dx, y, z - dz),   2 * newell_f(x - dx, y + dy, z),
        -4 * newell_f(x, y - dy, z),       -4 * newell_f(x, y + dy, z),
        -4 * newell_f(x, y, z - dz),       -4 * newell_f(x, y, z + dz),
        -4 * newell_f(x + dx, y, z),       -4 * newell_f(x - dx, y, z),
        8 * newell_f(x, y, z)};
    return accurate_sum(a.data(), 27);
}

// Nxy * 4π dx dy dz for the cell-averaged tensor (positive-N convention).
LD sda01(LD x, LD y, LD z, LD l, LD h, LD e) {
    std::array<LD, 27> a{
        -newell_g(x - l, y - h, z - e), -newell_g(x - l, y - h, z + e),
        -newell_g(x + l, y - h, z + e), -newell_g(x + l, y - h, z - e),
        -newell_g(x + l, y + h, z - e), -newell_g(x + l, y + h, z + e),
        -newell_g(x - l, y + h, z + e), -newell_g(x - l, y + h, z - e),
        2 * newell_g(x, y + h, z - e),  2 * newell_g(x, y + h, z + e),
        2 * newell_g(x, y - h, z + e),  2 * newell_g(x, y - h, z - e),
        2 * newell_g(x - l, y - h, z),  2 * newell_g(x - l, y + h, z),
        2 * newell_g(x - l, y, z - e),  2 * newell_g(x - l, y, z + e),
        2 * newell_g(x + l, y, z + e),  2 * newell_g(x + l, y, z - e),
        2 * newell_g(x + l, y - h, z),  2 * newell_g(x + l, y + h, z),
        -4 * newell_g(x - l, y, z),     -4 * newell_g(x + l, y, z),
        -4 * newell_g(x, y, z + e),     -4 * newell_g(x, y, z - e),
        -4 * newell_g(x, y - h, z),     -4 * newell_g(x, y + h, z),
        8 * newell_g(x, y, z)};
    return accurate_sum(a.data(), 27);
}

// Positive-N asymptotic Nxx (error O(R^-9)).
LD asym_xx(LD x, LD y, LD z, LD dx, LD dy, LD dz) {
    const LD R2 = x * x + y * y + z * z;
    if (R2 <= 0) return self_demag_nx(dx, dy, dz);
    const LD R = std::sqrt(R2);
    const LD sx2 = x * x / R2, sy2 = y * y / R2, sz2 = z * z / R2;
    const LD sx4 = sx2 * sx2, sy4 = sy2 * sy2, sz4 = sz2 * sz2;
    const LD sx6 = sx4 * sx2, sy6 = sy4 * sy2, sz6 = sz4 * sz2;
    const LD dx2 = dx * dx, dy2 = dy * dy, dz2 = dz * dz;
    const LD dx4 = dx2 * dx2, dy4 = dy2 * dy2, dz4 = dz2 * dz2;
    const LD term3 = 2 * sx2 - sy2 - sz2;
    LD term5 = 0;
    if (dx2 != dy2 || dx2 != dz2) {
        const LD a1 = 8 * dx2 - 4 * dy2 - 4 * dz2;
        const LD a2 = -24 * dx2 + 27 * dy2 - 3 * dz2;
        const LD a3 = -24 * dx2 - 3 * dy2 + 27 * dz2;
        const LD a4 = 3 * dx2 - 4 * dy2 + 1 * dz2;
        const LD a5 = 6 * dx2 - 3 * dy2 - 3 * dz2;
        const LD a6 = 3 * dx2 + 1 * dy2 - 4 * dz2;
        term5 = 0.25L * (a1 * sx4 + a2 * sx2 * sy2 + a3 * sx2 * sz2 + a4 * sy4 + a5 * sy2 * sz2 +
                         a6 * sz4);
    }
    const LD b1 = 32 * dx4 - 40 * dx2 * dy2 - 40 * dx2 * dz2 + 12 * dy4 + 10 * dy2 * dz2 + 12 * dz4;
    const LD b2 = -240 * dx4 + 580 * dx2 * dy2 + 20 * dx2 * dz2 - 202 * dy4 - 75 * dy2 * dz2 + 22 * dz4;
    const LD b3 = -240 * dx4 + 20 * dx2 * dy2 + 580 * dx2 * dz2 + 22 * dy4 - 75 * dy2 * dz2 - 202 * dz4;
    const LD b4 = 180 * dx4 - 505 * dx2 * dy2 + 55 * dx2 * dz2 + 232 * dy4 - 75 * dy2 * dz2 + 8 * dz4;
    const LD b5 = 360 * dx4 - 450 * dx2 * dy2 - 450 * dx2 * dz2 - 180 * dy4 + 900 * dy2 * dz2 - 180 * dz4;
    const LD b6 = 180 * dx4 + 55 * dx2 * dy2 - 505 * dx2 * dz2 + 8 * dy4 - 75 * dy2 * dz2 + 232 * dz4;
    const LD b7 = -10 * dx4 + 30 * dx2 * dy2 - 5 * dx2 * dz2 - 16 * dy4 + 10 * dy2 * dz2 - 2 * dz4;
    const LD b8 = -30 * dx4 + 55 * dx2 * dy2 + 20 * dx2 * dz2 + 8 * dy4 - 75 * dy2 * dz2 + 22 * dz4;
    const LD b9 = -30 * dx4 + 20 * dx2 * dy2 + 55 * dx2 * dz2 + 22 * dy4 - 75 * dy2 * dz2 + 8 * dz4;
    const LD b10 = -10 * dx4 - 5 * dx2 * dy2 + 30 * dx2 * dz2 - 2 * dy4 + 10 * dy2 * dz2 - 16 * dz4;
    const LD term7 = (b1 * sx6 + b2 * sx4 * sy2 + b3 * sx4 * sz2 + b4 * sx2 * sy4 +
                      b5 * sx2 * sy2 * sz2 + b6 * sx2 * sz4 + b7 * sy6 + b8 * sy4 * sz2 +
                      b9 * sy2 * sz4 + b10 * sz6) /
                     16;
    return (-dx * dy * dz / (4 * kPiL)) * (((term7 / R2 + term5) / R2 + term3) / (R2 * R));
}

// Positive-N asymptotic Nxy (error O(R^-9)).
LD asym_xy(LD x, LD y, LD z, LD dx, LD dy, LD dz) {
    const LD R2 = x * x + y * y + z * z;
    if (R2 <= 0) return 0;
    const LD R = std::sqrt(R2);
    const LD sx2 = x * x / R2, sy2 = y * y / R2, sz2 = z * z / R2;
    const LD sx4 = sx2 * sx2, sy4 = sy2 * sy2, sz4 = sz2 * sz2;
    const LD dx2 = dx * dx, dy2 = dy * dy, dz2 = dz * dz;
    const LD dx4 = dx2 * dx2, dy4 = dy2 * dy2, dz4 = dz2 * dz2;
    const LD term3 = 3;
    LD term5 = 0;
    if (dx2 != dy2 || dx2 != dz2) {
        const LD a1 = 4 * dx2 - 3 * dy2 - 1 * dz2;
        const LD a2 = -3 * dx2 + 4 * dy2 - 1 * dz2;
        const LD a3 = -3 * dx2 - 3 * dy2 + 6 * dz2;
        term5 = (a1 * sx2 + a2 * sy2 + a3 * sz2) * 5 / 4;
    }
    const LD b1 = 16 * dx4 - 30 * dx2 * dy2 - 10 * dx2 * dz2 + 10 * dy4 + 5 * dy2 * dz2 + 2 * dz4;
    const LD b2 = -40 * dx4 + 105 * dx2 * dy2 - 5 * dx2 * dz2 - 40 * dy4 - 5 * dy2 * dz2 + 4 * dz4;
    const LD b3 = -40 * dx4 - 15 * dx2 * dy2 + 115 * dx2 * dz2 + 20 * dy4 - 35 * dy2 * dz2 - 32 * dz4;
    const LD b4 = 10 * dx4 - 30 * dx2 * dy2 + 5 * dx2 * dz2 + 16 * dy4 - 10 * dy2 * dz2 + 2 * dz4;
    const LD b5 = 20 * dx4 - 15 * dx2 * dy2 - 35 * dx2 * dz2 - 40 * dy4 + 115 * dy2 * dz2 - 32 * dz4;
    const LD b6 = 10 * dx4 + 15 * dx2 * dy2 - 40 * dx2 * dz2 + 10 * dy4 - 40 * dy2 * dz2 + 32 * dz4;
    const LD term7 =
        (b1 * sx4 + b2 * sx2 * sy2 + b3 * sx2 * sz2 + b4 * sy4 + b5 * sy2 * sz2 + b6 * sz4) * 7 /
        16;
    return (-dx * dy * dz * x * y / (4 * kPiL * R2)) *
           (((term7 / R2 + term5) / R2 + term3) / (R2 * R));
}

// Field at the target center from a uniformly magnetized source prism centered at (x, y, z).
TensorElements point_elements(LD x, LD y, LD z, LD dx, LD dy, LD dz) {
    LD xx[8], yy[8], zz[8], xy[8], xz[8], yz[8];
    int n = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const LD X = x + (i - 0.5L) * dx;
                const LD Y = y + (j - 0.5L) * dy;
                const LD Z = z + (k - 0.5L) * dz;
                const LD R = std::sqrt(X * X + Y * Y + Z * Z);
                const LD s = ((i + j + k) % 2 == 0) ? 1.0L : -1.0L;
                xx[n] = s * std::atan(Y * Z / (X * R));
                yy[n] = s * std::atan(X * Z / (Y * R));
                zz[n] = s * std::atan(X * Y / (Z * R));
                xy[n] = s * std::log(Z + R);
                xz[n] = s * std::log(Y + R);
                yz[n] = s * std::log(X + R);
                ++n;
            }
    const LD c = 1.0L / (4 * kPiL);
    TensorElements t;
    t.xx = static_cast<double>(c * accurate_sum(xx, 8));
    t.yy = static_cast<double>(c * accurate_sum(yy, 8));
    t.zz = static_cast<double>(c * accurate_sum(zz, 8));
    t.xy = static_cast<double>(-c * accurate_sum(xy, 8));
    t.xz = static_cast<double>(-c * accurate_sum(xz, 8));
    t.yz = static_cast<double>(-c * accurate_sum(yz, 8));
    return t;
}

}  // namespace

double TensorElements::operator[](int c) const {
    switch (c) {
        case 0: return xx;
        case 1: return yy;
        case 2: return zz;
        case 3: return xy;
        case 4: return xz;
        case 5: return yz;
        default: throw Error("tensor component index out of range");
    }
}

long double self_demag_nx(long double x, long double y, long double z) {
    if (x <= 0 || y <= 0 || z <= 0) return 0;
    if (x == y && y == z) return 1.0L / 3.0L;
    const LD xsq = x * x, ysq = y * y, zsq = z * z;
    const LD diag = std::sqrt(xsq + ysq + zsq);
    const LD mpxy = (x - y) * (x + y);
    const LD mpxz = (x - z) * (x + z);
    LD a[15] = {
        -4 * (2 * xsq * x - ysq * y - zsq * z),
        4 * (xsq + mpxy) * std::sqrt(xsq + ysq),
        4 * (xsq + mpxz) * std::sqrt(xsq + zsq),
        -4 * (ysq + zsq) * std::sqrt(ysq + zsq),
        -4 * diag * (mpxy + mpxz),
        24 * x * y * z * std::atan(y * z / (x * diag)),
        12 * (z + y) * xsq * std::log(x),
        12 * z * ysq * std::log((std::sqrt(ysq + zsq) + z) / y),
        -12 * z * xsq * std::log(std::sqrt(xsq + zsq) + z),
        12 * z * mpxy * std::log(diag + z),
        -6 * z * mpxy * std::log(xsq + ysq),
        12 * y * zsq * std::log((std::sqrt(ysq + zsq) + y) / z),
        -12 * y * xsq * std::log(std::sqrt(xsq + ysq) + y),
        12 * y * mpxz * std::log(diag + y),
        -6 * y * mpxz * std::log(xsq + zsq),
    };
    return accurate_sum(a, 15) / (12 * kPiL * x * y * z);
}

long double newell_f(long double x, long double y, long double z) {
    x = std::fabs(x);
    y = std::fabs(y);
    z = std::fabs(z);
    const LD xsq = x * x, ysq = y * y, zsq = z * z;
    LD R = xsq + ysq + zsq;
    if (R <= 0) return 0;
    R = std::sqrt(R);
    LD p[8];
    int n = 0;
    if (z > 0) {
        p[n++] = 2 * (2 * xsq - ysq - zsq) * R;
        if (x * y * z > 0) p[n++] = -12 * x * y * z * std::atan2(y * z, x * R);
        if (y > 0 && xsq + zsq > 0) {
            const LD l = std::log(((y + R) * (y + R)) / (xsq + zsq));
            p[n++] = 3 * y * zsq * l;
            p[n++] = -3 * y * xsq * l;
        }
        if (xsq + ysq > 0) {
            const LD l = std::log(((z + R) * (z + R)) / (xsq + ysq));
            p[n++] = 3 * z * ysq * l;
            p[n++] = -3 * z * xsq * l;
        }
    } else if (x == y) {
        const LD K = 2 * std::sqrt(2.0L) - 6 * std::log(1 + std::sqrt(2.0L));
        p[n++] = K * xsq * x;
    } else {
        p[n++] = 2 * (2 * xsq - ysq) * R;
        if (y > 0 && x > 0) p[n++] = -6 * y * xsq * std::log((y + R) / x);
    }
    return accurate_sum(p, n) / 12;
}

long double newell_g(long double x, long double y, long double z) {
    LD sign = 1;
    if (x < 0) sign = -sign;
    if (y < 0) sign = -sign;
    x = std::fabs(x);
    y = std::fabs(y);
    z = std::fabs(z);
    const LD xsq = x * x, ysq = y * y, zsq = z * z;
    LD R = xsq + ysq + zsq;
    if (R <= 0) return 0;
    R = std::sqrt(R);
    LD p[7];
    int n = 0;
    p[n++] = -2 * x * y * R;
    if (z > 0) {
        p[n++] = -z * zsq * std::atan2(x * y, z * R);
        p[n++] = -3 * z * ysq * std::atan2(x * z, y * R);
        p[n++] = -3 * z * xsq * std::atan2(y * z, x * R);
        if (xsq + ysq > 0) p[n++] = 6 * x * y * z * std::log((z + R) / std::sqrt(xsq + ysq));
        if (ysq + zsq > 0) p[n++] = y * (3 * zsq - ysq) * std::log((x + R) / std::sqrt(ysq + zsq));
        if (xsq + zsq > 0) p[n++] = x * (3 * zsq - xsq) * std::log((y + R) / std::sqrt(xsq + zsq));
    } else {
        if (y > 0) p[n++] = -y * ysq * std::log((x + R) / y);
        if (x > 0) p[n++] = -x * xsq * std::log((y + R) / x);
    }
    return sign * accurate_sum(p, n) / 6;
}

TensorElements tensor_asymptotic(double x, double y, double z, double dx, double dy, double dz) {
    TensorElements t;
    t.xx = -static_cast<double>(asym_xx(x, y, z, dx, dy, dz));
    t.yy = -static_cast<double>(asym_xx(y, x, z, dy, dx, dz));
    t.zz = -static_cast<double>(asym_xx(z, y, x, dz, dy, dx));
    t.xy = -static_cast<double>(asym_xy(x, y, z, dx, dy, dz));
    t.xz = -static_cast<double>(asym_xy(x, z, y, dx, dz, dy));
    t.yz = -static_cast<double>(asym_xy(y, z, x, dy, dz, dx));
    return t;
}

TensorElements tensor_elements(std::int64_t I, std::int64_t J, std::int64_t K, double dx,
                               double dy, double dz, TensorFlavor flavor,
                               double far_field_diagonals) {
    const double scale = std::max({dx, dy, dz});
    dx /= scale;
    dy /= scale;
    dz /= scale;
    const LD x = static_cast<LD>(I) * dx;
    const LD y = static_cast<LD>(J) * dy;
    const LD z = static_cast<LD>(K) * dz;
    if (flavor == TensorFlavor::Point) return point_elements(x, y, z, dx, dy, dz);

    const LD diag2 = static_cast<LD>(dx) * dx + static_cast<LD>(dy) * dy + static_cast<LD>(dz) * dz;
    const LD r2 = x * x + y * y + z * z;
    if (r2 > far_field_diagonals * far_field_diagonals * diag2) {
        return tensor_asymptotic(static_cast<double>(x), static_cast<double>(y),
                                 static_cast<double>(z), dx, dy, dz);
    }
    const LD vol = 4 * kPiL * static_cast<LD>(dx) * dy * dz;
    TensorElements t;
    t.xx = -static_cast<double>(sda00(x, y, z, dx, dy, dz) / vol);
    t.yy = -static_cast<double>(sda00(y, x, z, dy, dx, dz) / vol);
    t.zz = -static_cast<double>(sda00(z, y, x, dz, dy, dx) / vol);
    t.xy = -static_cast<double>(sda01(x, y, z, dx, dy, dz) / vol);
    t.xz = -static_cast<double>(sda01(x, z, y, dx, dz, dy) / vol);
    t.yz = -static_cast<double>(sda01(y, z, x, dy, dz, dx) / vol);
    return t;
}

}  // namespace magnex

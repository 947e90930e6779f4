#include "cubesum/smallexp.hpp"

#include <cassert>

namespace cubesum {
namespace smallexp {

namespace {

Int cube_sum(const Int& x, const Int& r) {
    return (x - r) * (x - r) * (x - r) + x * x * x + (x + r) * (x + r) * (x + r);
}

} // namespace

ProgressionSquare family_p2(const Int& a, const Int& b) {
    Int a2 = a * a, b2 = b * b;
    Int a4 = a2 * a2, b4 = b2 * b2;
    ProgressionSquare out;
    out.x = 24 * a2 * b2;
    out.r = 9 * a4 - 8 * b4;
    out.y = 12 * a * b * (9 * a4 + 8 * b4);
    assert(cube_sum(out.x, out.r) == out.y * out.y);
    return out;
}

bool p3_check(const Int& x, const Int& r, const Int& y) {
    return 3 * x * (x * x + 2 * r * r) == y * y * y;
}

std::pair<mpq_class, mpq_class> p3_map(const Int& x, const Int& r, const Int& y) {
    assert(p3_check(x, r, y));
    if (x == 0) throw DivisionByZero("p3_map: x = 0 has no image");
    mpq_class X(6 * y, x * x * x);
    X.canonicalize();
    mpq_class Y(-36 * r, x * x);
    Y.canonicalize();
    // image lies on Y^2 = X^3 - 648
    assert(Y * Y == X * X * X - 648);
    return {X, Y};
}

} // namespace smallexp
} // namespace cubesum

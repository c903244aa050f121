#include "perco/fixtures.hpp"

namespace perco::fixtures {

std::vector<HandFixture> hand_fixtures() {
    std::vector<HandFixture> out;
    const Torus t8(2, 8);
    const Torus t5(2, 5);
    const Torus t4(2, 4);
    const Torus t12(2, 12);
    const Torus ring(1, 5);
    const Torus cube(3, 5);
    const auto line = walk(t8, wrap_points(t8, {0, 0}, 0));

    out.push_back({"empty", t8, {}});
    out.push_back({"path", t8, walk(t8, {{0, 0}, {1, 0}, {2, 0}, {2, 1}})});
    out.push_back({"unit-square", t8, square(t8, {0, 0})});
    out.push_back({"unit-square-small-torus", t5, square(t5, {0, 0})});
    out.push_back({"rectangle-3x2", t8, walk(t8, rectangle_points({0, 0}, 3, 2))});
    out.push_back({"rectangle-1x3", t8, walk(t8, rectangle_points({0, 0}, 1, 3))});
    out.push_back({"wrap-line", t8, line});
    out.push_back({"wrap-line-vertical", t8, walk(t8, wrap_points(t8, {0, 3}, 1))});
    out.push_back({"ring-d1", ring, walk(ring, wrap_points(ring, {0}, 0))});
    out.push_back({"theta", t8, concat({line, walk(t8, {{0, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}, {3, 0}})})});
    out.push_back({"two-wraps", t8, concat({line, walk(t8, wrap_points(t8, {0, 3}, 0))})});
    out.push_back({"crossing-wraps", t8, concat({line, walk(t8, wrap_points(t8, {0, 0}, 1))})});
    out.push_back({"wrap-with-branch", t8, concat({line, walk(t8, {{3, 0}, {3, 1}, {3, 2}})})});
    out.push_back({"wrap-with-loop", t8,
                   concat({line, walk(t8, {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}})})});
    out.push_back({"wrap-with-square", t8, concat({line, square(t8, {2, 2}), walk(t8, {{2, 0}, {2, 1}, {2, 2}})})});
    out.push_back({"two-by-two-block", t4,
                   concat({square(t4, {-1, -1}), square(t4, {0, -1}), square(t4, {-1, 0}), square(t4, {0, 0})})});
    out.push_back({"nested-squares", t12,
                   concat({walk(t12, {{-2, 0}, {-1, 0}, {0, 0}}), square(t12, {0, 0}), walk(t12, {{1, 0}, {2, 0}, {3, 0}}),
                           square(t12, {3, 0})})});
    out.push_back({"cube-wrap", cube, walk(cube, wrap_points(cube, {0, 0, 0}, 2))});
    out.push_back({"cube-face-square", cube, square(cube, {0, 0, 0})});
    return out;
}

}  // namespace perco::fixtures

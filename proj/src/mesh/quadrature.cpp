#include "tsgls/mesh/quadrature.hpp"

#include <cmath>

namespace tsgls::mesh {

namespace {

QuadratureRule gauss_line(int n) {
  QuadratureRule r;
  r.dim = 1;
  if (n == 2) {
    const double a = 1.0 / std::sqrt(3.0);
    r.degree = 3;
    r.points = {{-a, 0, 0}, {a, 0, 0}};
    r.weights = {1.0, 1.0};
  } else {
    const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    r.degree = 9;
    r.points = {{-b, 0, 0}, {-a, 0, 0}, {0, 0, 0}, {a, 0, 0}, {b, 0, 0}};
    r.weights = {wb, wa, 128.0 / 225.0, wa, wb};
  }
  return r;
}

QuadratureRule triangle3() {
  QuadratureRule r;
  r.dim = 2;
  r.degree = 2;
  r.points = {{1.0 / 6, 1.0 / 6, 0}, {2.0 / 3, 1.0 / 6, 0}, {1.0 / 6, 2.0 / 3, 0}};
  r.weights = {1.0 / 6, 1.0 / 6, 1.0 / 6};
  return r;
}

QuadratureRule triangle7() {
  QuadratureRule r;
  r.dim = 2;
  r.degree = 5;
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0, b1 = 1.0 - 2.0 * a1;
  const double a2 = (6.0 + s) / 21.0, b2 = 1.0 - 2.0 * a2;
  const double w1 = (155.0 - s) / 2400.0, w2 = (155.0 + s) / 2400.0;
  r.points = {{1.0 / 3, 1.0 / 3, 0}, {a1, a1, 0}, {b1, a1, 0}, {a1, b1, 0},
              {a2, a2, 0},           {b2, a2, 0}, {a2, b2, 0}};
  r.weights = {9.0 / 80, w1, w1, w1, w2, w2, w2};
  return r;
}

QuadratureRule tet4() {
  QuadratureRule r;
  r.dim = 3;
  r.degree = 2;
  const double a = 0.5854101966249685, b = 0.1381966011250105;
  r.points = {{b, b, b}, {a, b, b}, {b, a, b}, {b, b, a}};
  r.weights.assign(4, 1.0 / 24);
  return r;
}

QuadratureRule tet5() {
  QuadratureRule r;
  r.dim = 3;
  r.degree = 3;
  const double q = 1.0 / 6;
  r.points = {{0.25, 0.25, 0.25}, {q, q, q}, {0.5, q, q}, {q, 0.5, q}, {q, q, 0.5}};
  r.weights = {-4.0 / 30, 9.0 / 120, 9.0 / 120, 9.0 / 120, 9.0 / 120};
  return r;
}

const QuadratureRule& gauss_line_5() {
  static const QuadratureRule r = gauss_line(5);
  return r;
}

}  // namespace

const QuadratureRule& assembly_rule(ElementType type) {
  static const QuadratureRule line = gauss_line(2);
  static const QuadratureRule tri = triangle3();
  static const QuadratureRule tet = tet4();
  switch (type) {
    case ElementType::line2: return line;
    case ElementType::tri3: return tri;
    default: return tet;
  }
}

const QuadratureRule& error_rule(ElementType type) {
  static const QuadratureRule line = gauss_line(5);
  static const QuadratureRule tri = triangle7();
  static const QuadratureRule tet = tet5();
  switch (type) {
    case ElementType::line2: return line;
    case ElementType::tri3: return tri;
    default: return tet;
  }
}

const QuadratureRule& facet_rule(ElementType type) {
  static const QuadratureRule point = [] {
    QuadratureRule r;
    r.dim = 0;
    r.degree = 99;
    r.points = {{1.0, 0, 0}};
    r.weights = {1.0};
    return r;
  }();
  static const QuadratureRule segment = [] {
    QuadratureRule r;
    r.dim = 1;
    r.degree = 3;
    const double a = 0.5 - 0.5 / std::sqrt(3.0);
    r.points = {{1.0 - a, a, 0}, {a, 1.0 - a, 0}};
    r.weights = {0.5, 0.5};
    return r;
  }();
  static const QuadratureRule triangle = [] {
    QuadratureRule r;
    r.dim = 2;
    r.degree = 2;
    r.points = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6},
                {1.0 / 6, 1.0 / 6, 2.0 / 3}};
    r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    return r;
  }();
  switch (type) {
    case ElementType::line2: return point;
    case ElementType::tri3: return segment;
    default: return triangle;
  }
}

const QuadratureRule& facet_error_rule(ElementType type) {
  static const QuadratureRule segment = [] {
    const auto& g = gauss_line_5();
    QuadratureRule r;
    r.dim = 1;
    r.degree = g.degree;
    for (int q = 0; q < g.size(); ++q) {
      const double s = 0.5 * (1.0 + g.points[q][0]);
      r.points.push_back({1.0 - s, s, 0.0});
      r.weights.push_back(0.5 * g.weights[q]);
    }
    return r;
  }();
  static const QuadratureRule triangle = [] {
    const auto t = triangle7();
    QuadratureRule r;
    r.dim = 2;
    r.degree = t.degree;
    for (int q = 0; q < t.size(); ++q) {
      const auto& p = t.points[q];
      r.points.push_back({1.0 - p[0] - p[1], p[0], p[1]});
      r.weights.push_back(2.0 * t.weights[q]);
    }
    return r;
  }();
  switch (type) {
    case ElementType::line2: return facet_rule(type);
    case ElementType::tri3: return segment;
    default: return triangle;
  }
}

}  // namespace tsgls::mesh

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "expsel/dataset.hpp"
#include "expsel/error.hpp"

using namespace expsel;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an expsel::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("construction validates shape and values") {
    Matrix x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    Vector y(3);
    y << 1, 2, 3;
    const Dataset d(x, y);
    CHECK(d.n() == 3);
    CHECK(d.p() == 2);
    CHECK(d.column_names() == std::vector<std::string>{"x1", "x2"});

    CHECK(kind_of([&] { Dataset(x, Vector(2)); }) == ErrorKind::ShapeMismatch);
    CHECK(kind_of([&] { Dataset(Matrix(0, 2), Vector(0)); }) == ErrorKind::EmptyData);
    CHECK(kind_of([&] { Dataset(Matrix(3, 0), y); }) == ErrorKind::EmptyData);
    Matrix bad = x;
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(kind_of([&] { Dataset(bad, y); }) == ErrorKind::NonFinite);
    Vector ybad = y;
    ybad(0) = std::numeric_limits<double>::infinity();
    CHECK(kind_of([&] { Dataset(x, ybad); }) == ErrorKind::NonFinite);
    CHECK(kind_of([&] { Dataset(x, y, {"a"}); }) == ErrorKind::ShapeMismatch);
  }

  TEST_CASE("row selection keeps order and names") {
    Matrix x(3, 1);
    x << 10, 20, 30;
    Vector y(3);
    y << 1, 2, 3;
    const Dataset d(x, y, {"a"});
    const std::vector<std::size_t> rows{2, 0};
    const Dataset sub = d.rows(rows);
    CHECK(sub.n() == 2);
    CHECK(sub.x()(0, 0) == 30);
    CHECK(sub.y()(1) == 1);
    CHECK(sub.column_names()[0] == "a");
    const Dataset swapped = d.with_response(Vector::Constant(3, 7.0));
    CHECK(swapped.y()(2) == 7.0);
  }

  TEST_CASE("subset construction and labels") {
    const ModelSubset m({0, 2}, 7);
    CHECK(m.label() == "1+3");
    CHECK(m.one_based() == std::vector<std::size_t>{1, 3});
    CHECK(m.contains(2));
    CHECK_FALSE(m.contains(1));
    CHECK(ModelSubset::parse("1+3", 7) == m);
    CHECK(ModelSubset::from_one_based({3, 1}, 7) == m);
    CHECK(ModelSubset::parse("0", 4).empty());
    CHECK(ModelSubset::parse("", 4).label() == "0");
    CHECK(ModelSubset::full(3).label() == "1+2+3");
    CHECK(kind_of([] { ModelSubset({0, 0}, 3); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { ModelSubset({3}, 3); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { ModelSubset::parse("1+x", 3); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("subset order is size first, then lexicographic") {
    const ModelSubset a({2}, 4), b({0, 1}, 4), c({0, 3}, 4), d({1, 2}, 4);
    CHECK(a < b);
    CHECK(b < c);
    CHECK(c < d);
    CHECK_FALSE(d < a);
  }
}

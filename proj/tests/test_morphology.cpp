#include <cmath>
#include <random>

#include <doctest.h>

#include "cseg/errors.hpp"
#include "cseg/morphology.hpp"
#include "oracles.hpp"

using namespace cseg;

namespace {

std::vector<std::pair<double, double>> as_pairs(const BoundaryPointSet& pts) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : pts) out.emplace_back(p.row, p.col);
  return out;
}

LabelMask center_pixel() { return oracle::mask_from_rows({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}}); }

}  // namespace

TEST_CASE("marching squares on small masks") {
  CHECK(marching_squares_boundary(LabelMask(GridDims(4, 4), false)).empty());

  const std::vector<std::pair<double, double>> diamond = {{0.5, 1.0}, {1.0, 0.5}, {1.0, 1.5}, {1.5, 1.0}};
  CHECK(as_pairs(marching_squares_boundary(center_pixel())) == diamond);

  // The padding ring closes the contour of a mask that fills the grid.
  const std::vector<std::pair<double, double>> around_origin = {{-0.5, 0.0}, {0.0, -0.5}, {0.0, 0.5}, {0.5, 0.0}};
  CHECK(as_pairs(marching_squares_boundary(LabelMask(GridDims(1, 1), true))) == around_origin);
}

TEST_CASE("marching squares matches the neighbour-midpoint oracle") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    const auto m = oracle::random_mask(rng, 1 + t % 12, 1 + (t / 12) % 12, 0.2 + 0.6 * ((t % 5) / 4.0));
    const auto pts = marching_squares_boundary(m);
    CHECK(as_pairs(pts) == oracle::boundary_points(m));
    for (const auto& p : pts) {
      CHECK(p.row >= -0.5);
      CHECK(p.row <= static_cast<double>(m.dims().height()) - 0.5);
      CHECK(p.col >= -0.5);
      CHECK(p.col <= static_cast<double>(m.dims().width()) - 0.5);
    }
  }
  // Saddle cells contribute all four crossings.
  const auto checker = oracle::mask_from_rows({{1, 0}, {0, 1}});
  CHECK(as_pairs(marching_squares_boundary(checker)) == oracle::boundary_points(checker));
}

TEST_CASE("signed distance of the center pixel") {
  const auto e = signed_distance_transform(center_pixel(), Metric::Euclidean);
  CHECK(e.at({1, 1}) == 0.5);
  for (const Pixel p : {Pixel{0, 1}, Pixel{1, 0}, Pixel{1, 2}, Pixel{2, 1}}) CHECK(e.at(p) == -0.5);
  for (const Pixel p : {Pixel{0, 0}, Pixel{0, 2}, Pixel{2, 0}, Pixel{2, 2}}) {
    CHECK(e.at(p) == -std::sqrt(1.25));
  }

  // Under the chessboard metric the edge neighbours sit at 0.5 and the corners
  // at max(0.5, 1) = 1 from the nearest crossing.
  const auto c = signed_distance_transform(center_pixel(), Metric::Chessboard);
  CHECK(c.at({1, 1}) == 0.5);
  for (const Pixel p : {Pixel{0, 1}, Pixel{1, 0}, Pixel{1, 2}, Pixel{2, 1}}) CHECK(c.at(p) == -0.5);
  for (const Pixel p : {Pixel{0, 0}, Pixel{0, 2}, Pixel{2, 0}, Pixel{2, 2}}) CHECK(c.at(p) == -1.0);
  CHECK(c == oracle::signed_distance(center_pixel(), Metric::Chessboard));
}

TEST_CASE("degenerate masks take the sentinel distance") {
  const GridDims dims(3, 5);
  for (const auto metric : {Metric::Euclidean, Metric::Chessboard}) {
    CHECK(signed_distance_transform(LabelMask(dims, true), metric) == ScoreImage(dims, 8.0));
    CHECK(signed_distance_transform(LabelMask(dims, false), metric) == ScoreImage(dims, -8.0));
  }
}

TEST_CASE("signed distance sign and oracle agreement on random masks") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 120; ++t) {
    const auto m = oracle::random_mask(rng, 1 + t % 10, 1 + (t * 7) % 10, 0.5);
    for (const auto metric : {Metric::Euclidean, Metric::Chessboard}) {
      const auto d = signed_distance_transform(m, metric);
      CHECK(d == oracle::signed_distance(m, metric));
      const auto ones = count_ones(m);
      if (ones == 0 || ones == m.size()) continue;
      for (std::size_t i = 0; i < m.size(); ++i) CHECK((d[i] > 0) == m[i]);
    }
  }
}

TEST_CASE("chessboard distances to crossings are half-integers") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 40; ++t) {
    const auto d = signed_distance_transform(oracle::random_mask(rng, 9, 11, 0.3), Metric::Chessboard);
    for (const double v : d.values()) CHECK(2.0 * v == std::round(2.0 * v));
  }
}

TEST_CASE("connected components examples") {
  const auto diag = oracle::mask_from_rows({{1, 0}, {0, 1}});
  const auto four = connected_components(diag, Connectivity::Four);
  REQUIRE(four.size() == 2);
  CHECK(count_ones(four[0]) == 1);
  CHECK(four[0].at({0, 0}));
  CHECK(four[1].at({1, 1}));

  const auto eight = connected_components(diag, Connectivity::Eight);
  REQUIRE(eight.size() == 1);
  CHECK(eight[0] == diag);

  CHECK(connected_components(LabelMask(GridDims(3, 3), false), Connectivity::Four).empty());
}

TEST_CASE("connected components agree with BFS flood fill") {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 200; ++t) {
    const auto m = oracle::random_mask(rng, 1 + t % 11, 1 + (t * 3) % 13, 0.45);
    for (const bool eight : {false, true}) {
      const auto comps = connected_components(m, eight ? Connectivity::Eight : Connectivity::Four);
      std::vector<int> owner(m.size(), -1);
      std::size_t previous_first = 0;
      for (std::size_t k = 0; k < comps.size(); ++k) {
        const auto& comp = comps[k];
        std::size_t first = m.size();
        for (std::size_t i = 0; i < m.size(); ++i) {
          if (!comp[i]) continue;
          CHECK(m[i]);
          CHECK(owner[i] == -1);
          owner[i] = static_cast<int>(k);
          first = std::min(first, i);
        }
        REQUIRE(first < m.size());
        // The component is exactly the flood fill of its first pixel in the full mask.
        const auto filled = oracle::reachable(m, first, eight);
        CHECK(filled.size() == count_ones(comp));
        for (const auto i : filled) CHECK(comp[i]);
        if (k > 0) CHECK(first > previous_first);
        previous_first = first;
      }
      for (std::size_t i = 0; i < m.size(); ++i) CHECK((owner[i] >= 0) == m[i]);
    }
  }
}

TEST_CASE("inscribed and bounding boxes on named shapes") {
  // Solid 3x5 rectangle inside a 5x7 grid.
  std::vector<std::vector<int>> rows(5, std::vector<int>(7, 0));
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 5; ++c) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = 1;
  }
  const auto rect = oracle::mask_from_rows(rows);
  CHECK(largest_inscribed_box(rect) == Box{1, 3, 1, 5});
  CHECK(min_bounding_box(rect) == Box{1, 3, 1, 5});

  const auto ell = oracle::mask_from_rows({{1, 0, 0}, {1, 0, 0}, {1, 1, 1}});
  const auto box = largest_inscribed_box(ell);
  CHECK(box.area() == 3);
  CHECK(box == Box{0, 2, 0, 0});
  CHECK(box == *oracle::largest_box(ell));

  const auto single = oracle::mask_from_rows({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  CHECK(largest_inscribed_box(single) == Box{1, 1, 1, 1});
  CHECK(min_bounding_box(single) == Box{1, 1, 1, 1});

  const auto corners = oracle::mask_from_rows({{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}});
  CHECK(min_bounding_box(corners) == Box{0, 2, 0, 3});

  CHECK_THROWS_AS((void)largest_inscribed_box(LabelMask(GridDims(2, 2), false)), EmptyInputError);
  CHECK_THROWS_AS((void)min_bounding_box(LabelMask(GridDims(2, 2), false)), EmptyInputError);
}

TEST_CASE("largest inscribed box matches exhaustive search") {
  std::mt19937_64 rng(55);
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    const auto m = oracle::random_mask(rng, 1 + t % 10, 1 + (t * 5) % 10, 0.55 + 0.4 * ((t % 3) / 2.0));
    for (const auto& comp : connected_components(m, Connectivity::Four)) {
      const auto box = largest_inscribed_box(comp);
      CHECK(box == *oracle::largest_box(comp));
      CHECK(min_bounding_box(comp) == *oracle::extremes(comp));
      // Sandwich: inscribed box inside the component, component inside its bounding box.
      CHECK(is_subset(rasterize({box}, comp.dims()), comp));
      CHECK(is_subset(comp, rasterize({min_bounding_box(comp)}, comp.dims())));
      ++checked;
    }
  }
  CHECK(checked > 400);
}

TEST_CASE("box set distance") {
  const GridDims dims(3, 3);
  CHECK(box_set_distance({Box{0, 2, 0, 2}}, dims) == ScoreImage(dims, 6.0));
  CHECK(box_set_distance({}, dims) == ScoreImage(dims, -6.0));
  CHECK(box_set_distance({Box{1, 1, 1, 1}}, dims) == signed_distance_transform(center_pixel(), Metric::Chessboard));

  const GridDims wide(6, 12);
  const BoxSet two = {Box{1, 2, 1, 3}, Box{2, 4, 7, 10}};
  const auto d = box_set_distance(two, wide);
  CHECK(d == oracle::signed_distance(rasterize(two, wide), Metric::Chessboard));
  // Outside both boxes the magnitude is the distance to the nearer box's crossings.
  const auto a = oracle::signed_distance(rasterize({two[0]}, wide), Metric::Chessboard);
  const auto b = oracle::signed_distance(rasterize({two[1]}, wide), Metric::Chessboard);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0) CHECK(d[i] == std::max(a[i], b[i]));
  }
}

#include "doctest.h"
#include "mdaug/volume.hpp"
#include "test_util.hpp"

using namespace mdaug;

TEST_SUITE("core-volumes") {
  TEST_CASE("volume invariants are enforced") {
    CHECK_THROWS_AS(Volume(Dims{0, 1, 1}, Spacing{}, {}), ValidationError);
    CHECK_THROWS_AS(Volume(Dims{2, 1, 1}, Spacing{1, -1, 1}, {0, 0}), ValidationError);
    CHECK_THROWS_AS(Volume(Dims{2, 1, 1}, Spacing{}, {0}), ValidationError);
    CHECK_THROWS_AS(Volume(Dims{1, 1, 1}, Spacing{}, {std::nan("")}), ValidationError);
  }

  TEST_CASE("zscore_normalize on [1,2,3]") {
    const Volume v = test::make_volume(Dims{3, 1, 1}, {1, 2, 3});
    const Volume z = zscore_normalize(v);
    CHECK(z.data[0] == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(z.data[1] == doctest::Approx(0.0));
    CHECK(z.data[2] == doctest::Approx(1.2247).epsilon(1e-4));
    double mean = (z.data[0] + z.data[1] + z.data[2]) / 3.0;
    double var = 0;
    for (double x : z.data) var += (x - mean) * (x - mean);
    var /= 3.0;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-6);
  }

  TEST_CASE("zscore_normalize degenerate and idempotent") {
    const Volume c = test::make_volume(Dims{3, 1, 1}, {5, 5, 5});
    for (double x : zscore_normalize(c).data) CHECK(x == 0.0);

    Rng rng(17);
    const Volume v = test::random_volume(Dims{6, 5, 4}, rng);
    const Volume once = zscore_normalize(v);
    const Volume twice = zscore_normalize(once);
    CHECK(test::max_abs_diff(once.data, twice.data) < 1e-6);
  }

  TEST_CASE("argmax_decode picks max with low-index tie-break") {
    const Dims d{1, 1, 1};
    CHECK(argmax_decode(ProbabilityMap(4, d, {}, {0.1, 0.7, 0.1, 0.1})).labels[0] == 1);
    CHECK(argmax_decode(ProbabilityMap(4, d, {}, {0.5, 0.5, 0.0, 0.0})).labels[0] == 0);
    const ProbabilityMap uniform(4, Dims{2, 2, 1}, {}, std::vector<double>(16, 0.25));
    for (auto l : argmax_decode(uniform).labels) CHECK(l == 0);
  }

  TEST_CASE("one_hot basics and round trip") {
    const SegmentationMask m(Dims{2, 1, 1}, {}, {0, 1}, 2);
    const ProbabilityMap p = one_hot(m, 2);
    CHECK(p.at(0, 0, 0, 0) == 1.0);
    CHECK(p.at(1, 0, 0, 0) == 0.0);
    CHECK(p.at(0, 1, 0, 0) == 0.0);
    CHECK(p.at(1, 1, 0, 0) == 1.0);

    CHECK_THROWS_AS(one_hot(SegmentationMask(Dims{1, 1, 1}, {}, {3}), 3), ValidationError);

    Rng rng(3);
    const SegmentationMask random = test::random_mask(Dims{5, 4, 3}, rng);
    const SegmentationMask round = argmax_decode(one_hot(random, kNumClasses));
    CHECK(round.labels == random.labels);
  }

  TEST_CASE("probability map enforces the simplex constraint") {
    CHECK_THROWS_AS(ProbabilityMap(2, Dims{1, 1, 1}, {}, {0.7, 0.4}), ValidationError);
    CHECK_THROWS_AS(ProbabilityMap(2, Dims{1, 1, 1}, {}, {1.2, -0.2}), ValidationError);
    CHECK_NOTHROW(ProbabilityMap(2, Dims{1, 1, 1}, {}, {0.3, 0.7}));
  }

  TEST_CASE("case records validate vendor/centre pairings") {
    CHECK_NOTHROW(validate_case({"c1", Vendor::A, 1, true, true, true}));
    CHECK_NOTHROW(validate_case({"c2", Vendor::A, 6, true, true, true}));
    CHECK_NOTHROW(validate_case({"c3", Vendor::D, 5, false, true, true}));
    CHECK_THROWS_AS(validate_case({"c4", Vendor::A, 2, true, true, true}), ValidationError);
    CHECK_THROWS_AS(validate_case({"c5", Vendor::C, 5, false, true, true}), ValidationError);
    CHECK_THROWS_AS(validate_case({"c6", Vendor::B, 2, true, false, false}), ValidationError);
  }

  TEST_CASE("anisotropy rule") {
    CHECK(in_plane_only(Spacing{1.4, 1.4, 10.0}, 12));
    CHECK_FALSE(in_plane_only(Spacing{1, 1, 1}, 12));
    CHECK(in_plane_only(Spacing{1, 1, 1}, 1));          // single slice
    CHECK_FALSE(in_plane_only(Spacing{1, 1, 2.9}, 12));  // below default threshold
  }
}

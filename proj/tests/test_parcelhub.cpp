#include <doctest.h>

#include <algorithm>

#include "crowdhub/error.hpp"
#include "crowdhub/parcelhub.hpp"
#include "support.hpp"

using namespace crowdhub;

TEST_CASE("nearest-hub assignment") {
    const Instance line = testing::line_instance({0, 1, 2, 3, 4});
    const std::vector<int> demand{3, 1, 4, 1, 5};

    SUBCASE("one open hub takes everything") {
        const std::vector<RegionId> hubs{2};
        const auto a = assign_nearest(line, hubs, demand);
        for (std::size_t r = 0; r < 5; ++r) CHECK(a(r, 0) == demand[r]);
    }
    SUBCASE("hubs at both ends split at the midpoint, tie to the lower hub") {
        const std::vector<RegionId> hubs{4, 0};
        const auto a = assign_nearest(line, hubs, demand);
        CHECK(a.hubs == std::vector<RegionId>{0, 4});
        const std::vector<int> to_first{3, 1, 4, 0, 0};
        for (std::size_t r = 0; r < 5; ++r) {
            CHECK(a(r, 0) == to_first[r]);
            CHECK(a.row_sum(r) == demand[r]);
        }
    }
    SUBCASE("input errors") {
        const std::vector<RegionId> none;
        CHECK_THROWS_AS(assign_nearest(line, none, demand), ValidationError);
        const std::vector<int> short_demand{1, 2};
        const std::vector<RegionId> hubs{0};
        CHECK_THROWS_AS(assign_nearest(line, hubs, short_demand), ValidationError);
    }
}

TEST_CASE("CA-proportional assignment") {
    const Instance line = testing::line_instance({0, 1, 2});
    const std::vector<RegionId> hubs{0, 2};

    SUBCASE("proportional rows") {
        const std::vector<int> demand{4, 4, 5};
        const std::vector<std::vector<double>> z{{2, 3, 0}, {2, 1, 0}};
        const auto a = assign_ca(line, hubs, demand, z, 1.0);
        CHECK(a(0, 0) == 2);
        CHECK(a(0, 1) == 2);
        CHECK(a(1, 0) == 3);
        CHECK(a(1, 1) == 1);
        // All-zero row: region 2 is nearest to hub 2.
        CHECK(a(2, 0) == 0);
        CHECK(a(2, 1) == 5);
    }
    SUBCASE("odd split rounds by largest remainder") {
        const std::vector<int> demand{0, 5, 0};
        const std::vector<std::vector<double>> z{{0, 1, 0}, {0, 1, 0}};
        const auto a = assign_ca(line, hubs, demand, z, 1.0);
        CHECK(a(1, 0) == 3);  // tie in remainders goes to the lower hub
        CHECK(a(1, 1) == 2);
    }
    SUBCASE("dimension checks") {
        const std::vector<int> demand{1, 1, 1};
        const std::vector<std::vector<double>> one_row{{1, 1, 1}};
        CHECK_THROWS_AS(assign_ca(line, hubs, demand, one_row, 1.0), ValidationError);
        const std::vector<std::vector<double>> z{{1, 1, 1}, {1, 1, 1}};
        CHECK_THROWS_AS(assign_ca(line, hubs, demand, z, -1.0), ValidationError);
    }
}

TEST_CASE("gamma limits and conservation on random rows") {
    Rng rng(41);
    const Instance inst = testing::random_instance(rng, 8);
    const std::vector<RegionId> hubs{1, 3, 5, 6};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> demand(8);
        for (auto& d : demand) d = static_cast<int>(rng.below(40));
        std::vector<std::vector<double>> z(4, std::vector<double>(8));
        for (auto& row : z)
            for (auto& v : row) v = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.1, 30.0);

        const auto sharp = assign_ca(inst, hubs, demand, z, 50.0);
        const auto flat = assign_ca(inst, hubs, demand, z, 0.0);
        const auto linear = assign_ca(inst, hubs, demand, z, 1.0);
        for (std::size_t r = 0; r < 8; ++r) {
            CHECK(sharp.row_sum(r) == demand[r]);
            CHECK(flat.row_sum(r) == demand[r]);
            CHECK(linear.row_sum(r) == demand[r]);
            std::size_t best = 0, positive = 0;
            for (std::size_t k = 0; k < 4; ++k) {
                if (z[k][r] > z[best][r]) best = k;
                positive += z[k][r] > 0.0;
            }
            if (positive == 0) continue;
            // A runner-up at <= 0.8 of the best keeps 0.8^50 ~ 1e-5 of the
            // weight, far below half a parcel.
            bool separated = true;
            for (std::size_t k = 0; k < 4; ++k)
                if (k != best && z[k][r] > 0.8 * z[best][r]) separated = false;
            if (separated) CHECK(sharp(r, best) == demand[r]);
            CHECK(sharp(r, best) >= linear(r, best));
            for (std::size_t k = 0; k < 4; ++k) {
                if (z[k][r] == 0.0) {
                    CHECK(flat(r, k) == 0);
                    continue;
                }
                const int even = demand[r] / static_cast<int>(positive);
                CHECK(flat(r, k) >= even);
                CHECK(flat(r, k) <= even + 1);
                // Linear shares stay within one parcel of the exact proportion.
                double total = 0.0;
                for (std::size_t m = 0; m < 4; ++m) total += z[m][r];
                CHECK(std::abs(linear(r, k) - demand[r] * z[k][r] / total) < 1.0);
            }
        }
    }
}

TEST_CASE("single-hub z matches independent estimates") {
    Rng rng(42);
    Instance inst = testing::random_instance(rng, 6, 3.0);
    inst.hub_candidates = {4, 1, 4, 2};
    const auto tensor = FeasibilityTensor::build(inst, 500.0);
    const std::vector<HubSlot> open{2, 0, 1};
    const auto z = single_hub_z(inst, tensor, open);
    REQUIRE(z.size() == 2);  // regions 1 and 4
    CHECK(z[0] == estimate(inst, tensor, OpenHubMask::of(4, std::vector<HubSlot>{1})).z);
    CHECK(z[1] == estimate(inst, tensor, OpenHubMask::of(4, std::vector<HubSlot>{0})).z);
}

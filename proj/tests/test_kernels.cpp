#include <doctest.h>

#include <cmath>
#include <vector>

#include "crowdhub/ca.hpp"
#include "crowdhub/feasibility.hpp"
#include "crowdhub/kernels.hpp"
#include "crowdhub/rng.hpp"
#include "support.hpp"

using namespace crowdhub;
using kernels::Word;

namespace {

std::vector<const kernels::KernelTable*> vector_tables() {
    std::vector<const kernels::KernelTable*> out;
    if (auto* t = kernels::avx2_kernels()) out.push_back(t);
    return out;
}

std::vector<Word> random_bits(Rng& rng, std::size_t n, double density) {
    std::vector<Word> bits(kernels::words_for(n), 0);
    for (std::size_t r = 0; r < n; ++r)
        if (rng.uniform() < density) bits[r / 64] |= Word{1} << (r % 64);
    return bits;
}

}  // namespace

TEST_CASE("threshold mask agrees bit-exactly with the scalar reference") {
    const auto& ref = kernels::scalar_kernels();
    Rng rng(11);
    for (const auto* vec : vector_tables()) {
        for (std::size_t n : {1u, 3u, 4u, 5u, 63u, 64u, 65u, 90u, 130u}) {
            for (int trial = 0; trial < 50; ++trial) {
                std::vector<double> via(n), tail(n);
                // Integer-valued distances make exact ties with the limit common.
                for (auto& v : via) v = std::floor(rng.uniform(0, 40));
                for (auto& v : tail) v = std::floor(rng.uniform(0, 40));
                const double lead = std::floor(rng.uniform(0, 40)), base = std::floor(rng.uniform(0, 60));
                const double limit = std::floor(rng.uniform(0, 50));
                std::vector<Word> a(kernels::words_for(n), ~Word{0}), b(kernels::words_for(n), ~Word{0});
                ref.threshold_mask(lead, via.data(), tail.data(), base, limit, n, a.data());
                vec->threshold_mask(lead, via.data(), tail.data(), base, limit, n, b.data());
                CHECK(a == b);
            }
        }
    }
}

TEST_CASE("bitset OR agrees with the scalar reference") {
    const auto& ref = kernels::scalar_kernels();
    Rng rng(12);
    for (const auto* vec : vector_tables()) {
        for (std::size_t words : {1u, 3u, 4u, 7u, 128u}) {
            std::vector<Word> src(words), a(words), b;
            for (auto& w : src) w = rng.next();
            for (auto& w : a) w = rng.next();
            b = a;
            ref.or_into(a.data(), src.data(), words);
            vec->or_into(b.data(), src.data(), words);
            CHECK(a == b);
        }
    }
}

TEST_CASE("masked reductions agree with the scalar reference") {
    const auto& ref = kernels::scalar_kernels();
    Rng rng(13);
    for (const auto* vec : vector_tables()) {
        for (std::size_t n : {1u, 4u, 7u, 64u, 65u, 90u, 200u}) {
            for (double density : {0.0, 0.1, 0.5, 1.0}) {
                const auto bits = random_bits(rng, n, density);
                std::vector<double> values(n);
                for (auto& v : values) v = rng.uniform(0, 100);
                const double s_ref = ref.masked_sum(bits.data(), values.data(), n);
                const double s_vec = vec->masked_sum(bits.data(), values.data(), n);
                CHECK(s_vec == doctest::Approx(s_ref).epsilon(1e-12));

                std::vector<double> acc_ref(n), acc_vec;
                for (auto& v : acc_ref) v = rng.uniform(0, 5);
                acc_vec = acc_ref;
                ref.masked_add(bits.data(), 0.37, acc_ref.data(), n);
                vec->masked_add(bits.data(), 0.37, acc_vec.data(), n);
                CHECK(acc_ref == acc_vec);  // element-wise, so exact
            }
        }
    }
}

TEST_CASE("tensor, aggregation and CA agree across kernel tables") {
    Rng rng(14);
    for (const auto* vec : vector_tables()) {
        for (int trial = 0; trial < 5; ++trial) {
            const Instance inst = testing::random_instance(rng, 10 + 7 * trial, 3.0);
            const auto t_ref = FeasibilityTensor::build(inst, 600.0, kernels::scalar_kernels());
            const auto t_vec = FeasibilityTensor::build(inst, 600.0, *vec);
            CHECK(t_ref == t_vec);
            const auto open = OpenHubMask::of(inst.hub_candidates.size(), std::vector<HubSlot>{0, 2, 5});
            const auto agg_ref = aggregate(t_ref, open, kernels::scalar_kernels());
            CHECK(agg_ref == aggregate(t_vec, open, *vec));
            const auto e_ref = estimate(inst, agg_ref, {}, kernels::scalar_kernels());
            const auto e_vec = estimate(inst, agg_ref, {}, *vec);
            CHECK(e_ref.iterations_used == e_vec.iterations_used);
            for (std::size_t r = 0; r < inst.n_regions; ++r) CHECK(e_vec.z[r] == doctest::Approx(e_ref.z[r]).epsilon(1e-9));
        }
    }
}

TEST_CASE("runtime selection can be pinned") {
    const auto before = kernels::active().isa;
    CHECK(kernels::force_isa(kernels::Isa::Scalar));
    CHECK(kernels::active().isa == kernels::Isa::Scalar);
    if (kernels::avx2_kernels()) {
        CHECK(kernels::force_isa(kernels::Isa::Avx2));
        CHECK(kernels::active().isa == kernels::Isa::Avx2);
    } else {
        CHECK_FALSE(kernels::force_isa(kernels::Isa::Avx2));
    }
    kernels::force_isa(before);
}

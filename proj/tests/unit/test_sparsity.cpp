#include <doctest.h>

#include <random>

#include "netcg/errors.hpp"
#include "netcg/sparsity.hpp"
#include "support/oracles.hpp"

using namespace netcg;

namespace {

std::vector<SupportSet> supports(std::size_t m, std::vector<std::vector<std::size_t>> lists) {
    std::vector<SupportSet> out;
    for (auto& l : lists) out.emplace_back(m, std::move(l));
    return out;
}

}  // namespace

TEST_CASE("support set validation") {
    CHECK(SupportSet(4, {0, 2}).contains(2));
    CHECK_FALSE(SupportSet(4, {0, 2}).contains(1));
    CHECK_THROWS_AS(SupportSet(3, {1, 0}), InvalidArgument);
    CHECK_THROWS_AS(SupportSet(3, {1, 1}), InvalidArgument);
    CHECK_THROWS_AS(SupportSet(3, {3}), InvalidArgument);
}

TEST_CASE("support_of examples") {
    const Matrix s{{1, 0, 0}, {0, 0, 0}, {0, 0, 2}};
    CHECK(support_of(s, Vector{0, 0, 0}).indices() == std::vector<std::size_t>{0, 2});
    CHECK(support_of(s, Vector{0, 5, 0}).indices() == std::vector<std::size_t>{0, 1, 2});
    const Matrix off{{0, 1}, {1, 0}};
    CHECK(support_of(off, Vector{0, 0}).indices() == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(support_of(Matrix(2, 2), Vector{0, 0}), EmptySupport);
    CHECK(support_of(Matrix{{1e-20, 0}, {0, 1}}, Vector{0, 0}, 1e-15).indices() ==
          std::vector<std::size_t>{1});
}

TEST_CASE("project and lift") {
    const Projector p(SupportSet(4, {1, 3}));
    CHECK(p.project(Vector{10, 11, 12, 13}) == Vector{11, 13});
    CHECK(p.lift(Vector{7, 8}) == Vector{0, 7, 0, 8});
    Vector acc{1, 1, 1, 1};
    p.lift_add(Vector{7, 8}, acc);
    CHECK(acc == Vector{1, 8, 1, 9});

    Matrix full(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) full(i, j) = double(10 * i + j);
    const Matrix c = p.compress(full);
    CHECK(c == Matrix{{11, 13}, {31, 33}});
    const Matrix e = p.expand(c);
    CHECK(e(1, 3) == 13);
    CHECK(e(0, 0) == 0);
    CHECK_THROWS_AS(p.project(Vector{1, 2}), DimensionMismatch);
}

TEST_CASE("projector agrees with the dense selector") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + trial % 12;
        std::vector<std::size_t> idx;
        for (std::size_t c = 0; c < m; ++c)
            if (gen() % 2) idx.push_back(c);
        if (idx.empty()) idx.push_back(gen() % m);
        const SupportSet sup(m, idx);
        const Projector p(sup);
        const Matrix sel = oracle::selector(sup);
        Vector x(m);
        for (double& v : x) v = double(gen() % 100);
        CHECK(p.project(x) == oracle::dense_apply(sel, x));
        const Vector xc = p.project(x);
        CHECK(p.lift(xc) == oracle::dense_apply(oracle::transposed(sel), xc));
    }
}

TEST_CASE("multiplicity examples") {
    const auto chain = supports(3, {{0, 1}, {1, 2}});
    const Multiplicity m = multiplicity(chain);
    CHECK(m.global_diag == std::vector<int>{1, 2, 1});
    CHECK(m.per_agent[0] == std::vector<int>{1, 2});
    CHECK(m.per_agent[1] == std::vector<int>{2, 1});
    CHECK(m.inverse_weights(1) == Vector{0.5, 1.0});

    const auto disjoint = supports(3, {{0}, {1}, {2}});
    CHECK(multiplicity(disjoint).global_diag == std::vector<int>{1, 1, 1});

    const auto all = supports(2, {{0, 1}, {0, 1}, {0, 1}});
    CHECK(multiplicity(all).global_diag == std::vector<int>{3, 3});

    CHECK_THROWS_AS(multiplicity(supports(3, {{0}, {2}})), UncoveredIndex);
    try {
        multiplicity(supports(3, {{0}, {2}}));
    } catch (const UncoveredIndex& e) {
        CHECK(e.index() == 1);
    }
}

TEST_CASE("overlap examples") {
    const auto chain = supports(3, {{0, 1}, {1, 2}});
    const OverlapTable t = overlap(chain);
    using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;
    CHECK(t.between(0, 1).pairs == Pairs{{1, 0}});
    CHECK(t.between(1, 0).pairs == Pairs{{0, 1}});
    CHECK(t.neighbor_ids(0) == std::vector<std::size_t>{0, 1});

    const auto disjoint = supports(2, {{0}, {1}});
    const OverlapTable d = overlap(disjoint);
    CHECK(d.between(0, 1).empty());
    CHECK(d.neighbor_ids(0) == std::vector<std::size_t>{0});

    const auto same = supports(2, {{0, 1}, {0, 1}});
    CHECK(overlap(same).between(0, 1).pairs == Pairs{{0, 0}, {1, 1}});
}

TEST_CASE("overlap is symmetric and matches selector products") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 40; ++trial) {
        const NetworkProblem p = oracle::random_pattern(gen, 10, 6);
        const Partition& part = p.partition();
        for (std::size_t i = 0; i < part.agent_count(); ++i) {
            for (std::size_t j = 0; j < part.agent_count(); ++j) {
                const auto& a = part.overlaps.between(i, j).pairs;
                const auto& b = part.overlaps.between(j, i).pairs;
                REQUIRE(a.size() == b.size());
                for (std::size_t k = 0; k < a.size(); ++k) {
                    CHECK(a[k].first == b[k].second);
                    CHECK(a[k].second == b[k].first);
                }
                const Matrix pij = oracle::dense_product(
                    oracle::selector(part.supports[i]),
                    oracle::transposed(oracle::selector(part.supports[j])));
                Vector xj(part.supports[j].size());
                for (double& v : xj) v = double(gen() % 50);
                Vector out(part.supports[i].size(), 0.0);
                part.overlaps.accumulate(i, j, xj, out);
                CHECK(out == oracle::dense_apply(pij, xj));
            }
        }
    }
}

TEST_CASE("partition first owner") {
    const Partition part(supports(3, {{0, 1}, {1, 2}}));
    CHECK(part.global_dim() == 3);
    using P = std::pair<std::size_t, std::size_t>;
    CHECK(part.first_owner == std::vector<P>{{0, 0}, {0, 1}, {1, 1}});
}

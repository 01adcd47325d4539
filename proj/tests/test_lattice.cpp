#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "ymh/lattice.hpp"

using namespace ymh;

TEST_CASE("lattice counts") {
    Lattice l24(2, 4);
    CHECK(l24.site_count() == 16);
    CHECK(l24.edge_count() == 32);
    CHECK(l24.plaquette_count() == 16);

    Lattice l32(3, 2);
    CHECK(l32.site_count() == 8);
    CHECK(l32.edge_count() == 24);
    CHECK(l32.plaquette_count() == 24);

    CHECK_THROWS_AS(Lattice(1, 4), InvalidArgument);
    CHECK_THROWS_AS(Lattice(2, 1), InvalidArgument);
}

TEST_CASE("plaquettes are closed length-4 paths with canonical base") {
    for (auto [d, L] : {std::pair{2, 4}, std::pair{3, 3}, std::pair{2, 2}}) {
        Lattice lat(d, L);
        for (const auto& p : lat.plaquettes()) {
            for (int i = 0; i < 4; ++i)
                CHECK(lat.edge_to(p.edges[i]) == lat.edge_from(p.edges[(i + 1) % 4]));
            // first edge starts at the canonical cell origin, the
            // coordinate-wise smallest corner of the (unwrapped) square
            CHECK_FALSE(p.edges[0].reversed);
        }
    }
}

TEST_CASE("plaquettes_through") {
    Lattice l2(2, 4);
    DirectedEdge e{l2.site_index({1, 2}), 0, false};
    auto ps = l2.plaquettes_through(e);
    REQUIRE(ps.size() == 2);
    for (const auto& p : ps) CHECK(p.edges[0] == e);

    Lattice l3(3, 3);
    DirectedEdge e3{l3.site_index({0, 1, 2}), 1, true};
    auto ps3 = l3.plaquettes_through(e3);
    REQUIRE(ps3.size() == 4);
    std::set<std::multiset<std::int64_t>> edge_sets;
    for (const auto& p : ps3) {
        CHECK(p.edges[0] == e3);
        for (int i = 0; i < 4; ++i)
            CHECK(l3.edge_to(p.edges[i]) == l3.edge_from(p.edges[(i + 1) % 4]));
        std::multiset<std::int64_t> ids;
        for (const auto& pe : p.edges)
            ids.insert(l3.positive_index(pe) * 2 + (pe.reversed ? 1 : 0));
        edge_sets.insert(ids);
    }
    CHECK(edge_sets.size() == 4);  // distinct as edge multisets

    DirectedEdge foreign{static_cast<Site>(l3.site_count()), 0, false};
    CHECK_THROWS_AS(l3.plaquettes_through(foreign), InvalidArgument);

    // L = 2 wraps hard: the two squares through an edge still differ as
    // directed-edge multisets (the torus has doubled edges between
    // neighbouring sites)
    Lattice l22(2, 2);
    auto ps22 = l22.plaquettes_through(DirectedEdge{0, 0, false});
    REQUIRE(ps22.size() == 2);
    std::set<std::multiset<std::int64_t>> sets22;
    for (const auto& p : ps22) {
        std::multiset<std::int64_t> ids;
        for (const auto& pe : p.edges)
            ids.insert(l22.positive_index(pe) * 2 + (pe.reversed ? 1 : 0));
        sets22.insert(ids);
    }
    CHECK(sets22.size() == 2);
}

TEST_CASE("each positive edge lies in 2(d-1) plaquettes of the canonical set") {
    for (auto [d, L] : {std::pair{2, 2}, std::pair{2, 4}, std::pair{3, 2}}) {
        Lattice lat(d, L);
        std::map<std::int64_t, int> count;
        for (const auto& p : lat.plaquettes())
            for (const auto& e : p.edges) count[lat.positive_index(e)]++;
        for (std::int64_t ei = 0; ei < lat.edge_count(); ++ei)
            CHECK(count[ei] == 2 * (d - 1));
    }
}

TEST_CASE("edges_at") {
    Lattice l2(2, 4);
    auto es = l2.edges_at(l2.site_index({3, 1}));
    REQUIRE(es.size() == 4);
    for (const auto& e : es) CHECK(l2.edge_from(e) == l2.site_index({3, 1}));

    Lattice l3(3, 2);
    CHECK(l3.edges_at(0).size() == 6);

    // union over all sites covers each undirected edge exactly twice
    std::map<std::int64_t, int> cover;
    for (Site x = 0; x < l2.site_count(); ++x)
        for (const auto& e : l2.edges_at(x)) cover[l2.positive_index(e)]++;
    for (std::int64_t ei = 0; ei < l2.edge_count(); ++ei) CHECK(cover[ei] == 2);
}

TEST_CASE("edge reversal involution") {
    Lattice lat(3, 3);
    for (std::int64_t ei = 0; ei < lat.edge_count(); ++ei) {
        DirectedEdge e = lat.positive_edge(ei);
        CHECK(Lattice::reversed(Lattice::reversed(e)) == e);
        CHECK(lat.edge_from(Lattice::reversed(e)) == lat.edge_to(e));
        CHECK(lat.edge_to(Lattice::reversed(e)) == lat.edge_from(e));
    }
}

TEST_CASE("torus distance") {
    Lattice lat(2, 8);
    const Site a = lat.site_index({0, 0});
    CHECK(lat.torus_distance(a, a) == 0);
    CHECK(lat.torus_distance(a, lat.site_index({7, 0})) == 1);
    CHECK(lat.torus_distance(a, lat.site_index({3, 6})) == 5);

    // opposite plaquettes: support distance via min over vertex pairs
    const auto& plqs = lat.plaquettes();
    const Plaquette* p0 = nullptr;
    const Plaquette* p1 = nullptr;
    for (const auto& p : plqs) {
        const Site base = lat.edge_from(p.edges[0]);
        if (base == lat.site_index({0, 0})) p0 = &p;
        if (base == lat.site_index({4, 0})) p1 = &p;
    }
    REQUIRE(p0 != nullptr);
    REQUIRE(p1 != nullptr);
    CHECK(lat.torus_distance(lat.plaquette_sites(*p0), lat.plaquette_sites(*p1)) == 3);

    CHECK_THROWS_AS(lat.torus_distance(std::vector<Site>{}, std::vector<Site>{a}),
                    InvalidArgument);

    // symmetry and brute-force agreement on random site pairs
    for (Site x = 0; x < lat.site_count(); x += 7)
        for (Site y = 0; y < lat.site_count(); y += 5)
            CHECK(lat.torus_distance(x, y) == lat.torus_distance(y, x));
}

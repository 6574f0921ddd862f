import random

import pytest
from hypothesis import given, settings, strategies as st

from fforge import (
    PlanarMap,
    EdgeRef,
    TruncationSite,
    build_dodecahedron,
    enumerate_sites,
    is_flag,
    p_vector,
    straighten,
    truncate,
)
from fforge.transform import (
    InvalidSiteError,
    SimplexInputError,
    ThreeBeltObstructionError,
    side_face_sizes,
)

import helpers

TETRA_ROT = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]


def all_sites(m: PlanarMap):
    out = []
    for f, cyc in enumerate(m.faces):
        k = len(cyc)
        for d in cyc:
            for s in range(0, k - 1):
                out.append(TruncationSite(f, d, s))
    return out


class TestTruncate:
    def test_vertex_cut_tetrahedron(self):
        k4 = PlanarMap.from_rotation(TETRA_ROT)
        res = truncate(k4, TruncationSite(k4.face_of[0], 0, 0))
        pv = p_vector(res.map)
        assert res.map.num_vertices == 6
        assert res.map.face_sizes[res.new_face] == 3
        assert dict(pv.items()) == {3: 2, 4: 3}

    def test_edge_cut_dodecahedron(self, dodeca):
        sites = enumerate_sites(dodeca, s=1, m1=5, m2=5)
        assert len(sites) == 30
        res = truncate(dodeca, sites[0])
        assert dict(p_vector(res.map).items()) == {4: 1, 5: 10, 6: 2}

    def test_endo_kroto_grows_one_hexagon(self, oracle5):
        grown = 0
        for e in oracle5.entries.values():
            for site in enumerate_sites(e.map, s=2, k=6, m1=5, m2=5):
                out = truncate(e.map, site).map
                pv = p_vector(out)
                assert pv.is_fullerene()
                assert pv[6] == e.p6 + 1
                grown += 1
        assert grown > 0

    def test_counts_always_shift_by_two_and_three(self, family_maps):
        for m in family_maps[::4]:
            for site in all_sites(m)[::7]:
                out = truncate(m, site).map
                assert out.num_vertices == m.num_vertices + 2
                assert out.num_edges == m.num_edges + 3

    def test_site_validation(self, dodeca):
        with pytest.raises(InvalidSiteError):
            truncate(dodeca, TruncationSite(dodeca.face_of[0], 0, 4))
        wrong_face = (dodeca.face_of[0] + 1) % dodeca.num_faces
        with pytest.raises(InvalidSiteError):
            truncate(dodeca, TruncationSite(wrong_face, 0, 1))


class TestStraighten:
    def test_simplex_has_no_straightening(self):
        k4 = PlanarMap.from_rotation(TETRA_ROT)
        with pytest.raises(SimplexInputError):
            straighten(k4, EdgeRef(0))

    def test_every_fullerene_edge_straightens(self, oracle5):
        for e in list(oracle5.entries.values())[:4]:
            m = e.map
            for d in m.edges:
                out = straighten(m, EdgeRef(d)).map
                assert out.num_faces == m.num_faces - 1

    def test_three_belt_obstruction(self):
        cube = helpers.cube_map()
        tc = truncate(cube, TruncationSite(cube.face_of[0], 0, 0)).map
        belt = None
        from fforge import find_belts

        belts = find_belts(tc, 3)
        assert len(belts) == 1
        belt = set(belts[0].faces)
        hit = 0
        for d in tc.edges:
            fp, fq = tc.face_of[d], tc.face_of[tc.twin(d)]
            if fp in belt and fq in belt:
                with pytest.raises(ThreeBeltObstructionError) as err:
                    straighten(tc, EdgeRef(d))
                assert err.value.third_face in belt - {fp, fq}
                hit += 1
        assert hit == 3

    def test_round_trip_examples(self, dodeca):
        for site in all_sites(dodeca)[::5]:
            res = truncate(dodeca, site)
            back = straighten(res.map, res.new_edge)
            assert back.map.canonical_code() == dodeca.canonical_code()
            # the recorded inverse site regenerates the truncation
            redo = truncate(back.map, back.inverse_site).map
            assert redo.canonical_code() == res.map.canonical_code()

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_round_trip_property(self, family_maps, data):
        m = data.draw(st.sampled_from(family_maps))
        site = data.draw(st.sampled_from(all_sites(m)))
        res = truncate(m, site)
        back = straighten(res.map, res.new_edge)
        assert back.map.canonical_code() == m.canonical_code()


class TestEnumerateSites:
    def test_no_hexagon_runs_on_dodecahedron(self, dodeca):
        assert enumerate_sites(dodeca, s=2, k=6) == []

    def test_every_edge_matches_all_pentagon_pattern(self, dodeca):
        assert len(enumerate_sites(dodeca, s=1, m1=5, m2=5)) == 30

    def test_ipr_fullerene_has_no_adjacent_pentagon_runs(self, c60):
        assert enumerate_sites(c60, s=2, k=6, m1=5, m2=5) == []

    def test_unordered_side_matching(self, oracle5):
        m = next(e.map for e in oracle5.entries.values() if e.p6 == 2)
        a = {(s.face, s.start_dart) for s in enumerate_sites(m, s=2, k=6, m1=5, m2=6)}
        b = {(s.face, s.start_dart) for s in enumerate_sites(m, s=2, k=6, m1=6, m2=5)}
        assert a == b

    def test_signature_agrees_with_side_sizes(self, family_maps):
        for m in family_maps[::5]:
            for site in enumerate_sites(m, s=2)[::3]:
                s, k, m1, m2 = site.signature(m)
                assert s == 2 and k == m.face_sizes[site.face]
                assert sorted(side_face_sizes(m, site)) == [m1, m2]


class TestFlagTransitions:
    def test_interior_runs_preserve_flagness(self, oracle5):
        checked = 0
        for e in list(oracle5.entries.values())[:4]:
            m = e.map
            for site in all_sites(m):
                k = m.face_sizes[site.face]
                if 0 < site.s < k - 2:
                    assert is_flag(truncate(m, site).map)
                    checked += 1
                if checked >= 60:
                    return
        assert checked

    def test_boundary_runs_break_flagness(self, dodeca):
        from fforge import find_belts

        for site in all_sites(dodeca):
            k = dodeca.face_sizes[site.face]
            if site.s in (0, k - 2):
                out = truncate(dodeca, site).map
                assert not is_flag(out)
                assert len(find_belts(out, 3)) >= 1
                break

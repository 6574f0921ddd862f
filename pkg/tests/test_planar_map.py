import random

import pytest
from hypothesis import given, settings, strategies as st

from fforge import (
    PlanarMap,
    build_dodecahedron,
    check_polytopal,
    decode_planar_code,
    encode_planar_code,
    p_vector,
)
from fforge.planar_map import (
    AsymmetricError,
    DisconnectedError,
    NonCubicError,
    NonSphericalError,
    TruncatedRecordError,
    VertexOverflowError,
)

import helpers

TETRA_ROT = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]


def relabeled(m: PlanarMap, seed: int) -> PlanarMap:
    perm = list(range(m.num_vertices))
    random.Random(seed).shuffle(perm)
    rot = [None] * m.num_vertices
    for v in range(m.num_vertices):
        rot[perm[v]] = [perm[u] for u in m.neighbors(v)]
    return PlanarMap.from_rotation(rot)


class TestConstruction:
    def test_dodecahedron_counts(self, dodeca):
        assert (dodeca.num_vertices, dodeca.num_edges, dodeca.num_faces) == (20, 30, 12)

    def test_tetrahedron(self):
        k4 = PlanarMap.from_rotation(TETRA_ROT)
        assert k4.num_faces == 4
        assert all(s == 3 for s in k4.face_sizes)

    def test_non_cubic_rejected(self):
        with pytest.raises(NonCubicError):
            PlanarMap.from_rotation([[1, 2, 3, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]])

    def test_asymmetric_rejected(self):
        # prism rotation with one entry redirected: 5 lists 1, 1 does not list 5
        rot = [[1, 2, 3], [2, 0, 4], [0, 1, 5], [4, 5, 0], [5, 3, 1], [3, 4, 1]]
        with pytest.raises(AsymmetricError):
            PlanarMap.from_rotation(rot)

    def test_disconnected_rejected(self):
        rot = TETRA_ROT + [[n + 4 for n in row] for row in TETRA_ROT]
        with pytest.raises(DisconnectedError):
            PlanarMap.from_rotation(rot)

    def test_nonspherical_rejected(self):
        # K4 with one rotation flipped embeds on the torus, not the sphere
        rot = [row[:] for row in TETRA_ROT]
        rot[3] = list(reversed(rot[3]))
        with pytest.raises(NonSphericalError):
            PlanarMap.from_rotation(rot)


class TestPVector:
    def test_dodecahedron(self, dodeca):
        pv = p_vector(dodeca)
        assert dict(pv.items()) == {5: 12}
        assert pv.is_fullerene()

    def test_tetrahedron(self):
        assert dict(p_vector(PlanarMap.from_rotation(TETRA_ROT)).items()) == {3: 4}

    def test_curvature_identity(self, family_maps):
        for m in family_maps:
            assert p_vector(m).curvature_sum() == 12


class TestCanonicalCode:
    def test_relabeling_invariance(self, dodeca):
        code = dodeca.canonical_code()
        for seed in range(5):
            assert relabeled(dodeca, seed).canonical_code() == code

    def test_determinism_across_runs(self, dodeca):
        fresh = build_dodecahedron()
        assert fresh.canonical_code() == dodeca.canonical_code()
        assert fresh.canonical_code() == fresh.canonical_form()[0].canonical_code()

    def test_distinct_fullerenes_differ(self, oracle5):
        codes = oracle5.fullerene_codes()[4]
        assert len(codes) == 2
        maps = [oracle5.entries[c].map for c in codes]
        assert maps[0].canonical_code() != maps[1].canonical_code()
        assert not helpers.maps_isomorphic(maps[0], maps[1])

    def test_code_equality_matches_isomorphism(self, oracle5):
        maps = [e.map for e in oracle5.entries.values()]
        for i, a in enumerate(maps):
            for b in maps[i:]:
                same_code = a.canonical_code() == b.canonical_code()
                assert same_code == helpers.maps_isomorphic(a, b)

    def test_chiral_pair_codes(self, oracle5):
        """Mirror-sensitive codes split at least one chiral fullerene."""
        chiral = []
        for e in oracle5.entries.values():
            m = e.map
            mirror = PlanarMap.from_rotation(
                [list(reversed(m.neighbors(v))) for v in range(m.num_vertices)]
            )
            if m.canonical_code(include_reflection=False) != mirror.canonical_code(
                include_reflection=False
            ):
                chiral.append((m, mirror))
            assert m.canonical_code() == mirror.canonical_code()
        assert chiral, "no chiral fullerene with p6 <= 5"


class TestPolytopal:
    def test_examples(self, dodeca):
        assert check_polytopal(dodeca)
        assert check_polytopal(PlanarMap.from_rotation(TETRA_ROT))
        assert not check_polytopal(helpers.two_edge_connected_cubic())

    def test_matches_networkx(self, family_maps):
        sample = family_maps[::3] + [helpers.two_edge_connected_cubic()]
        for m in sample:
            assert check_polytopal(m) == helpers.nx_polytopal(m)


class TestPlanarCode:
    def test_round_trip(self, dodeca, oracle5):
        maps = [dodeca] + [e.map for e in oracle5.entries.values()][:5]
        blob = encode_planar_code(maps)
        back = decode_planar_code(blob)
        assert [m.canonical_code() for m in back] == [m.canonical_code() for m in maps]

    def test_empty_stream(self):
        assert decode_planar_code(b">>planar_code<<") == []

    def test_headerless_stream(self, dodeca):
        blob = encode_planar_code([dodeca], with_header=False)
        back = decode_planar_code(blob)
        assert back[0].canonical_code() == dodeca.canonical_code()

    def test_truncated_record(self):
        blob = encode_planar_code([PlanarMap.from_rotation(TETRA_ROT)])
        with pytest.raises(TruncatedRecordError):
            decode_planar_code(blob[:-3])

    def test_two_byte_escape_rejected(self):
        with pytest.raises(VertexOverflowError):
            decode_planar_code(b">>planar_code<<\x00\x01")

    def test_bad_header_rejected(self):
        from fforge.planar_map import MalformedHeaderError

        with pytest.raises(MalformedHeaderError):
            decode_planar_code(b">>planar_codex<<" + b"\x04")

    def test_oversized_map_rejected_on_encode(self):
        from fforge import build_D5k

        big = build_D5k(24)  # 260 vertices
        with pytest.raises(VertexOverflowError):
            encode_planar_code([big])

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 7), st.integers(2, 4))
    def test_round_trip_property(self, seed, count):
        from fforge import oracle_generate

        maps = [e.map for e in oracle_generate(3).entries.values()]
        rng = random.Random(seed)
        pick = [rng.choice(maps) for _ in range(count)]
        back = decode_planar_code(encode_planar_code(pick))
        assert sorted(m.canonical_code() for m in back) == sorted(
            m.canonical_code() for m in pick
        )


class TestCanonicalForm:
    def test_label_stability(self, oracle5):
        for e in list(oracle5.entries.values())[:4]:
            m = e.map
            again, _, _ = relabeled(m, 3).canonical_form()
            assert again == m

import json

import pytest

from fforge import (
    Regime,
    build_dodecahedron,
    decode_planar_code,
    encode_planar_code,
    p_vector,
    read_planar_code,
)
from fforge.engine import (
    BoundTooLargeError,
    EnumerationJob,
    cross_check,
    enumerate_closure,
    main,
    oracle_generate,
    _windup,
)
from fforge.planar_map import MapError

import helpers

# reference stream holding the coordinate-built dodecahedron and the
# hexagonal-barrel C24, serialized by hand from the documented record layout
FIXTURE_PLC = (
    b">>planar_code<<\x14\n\t\x0b\x00\x0c\n\x0e\x00\r\x0b\x0f\x00\x0e\r\x12\x00"
    b"\x11\t\x10\x00\x10\x0c\x14\x00\x13\x0f\x11\x00\x14\x12\x13\x00\x0f\x01\x05"
    b"\x00\x10\x01\x02\x00\x0e\x01\x03\x00\x06\x02\x12\x00\x04\x03\x13\x00\x04"
    b"\x02\x0b\x00\x07\x03\t\x00\x06\x05\n\x00\x07\x05\x14\x00\x0c\x04\x08\x00"
    b"\r\x07\x08\x00\x11\x06\x08\x00\x18\x06\x02\x07\x00\x01\x03\x08\x00\x02\x04"
    b"\t\x00\x03\x05\n\x00\x04\x06\x0b\x00\x05\x01\x0c\x00\x01\r\x12\x00\r\x02"
    b"\x0e\x00\x0e\x03\x0f\x00\x0f\x04\x10\x00\x10\x05\x11\x00\x11\x06\x12\x00"
    b"\x07\x08\x13\x00\x08\t\x14\x00\t\n\x15\x00\n\x0b\x16\x00\x0b\x0c\x17\x00"
    b"\x0c\x07\x18\x00\r\x14\x18\x00\x13\x0e\x15\x00\x14\x0f\x16\x00\x15\x10\x17"
    b"\x00\x16\x11\x18\x00\x17\x12\x13\x00"
)


class TestOracle:
    def test_frozen_counts(self, oracle5):
        assert oracle5.fullerene_counts() == [1, 0, 1, 1, 2, 3]

    def test_every_entry_is_a_fullerene(self, oracle5):
        for e in oracle5.entries.values():
            assert p_vector(e.map).is_fullerene()

    def test_smallest_and_missing_sizes(self):
        assert oracle_generate(0).fullerene_counts() == [1]
        assert oracle_generate(1).fullerene_counts() == [1, 0]

    def test_bound_guard(self):
        with pytest.raises(BoundTooLargeError):
            oracle_generate(31)

    def test_windup_determinism(self):
        sizes = [5] * 12
        a, b = _windup(sizes), _windup(sizes)
        assert a == b
        assert a.canonical_code() == build_dodecahedron().canonical_code()

    def test_windup_rejects_bad_sequences(self):
        assert _windup([5] * 11 + [6]) is None or not p_vector(_windup([5] * 11 + [6])).is_fullerene()

    def test_windup_never_returns_invalid_maps(self):
        import random

        rng = random.Random(5)
        # arbitrary garbage must fail cleanly, never crash
        for _ in range(200):
            nface = rng.randint(4, 16)
            sizes = [rng.choice([5, 6]) for _ in range(nface)]
            m = _windup(sizes)
            if m is not None:
                assert sorted(m.face_sizes) == sorted(sizes)
        # sphere-compatible pentagon placements sometimes close up
        produced = 0
        for _ in range(200):
            nface = rng.randint(12, 17)
            sizes = [6] * nface
            for i in rng.sample(range(nface), 12):
                sizes[i] = 5
            m = _windup(sizes)
            if m is not None:
                assert sorted(m.face_sizes) == sorted(sizes)
                produced += 1
        assert produced


class TestEnumerate:
    def test_base_case(self):
        gen = enumerate_closure(EnumerationJob(Regime.SEVEN, 0))
        assert gen.fullerene_counts() == [1]

    def test_no_single_hexagon_fullerene(self):
        for regime in Regime:
            gen = enumerate_closure(EnumerationJob(regime, 1))
            assert gen.fullerene_counts() == [1, 0]

    def test_all_regimes_match_oracle(self, oracle5, gen_seven, gen_a, gen_ab):
        buckets = []
        for gen in (gen_seven, gen_a, gen_ab):
            assert cross_check(gen, oracle5).clean
            assert gen.fullerene_counts() == [1, 0, 1, 1, 2, 3]
            buckets.append(gen.fullerene_codes())
        assert buckets[0] == buckets[1] == buckets[2]

    def test_agreement_extends_past_the_gate(self):
        oracle6 = oracle_generate(6)
        assert oracle6.fullerene_counts() == [1, 0, 1, 1, 2, 3, 6]
        for regime in Regime:
            gen = enumerate_closure(EnumerationJob(regime, 6))
            assert cross_check(gen, oracle6).clean

    def test_worker_count_does_not_change_output(self, gen_seven):
        par = enumerate_closure(EnumerationJob(Regime.SEVEN, 5, worker_count=4))
        assert sorted(par.entries) == sorted(gen_seven.entries)

    def test_exceptional_budgets(self, gen_seven):
        from fforge.structure import FamilyClass

        for e in gen_seven.entries.values():
            if e.cls is FamilyClass.F_MINUS1:
                assert e.p6 <= 6
            elif not e.cls.is_fullerene:
                assert e.p6 <= 5

    def test_reflection_flag_splits_chiral_classes(self, oracle5):
        chiral = oracle_generate(5, include_reflection=False)
        assert len(chiral.entries) >= len(oracle5.entries)
        total_with = sum(oracle5.fullerene_counts())
        total_without = sum(chiral.fullerene_counts())
        assert total_without > total_with  # some fullerene here is chiral


class TestCrossCheck:
    def test_self_diff_empty(self, oracle5):
        assert cross_check(oracle5, oracle5).clean

    def test_detects_single_missing_record(self, oracle5):
        import copy

        trimmed = copy.copy(oracle5)
        trimmed.entries = dict(oracle5.entries)
        victim = next(c for c, e in trimmed.entries.items() if e.p6 == 5)
        del trimmed.entries[victim]
        report = cross_check(oracle5, trimmed)
        assert not report.clean
        assert sum(len(v) for v in report.only_a.values()) == 1
        assert not report.only_b

    def test_bound_mismatch_rejected(self, oracle5):
        with pytest.raises(MapError):
            cross_check(oracle5, oracle_generate(2))


class TestInterop:
    def test_fixture_decodes_and_matches_oracle(self, oracle5):
        maps = decode_planar_code(FIXTURE_PLC)
        assert [m.num_vertices for m in maps] == [20, 24]
        codes = {m.canonical_code() for m in maps}
        dodeca_code = build_dodecahedron().canonical_code()
        assert dodeca_code in codes
        c24_bucket = oracle5.fullerene_codes()[2]
        assert len(c24_bucket) == 1
        assert c24_bucket[0] in codes

    def test_fixture_matches_independent_constructions(self):
        maps = decode_planar_code(FIXTURE_PLC)
        assert maps[1].canonical_code() == helpers.barrel_c24().canonical_code()

    def test_emitted_stream_reimports_identically(self, oracle5, tmp_path):
        maps = oracle5.sorted_fullerenes()
        path = tmp_path / "all.plc"
        path.write_bytes(encode_planar_code(maps))
        back = read_planar_code(path)
        assert sorted(m.canonical_code() for m in back) == sorted(
            m.canonical_code() for m in maps
        )


class TestCli:
    def test_gen_oracle_diff_round_trip(self, tmp_path, capsys):
        gen_path = tmp_path / "gen.plc"
        oracle_path = tmp_path / "oracle.plc"
        assert main(["gen", "--regime", "seven", "--max-hexagons", "3",
                     "--out", str(gen_path)]) == 0
        assert main(["oracle", "--max-hexagons", "3", "--out", str(oracle_path)]) == 0
        assert main(["diff", str(gen_path), str(oracle_path)]) == 0
        out = capsys.readouterr().out
        assert "agree" in out

    def test_gen_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a.plc", tmp_path / "b.plc"
        main(["gen", "--regime", "a", "--max-hexagons", "3", "--out", str(a)])
        main(["gen", "--regime", "a", "--max-hexagons", "3", "--out", str(b), "--workers", "3"])
        assert a.read_bytes() == b.read_bytes()

    def test_diff_detects_difference(self, tmp_path):
        a, b = tmp_path / "a.plc", tmp_path / "b.plc"
        main(["oracle", "--max-hexagons", "3", "--out", str(a)])
        main(["oracle", "--max-hexagons", "2", "--out", str(b)])
        assert main(["diff", str(a), str(b)]) == 1

    def test_reduce_and_validate(self, tmp_path, capsys):
        src = tmp_path / "f.plc"
        traces = tmp_path / "t.jsonl"
        main(["oracle", "--max-hexagons", "2", "--out", str(src)])
        assert main(["reduce", str(src), "--regime", "ab", "--traces", str(traces)]) == 0
        assert traces.read_text().strip()
        assert main(["validate", str(src)]) == 0
        lines = [json.loads(ln) for ln in capsys.readouterr().out.splitlines()
                 if ln.startswith("{")]
        assert all(rec["polytopal"] for rec in lines if "polytopal" in rec)

    def test_classify_belts_nanotube(self, tmp_path, capsys):
        src = tmp_path / "d5.plc"
        from fforge import build_D5k, write_planar_code

        write_planar_code(src, [build_D5k(2)])
        assert main(["classify", str(src)]) == 0
        assert main(["belts", str(src), "--k", "5"]) == 0
        assert main(["nanotube", str(src)]) == 0
        out = capsys.readouterr().out
        assert '"census": [12, 2]' in out
        assert '["D5", 2]' in out

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--regime", "bogus"])
        assert exc.value.code == 2

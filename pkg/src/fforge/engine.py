"""Isomorph-free enumeration, the independent spiral oracle, and the CLI.

The closure engine grows the dodecahedron breadth-first under a regime's
operations, deduplicating by canonical code; the oracle generates the same
fullerene universe by exhaustive face-spiral windup and shares nothing with
the growth machinery beyond the map kernel, so the two can referee each
other.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .planar_map import (
    MapError,
    PlanarMap,
    build_dodecahedron,
    check_polytopal,
    encode_planar_code,
    map_from_faces,
    p_vector,
    read_planar_code,
    write_planar_code,
)
from .structure import FamilyClass, classify_shape, find_belts, five_belt_census
from .growth import (
    DerivationTrace,
    GrowthStep,
    Regime,
    recognize_nanotube,
    reduce_to_dodecahedron,
    successor_candidates,
)


class BoundTooLargeError(MapError):
    """The spiral oracle is restricted to its proven-complete range."""


@dataclass(frozen=True)
class EnumerationJob:
    regime: Regime
    max_p6: int
    collect_traces: bool = False
    worker_count: int = 1
    include_reflection: bool = True

    def __post_init__(self):
        if self.max_p6 < 0:
            raise MapError("max_p6 must be nonnegative")
        if self.collect_traces and not self.include_reflection:
            raise MapError("traces are defined over the mirror-identifying equivalence")


@dataclass
class GeneratedEntry:
    map: PlanarMap
    cls: FamilyClass
    p6: int
    parent: Optional[bytes] = None
    step: Optional[GrowthStep] = None


@dataclass
class GeneratedSet:
    """Canonical-code-keyed store of generated maps, bucketed by class."""

    max_p6: int
    entries: dict[bytes, GeneratedEntry] = field(default_factory=dict)
    complete: bool = True

    def add(self, code: bytes, entry: GeneratedEntry) -> bool:
        if code in self.entries:
            return False
        self.entries[code] = entry
        return True

    def buckets(self) -> dict[tuple[str, int], list[bytes]]:
        out: dict[tuple[str, int], list[bytes]] = {}
        for code, e in self.entries.items():
            tag = "F" if e.cls.is_fullerene else e.cls.value
            out.setdefault((tag, e.p6), []).append(code)
        for v in out.values():
            v.sort()
        return out

    def fullerene_codes(self) -> dict[int, list[bytes]]:
        out: dict[int, list[bytes]] = {p6: [] for p6 in range(self.max_p6 + 1)}
        for code, e in self.entries.items():
            if e.cls.is_fullerene:
                out.setdefault(e.p6, []).append(code)
        for v in out.values():
            v.sort()
        return out

    def fullerene_counts(self) -> list[int]:
        codes = self.fullerene_codes()
        return [len(codes.get(p6, [])) for p6 in range(self.max_p6 + 1)]

    def sorted_fullerenes(self) -> list[PlanarMap]:
        keys = sorted(
            (c for c, e in self.entries.items() if e.cls.is_fullerene),
        )
        return [self.entries[c].map for c in keys]

    def trace_of(self, code: bytes, regime: Regime) -> DerivationTrace:
        steps: list[GrowthStep] = []
        cur = code
        while True:
            e = self.entries[cur]
            if e.step is None:
                break
            steps.append(e.step)
            cur = e.parent
        from .growth import _dodecahedron_code

        return DerivationTrace(regime, _dodecahedron_code(), tuple(reversed(steps)))


_BUDGET_EXTRA = {FamilyClass.F_MINUS1: 1}


def _within_budget(cls: FamilyClass, p6: int, max_p6: int) -> bool:
    return p6 <= max_p6 + _BUDGET_EXTRA.get(cls, 0)


_REGIME_FAMILY = {
    Regime.SEVEN: {
        FamilyClass.F, FamilyClass.F_IPR, FamilyClass.F_MINUS1,
        FamilyClass.F1, FamilyClass.F1_IPR,
    },
    Regime.A_OPS: {FamilyClass.F, FamilyClass.F_IPR, FamilyClass.F1, FamilyClass.F1_IPR},
    Regime.AB_OPS: {FamilyClass.F, FamilyClass.F_IPR, FamilyClass.F1_IPR},
}


def enumerate_closure(job: EnumerationJob) -> GeneratedSet:
    """Breadth-first closure of the dodecahedron under a regime's operations.

    Deterministic for a fixed job regardless of worker count: frontier items
    are expanded in sorted order and merged sequentially.
    """
    refl = job.include_reflection
    start = build_dodecahedron().canonical_form(refl)[0]
    out = GeneratedSet(job.max_p6)
    code0 = start.canonical_code(refl)
    out.add(code0, GeneratedEntry(start, classify_shape(start), 0))
    frontier: list[tuple[bytes, PlanarMap]] = [(code0, start)]

    def expand(item):
        _, m = item
        return list(successor_candidates(m, job.regime))

    try:
        while frontier:
            frontier.sort(key=lambda it: (it[1].num_faces, it[0]))
            batch = frontier
            frontier = []
            if job.worker_count > 1:
                with ThreadPoolExecutor(max_workers=job.worker_count) as pool:
                    results = list(pool.map(expand, batch))
            else:
                results = [expand(it) for it in batch]
            for (parent_code, _), cands in zip(batch, results):
                for kind, payload, raw in cands:
                    cls = classify_shape(raw)
                    if cls not in _REGIME_FAMILY[job.regime]:
                        continue
                    p6 = p_vector(raw)[6]
                    if not _within_budget(cls, p6, job.max_p6):
                        continue
                    code = raw.canonical_code(refl)
                    if code in out.entries:
                        continue
                    canon = raw.canonical_form(refl)[0]
                    if not check_polytopal(canon):
                        raise MapError(f"enumeration produced a non-polytopal map ({kind.name})")
                    step = None
                    if job.collect_traces:
                        step = GrowthStep(kind, payload, canon.canonical_code())
                    out.add(code, GeneratedEntry(canon, cls, p6, parent_code, step))
                    frontier.append((code, canon))
    except (KeyboardInterrupt, MemoryError):
        out.complete = False
    return out


# ----------------------------------------------------------------------
# spiral oracle
# ----------------------------------------------------------------------


def _windup(sizes: Sequence[int]) -> Optional[PlanarMap]:
    """Wind a face-size spiral into a sphere map, or None if it jams.

    Faces are attached in order, each glued over the run of saturated
    boundary corners at the active position; the last face must close the
    remaining boundary exactly.
    """
    nface = len(sizes)
    s0 = sizes[0]
    faces: list[tuple[int, ...]] = [tuple(range(s0))]
    boundary = list(range(s0))
    deg = [2] * s0
    adj: list[set[int]] = [
        {(v - 1) % s0, (v + 1) % s0} for v in range(s0)
    ]
    nv = s0
    for idx in range(1, nface):
        s = sizes[idx]
        ln = len(boundary)
        if idx == nface - 1:
            if ln != s or any(deg[v] != 3 for v in boundary):
                return None
            faces.append(tuple(reversed(boundary)))
            continue
        if ln < 2:
            return None
        p_start, p_end = 0, 1
        guard = 0
        while deg[boundary[p_start % ln]] == 3:
            p_start -= 1
            guard += 1
            if guard > ln:
                return None
        while deg[boundary[p_end % ln]] == 3:
            p_end += 1
            guard += 1
            if guard > ln:
                return None
        g = p_end - p_start
        if g > ln - 1:
            return None
        newv = s - g - 1
        if newv < 0:
            return None
        path = [boundary[i % ln] for i in range(p_start, p_end + 1)]
        x0, xg = path[0], path[-1]
        if newv == 0 and xg in adj[x0]:
            return None
        new_ids = list(range(nv, nv + newv))
        nv += newv
        faces.append(tuple(reversed(path)) + tuple(new_ids))
        deg.extend([2] * newv)
        deg[x0] += 1
        deg[xg] += 1
        for v in new_ids:
            adj.append(set())
        arc = [x0] + new_ids + [xg]
        for a, b in zip(arc, arc[1:]):
            adj[a].add(b)
            adj[b].add(a)
        keep = [boundary[i % ln] for i in range(p_end, p_start + ln + 1)]
        boundary = keep + new_ids
    try:
        m = map_from_faces(faces)
    except MapError:
        return None
    return m


def oracle_generate(max_p6: int, include_reflection: bool = True) -> GeneratedSet:
    """All fullerene isomorphism classes with at most ``max_p6`` hexagons.

    Exhaustive face-spiral windup over every pentagon placement; complete far
    below the known spiral failure threshold, hence the hard bound.
    """
    if max_p6 > 30:
        raise BoundTooLargeError("spiral completeness is only assumed up to p6 = 30")
    out = GeneratedSet(max_p6)
    for p6 in range(max_p6 + 1):
        nface = 12 + p6
        for pent_positions in itertools.combinations(range(nface), 12):
            sizes = [6] * nface
            for i in pent_positions:
                sizes[i] = 5
            m = _windup(sizes)
            if m is None:
                continue
            pv = p_vector(m)
            if not pv.is_fullerene():
                raise MapError("windup produced a non-fullerene")
            code = m.canonical_code(include_reflection)
            if code not in out.entries:
                canon = m.canonical_form(include_reflection)[0]
                out.add(code, GeneratedEntry(canon, classify_shape(canon), p6))
    return out


@dataclass(frozen=True)
class CrossCheckReport:
    only_a: dict[int, list[bytes]]
    only_b: dict[int, list[bytes]]

    @property
    def clean(self) -> bool:
        return not self.only_a and not self.only_b

    def summary(self) -> str:
        if self.clean:
            return "fullerene buckets agree"
        parts = []
        for p6, codes in sorted(self.only_a.items()):
            parts.append(f"p6={p6}: {len(codes)} only in A")
        for p6, codes in sorted(self.only_b.items()):
            parts.append(f"p6={p6}: {len(codes)} only in B")
        return "; ".join(parts)


def cross_check(a: GeneratedSet, b: GeneratedSet) -> CrossCheckReport:
    """Fullerene-bucket set difference between two generated sets."""
    if a.max_p6 != b.max_p6:
        raise MapError("cross_check requires the same hexagon bound")
    ca, cb = a.fullerene_codes(), b.fullerene_codes()
    only_a: dict[int, list[bytes]] = {}
    only_b: dict[int, list[bytes]] = {}
    for p6 in range(a.max_p6 + 1):
        sa, sb = set(ca.get(p6, [])), set(cb.get(p6, []))
        if sa - sb:
            only_a[p6] = sorted(sa - sb)
        if sb - sa:
            only_b[p6] = sorted(sb - sa)
    return CrossCheckReport(only_a, only_b)


# ----------------------------------------------------------------------
# command line
# ----------------------------------------------------------------------


def _regime_of(tag: str) -> Regime:
    return {"seven": Regime.SEVEN, "a": Regime.A_OPS, "ab": Regime.AB_OPS}[tag]


def _cmd_gen(args) -> int:
    job = EnumerationJob(
        _regime_of(args.regime),
        args.max_hexagons,
        collect_traces=args.traces is not None,
        worker_count=args.workers,
        include_reflection=not args.no_reflection,
    )
    gen = enumerate_closure(job)
    maps = gen.sorted_fullerenes()
    write_planar_code(args.out, maps)
    if args.traces:
        with open(args.traces, "w", encoding="utf-8") as fh:
            for code in sorted(c for c, e in gen.entries.items() if e.cls.is_fullerene):
                fh.write(gen.trace_of(code, job.regime).to_jsonl())
                fh.write("\n")
    counts = gen.fullerene_counts()
    print(f"wrote {len(maps)} fullerenes to {args.out}; per-p6 counts {counts}")
    return 0


def _cmd_oracle(args) -> int:
    gen = oracle_generate(args.max_hexagons, include_reflection=not args.no_reflection)
    maps = gen.sorted_fullerenes()
    write_planar_code(args.out, maps)
    print(f"wrote {len(maps)} fullerenes to {args.out}; per-p6 counts {gen.fullerene_counts()}")
    return 0


def _load_set(path, include_reflection=True) -> GeneratedSet:
    maps = read_planar_code(path)
    max_p6 = 0
    entries = {}
    for m in maps:
        pv = p_vector(m)
        max_p6 = max(max_p6, pv[6])
    out = GeneratedSet(max_p6)
    for m in maps:
        code = m.canonical_code(include_reflection)
        canon = m.canonical_form(include_reflection)[0]
        out.add(code, GeneratedEntry(canon, classify_shape(canon), p_vector(m)[6]))
    return out


def _cmd_diff(args) -> int:
    a = _load_set(args.a)
    b = _load_set(args.b)
    bound = max(a.max_p6, b.max_p6)
    a.max_p6 = b.max_p6 = bound
    report = cross_check(a, b)
    print(report.summary())
    return 0 if report.clean else 1


def _cmd_reduce(args) -> int:
    maps = read_planar_code(args.infile)
    regime = _regime_of(args.regime)
    status = 0
    with open(args.traces, "w", encoding="utf-8") as fh:
        for i, m in enumerate(maps):
            try:
                trace = reduce_to_dodecahedron(m, regime)
            except MapError as exc:
                print(f"map {i}: reduction failed: {exc}", file=sys.stderr)
                status = 1
                continue
            fh.write(trace.to_jsonl())
            fh.write("\n")
            print(f"map {i}: {len(trace)} steps, kinds {[k.name for k in trace.kinds()]}")
    return status


def _cmd_validate(args) -> int:
    maps = read_planar_code(args.infile)
    status = 0
    for i, m in enumerate(maps):
        try:
            pv = p_vector(m)
            poly = check_polytopal(m)
            cls = classify_shape(m).value if poly else "n/a"
            belts = {k: len(find_belts(m, k)) for k in (3, 4, 5)}
            report = {
                "index": i, "vertices": m.num_vertices, "p_vector": dict(pv.items()),
                "polytopal": poly, "class": cls, "belts": belts,
            }
            print(json.dumps(report))
            if not poly:
                status = 1
        except MapError as exc:
            print(json.dumps({"index": i, "error": str(exc)}))
            status = 1
    return status


def _cmd_classify(args) -> int:
    for i, m in enumerate(read_planar_code(args.infile)):
        print(json.dumps({"index": i, "class": classify_shape(m).value}))
    return 0


def _cmd_belts(args) -> int:
    for i, m in enumerate(read_planar_code(args.infile)):
        belts = find_belts(m, args.k)
        rec = {"index": i, "k": args.k, "count": len(belts), "belts": [list(b.faces) for b in belts]}
        if args.k == 5 and p_vector(m).is_fullerene():
            rec["census"] = list(five_belt_census(m))
        print(json.dumps(rec))
    return 0


def _cmd_nanotube(args) -> int:
    for i, m in enumerate(read_planar_code(args.infile)):
        tags = recognize_nanotube(m)
        print(json.dumps({"index": i, "nanotube": [list(t) for t in tags]}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fforge", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="enumerate the closure of the dodecahedron")
    g.add_argument("--regime", choices=["seven", "a", "ab"], required=True)
    g.add_argument("--max-hexagons", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--traces")
    g.add_argument("--no-reflection", action="store_true")
    g.add_argument("--workers", type=int, default=1)
    g.set_defaults(func=_cmd_gen)

    o = sub.add_parser("oracle", help="spiral-generate all fullerenes up to a bound")
    o.add_argument("--max-hexagons", type=int, required=True)
    o.add_argument("--out", required=True)
    o.add_argument("--no-reflection", action="store_true")
    o.set_defaults(func=_cmd_oracle)

    d = sub.add_parser("diff", help="compare two planar_code files up to isomorphism")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=_cmd_diff)

    r = sub.add_parser("reduce", help="reduce maps to the dodecahedron, writing traces")
    r.add_argument("infile")
    r.add_argument("--regime", choices=["seven", "a", "ab"], required=True)
    r.add_argument("--traces", required=True)
    r.set_defaults(func=_cmd_reduce)

    v = sub.add_parser("validate", help="per-map structural report")
    v.add_argument("infile")
    v.set_defaults(func=_cmd_validate)

    c = sub.add_parser("classify", help="family class per map")
    c.add_argument("infile")
    c.set_defaults(func=_cmd_classify)

    b = sub.add_parser("belts", help="k-belt census per map")
    b.add_argument("infile")
    b.add_argument("--k", type=int, default=5)
    b.set_defaults(func=_cmd_belts)

    n = sub.add_parser("nanotube", help="nanotube cap recognition per map")
    n.add_argument("infile")
    n.set_defaults(func=_cmd_nanotube)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

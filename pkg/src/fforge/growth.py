"""Growth operations, nanotube families, and reduction to the dodecahedron.

The three operation regimes share one mechanism: every step is either a
single two-edges/edge truncation, a recorded composition of truncations, or
a cap-recognition rebuild for the two nanotube families.  Reduction searches
the admissible inverse straightenings in a fixed order, so isomorphic inputs
produce identical traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .planar_map import MapError, PlanarMap, build_dodecahedron, map_from_faces, p_vector
from .structure import (
    FamilyClass,
    Fragment,
    NotAFullereneError,
    classify_shape,
    find_fragments,
)
from .transform import (
    EdgeRef,
    ThreeBeltObstructionError,
    TruncationSite,
    enumerate_sites,
    straighten,
    truncate,
)


class AtDodecahedronError(MapError):
    """Reduction was asked for a step below the dodecahedron."""


class NoCaseAppliesError(MapError):
    """No reduction case fired; carries a dump of the offending map."""

    def __init__(self, message: str, m: PlanarMap):
        from .planar_map import encode_planar_code

        dump = encode_planar_code([m], with_header=False).hex()
        super().__init__(f"{message}; map dump (planar_code hex): {dump}")
        self.map = m


class SiteMismatchError(MapError):
    """The supplied site does not match the operation's pattern."""


class IllegalTransitionError(MapError):
    """The operation is not admissible for the map's family class."""


class Regime(Enum):
    SEVEN = "seven"
    A_OPS = "a"
    AB_OPS = "ab"


class GrowthOpKind(Enum):
    T145 = "(1;4,5)"
    T155 = "(1;5,5)"
    T2645 = "(2,6;4,5)"
    T2655 = "(2,6;5,5)"
    T2656 = "(2,6;5,6)"
    T2755 = "(2,7;5,5)"
    T2756 = "(2,7;5,6)"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    B5 = "B5"


# single-truncation signatures: (s, k or None, m1, m2); A4..A7 are the four
# two-edge truncations under their growth-operation names
KIND_SIGNATURES: dict[GrowthOpKind, tuple[int, Optional[int], int, int]] = {
    GrowthOpKind.T145: (1, None, 4, 5),
    GrowthOpKind.T155: (1, None, 5, 5),
    GrowthOpKind.T2645: (2, 6, 4, 5),
    GrowthOpKind.T2655: (2, 6, 5, 5),
    GrowthOpKind.T2656: (2, 6, 5, 6),
    GrowthOpKind.T2755: (2, 7, 5, 5),
    GrowthOpKind.T2756: (2, 7, 5, 6),
    GrowthOpKind.A4: (2, 6, 5, 5),
    GrowthOpKind.A5: (2, 6, 5, 6),
    GrowthOpKind.A6: (2, 7, 5, 5),
    GrowthOpKind.A7: (2, 7, 5, 6),
}

SEVEN_KINDS = (
    GrowthOpKind.T145,
    GrowthOpKind.T155,
    GrowthOpKind.T2645,
    GrowthOpKind.T2655,
    GrowthOpKind.T2656,
    GrowthOpKind.T2755,
    GrowthOpKind.T2756,
)

# composite decompositions used for forward application and enumeration; the
# later truncations always act on the unique exceptional face they need
COMPOSITE_KINDS: dict[GrowthOpKind, tuple[GrowthOpKind, ...]] = {
    GrowthOpKind.A3: (GrowthOpKind.T155, GrowthOpKind.T2645),
    GrowthOpKind.B1: (GrowthOpKind.T2656, GrowthOpKind.T2755),
    GrowthOpKind.B2: (GrowthOpKind.T2656, GrowthOpKind.T2756),
    GrowthOpKind.B3: (GrowthOpKind.T2656, GrowthOpKind.T2756, GrowthOpKind.T2755),
    GrowthOpKind.B4: (GrowthOpKind.T2656, GrowthOpKind.T2756, GrowthOpKind.T2756),
    GrowthOpKind.B5: (GrowthOpKind.T2656, GrowthOpKind.T2756, GrowthOpKind.T2756),
}


@dataclass(frozen=True)
class GrowthStep:
    """One growth event with everything needed to replay it.

    ``site`` is ("trunc", ((s, dart), ...)) with darts in the canonical
    labeling of the map each sub-truncation acts on, or ("cap", family, k)
    for a nanotube-belt insertion recognized from its cap.
    """

    kind: GrowthOpKind
    site: tuple
    code: bytes

    def to_json(self) -> dict:
        if self.site[0] == "trunc":
            payload = {"type": "trunc", "steps": [list(x) for x in self.site[1]]}
        else:
            payload = {"type": "cap", "family": self.site[1], "k": self.site[2]}
        return {"kind": self.kind.name, "site": payload, "code": self.code.hex()}

    @staticmethod
    def from_json(obj: dict) -> "GrowthStep":
        kind = GrowthOpKind[obj["kind"]]
        p = obj["site"]
        if p["type"] == "trunc":
            site = ("trunc", tuple(tuple(x) for x in p["steps"]))
        else:
            site = ("cap", p["family"], p["k"])
        return GrowthStep(kind, site, bytes.fromhex(obj["code"]))


@dataclass(frozen=True)
class DerivationTrace:
    """Growth steps leading from the dodecahedron to a target map."""

    regime: Regime
    start_code: bytes
    steps: tuple[GrowthStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def kinds(self) -> list[GrowthOpKind]:
        return [s.kind for s in self.steps]

    def edge_truncation_count(self) -> int:
        """Number of primitive s=1 cuts when all steps are expanded."""
        n = 0
        for st in self.steps:
            if st.site[0] == "trunc":
                n += sum(1 for s, _ in st.site[1] if s == 1)
            else:
                n += 0
        return n

    def to_jsonl(self) -> str:
        head = json.dumps({"regime": self.regime.value, "start": self.start_code.hex()})
        lines = [head] + [json.dumps(s.to_json()) for s in self.steps]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "DerivationTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = json.loads(lines[0])
        steps = tuple(GrowthStep.from_json(json.loads(ln)) for ln in lines[1:])
        return DerivationTrace(Regime(head["regime"]), bytes.fromhex(head["start"]), steps)


# ----------------------------------------------------------------------
# nanotube families
# ----------------------------------------------------------------------


def build_D5k(k: int) -> PlanarMap:
    """Fullerene made of two 6-pentagon caps separated by k hexagon 5-belts."""
    if k < 0:
        raise MapError("k must be nonnegative")
    t = list(range(5))
    xs = [5 + 2 * i for i in range(5)]
    ys = [6 + 2 * i for i in range(5)]
    faces: list[tuple[int, ...]] = [tuple(t)]
    for i in range(5):
        j = (i + 1) % 5
        faces.append((t[j], t[i], xs[i], ys[i], xs[j]))
    next_id = 15
    for _ in range(k):
        ms = [next_id + 2 * i for i in range(5)]
        ls = [next_id + 2 * i + 1 for i in range(5)]
        for i in range(5):
            h = (i - 1) % 5
            faces.append((ys[i], xs[i], ys[h], ms[h], ls[h], ms[i]))
        xs, ys = ms, ls
        next_id += 10
    p = [next_id + i for i in range(5)]
    for i in range(5):
        j = (i + 1) % 5
        faces.append((ys[j], xs[j], ys[i], p[i], p[j]))
    faces.append(tuple(reversed(p)))
    return map_from_faces(faces)


def build_F3k(k: int) -> PlanarMap:
    """Fullerene made of two 6-pentagon triple caps separated by k hexagon layers."""
    if k < 0:
        raise MapError("k must be nonnegative")
    v = 0
    u = [1, 2, 3]
    q = [4 + i for i in range(3)]
    r = [7 + i for i in range(3)]
    w = [10 + i for i in range(3)]
    wp = [13 + i for i in range(3)]
    faces: list[tuple[int, ...]] = []
    for i in range(3):
        h = (i - 1) % 3
        j = (i + 1) % 3
        faces.append((u[h], v, u[i], q[i], r[i]))
        faces.append((q[i], u[i], r[j], w[i], wp[i]))
    # boundary walked forward by the cap faces; True marks a pending vertex
    # still waiting for its third edge
    boundary = [
        (q[0], False), (r[0], False), (w[2], True), (wp[2], True),
        (q[2], False), (r[2], False), (w[1], True), (wp[1], True),
        (q[1], False), (r[1], False), (w[0], True), (wp[0], True),
    ]
    next_id = 16
    for _ in range(k):
        n = len(boundary)
        pair_positions = [
            i for i in range(n)
            if not boundary[i][1] and not boundary[(i + 1) % n][1]
        ]
        if len(pair_positions) != 3:
            raise MapError("layer boundary lost its pattern")
        new_boundary: list[tuple[int, bool]] = []
        start = (pair_positions[0] - 1) % n
        order = sorted(pair_positions, key=lambda i: (i - start) % n)
        for i in order:
            wp_a = boundary[(i - 1) % n][0]
            qq = boundary[i][0]
            rr = boundary[(i + 1) % n][0]
            w_b = boundary[(i + 2) % n][0]
            n1, n2 = next_id, next_id + 1
            next_id += 2
            faces.append((w_b, rr, qq, wp_a, n1, n2))
            new_boundary.extend([(wp_a, False), (n1, True), (n2, True), (w_b, False)])
        # merge duplicated joint vertices (w_b of one segment = wp of next)
        boundary = _dedup_cycle(new_boundary)
    _attach_c2_cap(faces, boundary, next_id)
    return map_from_faces(faces)


def _dedup_cycle(seq: list[tuple[int, bool]]) -> list[tuple[int, bool]]:
    out: list[tuple[int, bool]] = []
    for item in seq:
        if not out or out[-1][0] != item[0]:
            out.append(item)
    while len(out) > 1 and out[0][0] == out[-1][0]:
        out.pop()
    return out


def _attach_c2_cap(faces: list, boundary: list[tuple[int, bool]], next_id: int) -> None:
    """Close a (pending,pending,complete,complete)-patterned 12-boundary."""
    n = len(boundary)
    rev = [boundary[(-i) % n] for i in range(n)]
    pair_pos = [
        i for i in range(n)
        if rev[i][1] and rev[(i + 1) % n][1]
    ]
    if n != 12 or len(pair_pos) != 3:
        raise MapError("boundary cannot take a triple cap")
    pair_pos.sort()
    pairs = []  # (q', r') in backward-walk order
    for i in pair_pos:
        pairs.append((rev[i][0], rev[(i + 1) % n][0], i))
    vp = next_id
    up = [next_id + 1 + i for i in range(3)]
    # backward-walk pair j is assigned to cap face index (3 - j) % 3 so the
    # notch faces close against the right neighbors
    assign = {}
    for j in range(3):
        assign[j] = pairs[(3 - j) % 3]
    for j in range(3):
        qj, rj, _ = assign[j]
        faces.append((up[(j - 1) % 3], vp, up[j], qj, rj))
    for j in range(3):
        # notch between cap faces j and j+1: boundary path r'_{j+1} -> W -> W' -> q'_j
        qj, _, posj = assign[j]
        _, rj1, pos_r = assign[(j + 1) % 3]
        w1 = rev[(pos_r + 2) % n][0]
        w2 = rev[(pos_r + 3) % n][0]
        if rev[(pos_r + 4) % n][0] != qj:
            raise MapError("cap notch does not close against the boundary")
        faces.append((qj, up[j], rj1, w1, w2))


def recognize_nanotube(m: PlanarMap) -> list[tuple[str, int]]:
    """Nanotube families recognized from their caps.

    Returns the matching ("D5", k) / ("F3", k) tags; both fire exactly on the
    dodecahedron, where the two k=0 families coincide.
    """
    pv = p_vector(m)
    if not pv.is_fullerene():
        raise NotAFullereneError("nanotube recognition applies to fullerenes")
    out = []
    if find_fragments(m, Fragment.C1):
        if pv[6] % 5:
            raise MapError("6-pentagon cap present but hexagon count is not 5k")
        out.append(("D5", pv[6] // 5))
    if find_fragments(m, Fragment.C2):
        if pv[6] % 3:
            raise MapError("triple cap present but hexagon count is not 3k")
        out.append(("F3", pv[6] // 3))
    return out


# ----------------------------------------------------------------------
# forward application
# ----------------------------------------------------------------------

_SOURCE_CLASSES: dict[GrowthOpKind, tuple[FamilyClass, ...]] = {
    GrowthOpKind.T145: (FamilyClass.F_MINUS1,),
    GrowthOpKind.T155: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.T2645: (FamilyClass.F_MINUS1,),
    GrowthOpKind.T2655: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.T2656: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.T2755: (FamilyClass.F1, FamilyClass.F1_IPR),
    GrowthOpKind.T2756: (FamilyClass.F1, FamilyClass.F1_IPR),
    GrowthOpKind.A1: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.A2: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.A3: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.A4: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.A5: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.A6: (FamilyClass.F1, FamilyClass.F1_IPR),
    GrowthOpKind.A7: (FamilyClass.F1, FamilyClass.F1_IPR),
    GrowthOpKind.B1: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.B2: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.B3: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.B4: (FamilyClass.F, FamilyClass.F_IPR),
    GrowthOpKind.B5: (FamilyClass.F, FamilyClass.F_IPR),
}

_F_CLASSES = (FamilyClass.F, FamilyClass.F_IPR)
_F1_PAIR = (FamilyClass.F1, FamilyClass.F1_IPR)

_TARGET_CLASSES: dict[GrowthOpKind, tuple[FamilyClass, ...]] = {
    GrowthOpKind.T155: (FamilyClass.F_MINUS1,),
    GrowthOpKind.T145: (FamilyClass.F_MINUS1,),
    GrowthOpKind.T2645: _F_CLASSES,
    GrowthOpKind.T2655: _F_CLASSES,
    GrowthOpKind.T2656: _F1_PAIR,
    GrowthOpKind.T2755: _F_CLASSES,
    GrowthOpKind.T2756: _F1_PAIR,
    GrowthOpKind.A1: _F_CLASSES,
    GrowthOpKind.A2: _F_CLASSES,
    GrowthOpKind.A3: _F_CLASSES,
    GrowthOpKind.A4: _F_CLASSES,
    GrowthOpKind.A5: _F1_PAIR,
    GrowthOpKind.A6: _F_CLASSES,
    GrowthOpKind.A7: _F1_PAIR,
    GrowthOpKind.B1: _F_CLASSES,
    GrowthOpKind.B2: (FamilyClass.F1_IPR,),
    GrowthOpKind.B3: _F_CLASSES,
    GrowthOpKind.B4: (FamilyClass.F1_IPR,),
    GrowthOpKind.B5: (FamilyClass.F1_IPR,),
}


def _canonicalize(m: PlanarMap) -> PlanarMap:
    return m.canonical_form()[0]


def _canonical_site(m_raw: PlanarMap, site: TruncationSite) -> tuple[PlanarMap, tuple[int, int]]:
    """Express a truncation site in the canonical labeling.

    When the canonical form reflects the map, the run anchor is replaced by
    its mirror (the walk dart entering the run from the other side), so the
    relabeled site cuts the same vertex run.
    """
    canon, dmap, reflected = m_raw.canonical_form()
    if not reflected:
        return canon, (site.s, dmap[site.start_dart])
    if site.s == 0:
        d_in = site.start_dart
        for _ in range(m_raw.face_sizes[site.face] - 1):
            d_in = m_raw.face_next(d_in)
        return canon, (0, dmap[m_raw.twin(d_in)])
    t_last = site.start_dart
    for _ in range(site.s - 1):
        t_last = m_raw.face_next(t_last)
    return canon, (site.s, dmap[m_raw.twin(t_last)])


def apply_growth(m: PlanarMap, kind: GrowthOpKind, site=None) -> PlanarMap:
    """Apply a growth operation and return the canonical result.

    ``site`` is a TruncationSite for the single-truncation kinds, a sequence
    of (s, dart) pairs for composite kinds (darts refer to the canonical
    labeling after each sub-step), and is ignored for the cap insertions.
    """
    cls = classify_shape(m)
    if cls not in _SOURCE_CLASSES[kind]:
        raise IllegalTransitionError(f"{kind.name} does not apply to class {cls.value}")
    if kind in (GrowthOpKind.A1, GrowthOpKind.A2):
        fam = "D5" if kind is GrowthOpKind.A1 else "F3"
        tags = dict(recognize_nanotube(m))
        if fam not in tags:
            raise SiteMismatchError(f"{kind.name} needs the matching nanotube cap")
        k = tags[fam]
        result = build_D5k(k + 1) if fam == "D5" else build_F3k(k + 1)
        return _canonicalize(result)
    if kind in KIND_SIGNATURES:
        if not isinstance(site, TruncationSite):
            raise SiteMismatchError(f"{kind.name} needs a truncation site")
        if not _site_matches(m, site, kind):
            raise SiteMismatchError(f"site does not match {kind.name}")
        out = truncate(m, site).map
    elif kind in COMPOSITE_KINDS:
        seq = COMPOSITE_KINDS[kind]
        if site is None or len(site) != len(seq):
            raise SiteMismatchError(f"{kind.name} needs {len(seq)} sub-sites")
        cur = _canonicalize(m)
        for (s, dart), sub_kind in zip(site, seq):
            sub_site = TruncationSite(cur.face_of[dart], dart, s)
            if not _site_matches(cur, sub_site, sub_kind):
                raise SiteMismatchError(f"sub-site does not match {sub_kind.name}")
            cur = _canonicalize(truncate(cur, sub_site).map)
        out = cur
    else:
        raise SiteMismatchError(f"unknown kind {kind}")
    out_cls = classify_shape(out)
    if out_cls not in _TARGET_CLASSES[kind]:
        raise IllegalTransitionError(f"{kind.name} produced class {out_cls.value}")
    return _canonicalize(out)


def _site_matches(m: PlanarMap, site: TruncationSite, kind: GrowthOpKind) -> bool:
    s, k, m1, m2 = KIND_SIGNATURES[kind]
    ss, sk, sm1, sm2 = site.signature(m)
    if ss != s or (k is not None and sk != k):
        return False
    return (sm1, sm2) == (min(m1, m2), max(m1, m2))


def replay_step(m_canon: PlanarMap, step: GrowthStep) -> PlanarMap:
    """Replay a recorded step on a canonical predecessor; verifies the code."""
    if step.site[0] == "cap":
        fam, k = step.site[1], step.site[2]
        out = _canonicalize(build_D5k(k + 1) if fam == "D5" else build_F3k(k + 1))
    else:
        cur = m_canon
        for s, dart in step.site[1]:
            site = TruncationSite(cur.face_of[dart], dart, s)
            cur = _canonicalize(truncate(cur, site).map)
        out = cur
    if out.canonical_code() != step.code:
        raise MapError(f"replay of {step.kind.name} did not reproduce the recorded code")
    return out


def replay_trace(trace: DerivationTrace) -> PlanarMap:
    m = _canonicalize(build_dodecahedron())
    if m.canonical_code() != trace.start_code:
        raise MapError("trace does not start at the dodecahedron")
    for step in trace.steps:
        m = replay_step(m, step)
    return m


# ----------------------------------------------------------------------
# reduction
# ----------------------------------------------------------------------

_REGIME_CLASSES = {
    Regime.SEVEN: {
        FamilyClass.F, FamilyClass.F_IPR, FamilyClass.F_MINUS1,
        FamilyClass.F1, FamilyClass.F1_IPR,
    },
    Regime.A_OPS: {FamilyClass.F, FamilyClass.F_IPR, FamilyClass.F1, FamilyClass.F1_IPR},
    Regime.AB_OPS: {FamilyClass.F, FamilyClass.F_IPR, FamilyClass.F1_IPR},
}


def _try_undo(m: PlanarMap, dart: int, expect: Sequence[FamilyClass]):
    """Straighten one edge; returns (canonical predecessor, canonical site)
    when the result lands in an expected class, else None."""
    try:
        res = straighten(m, EdgeRef(dart))
    except ThreeBeltObstructionError:
        return None
    cls = classify_shape(res.map)
    if cls not in expect:
        return None
    canon, csite = _canonical_site(res.map, res.inverse_site)
    return canon, csite, cls


_FULLERENE_CLASSES = (FamilyClass.F, FamilyClass.F_IPR)
_F1_CLASSES = (FamilyClass.F1, FamilyClass.F1_IPR)


def _undo_single(m, kind, expect):
    """First admissible inverse of one truncation kind, in dart order."""
    for d in sorted(_candidate_darts(m, kind)):
        got = _try_undo(m, d, expect)
        if got is not None:
            canon, csite, _ = got
            return canon, csite
    return None


def _candidate_darts(m: PlanarMap, kind: GrowthOpKind):
    """Edges that could be the new-face/shrunk-face seam of the given kind."""
    s, k, m1, m2 = KIND_SIGNATURES[kind]
    fs = m.face_sizes
    new_sz = s + 3
    shrunk_sz = (k - s + 1) if k is not None else None
    corners = sorted((m1 + 1, m2 + 1))
    out = []
    for d in m.edges:
        a, b = fs[m.face_of[d]], fs[m.face_of[m.twin(d)]]
        if shrunk_sz is None:
            if new_sz not in (a, b):
                continue
        else:
            if sorted((a, b)) != sorted((new_sz, shrunk_sz)):
                continue
        ca, cb = m.edge_corner_faces(d)
        if sorted((fs[ca], fs[cb])) != corners:
            continue
        out.append(d)
    return out


_DODECA_CODE: Optional[bytes] = None


def _dodecahedron_code() -> bytes:
    global _DODECA_CODE
    if _DODECA_CODE is None:
        _DODECA_CODE = build_dodecahedron().canonical_code()
    return _DODECA_CODE


def reduce_once(m: PlanarMap, regime: Regime) -> tuple[PlanarMap, GrowthStep]:
    """One reduction step: a strictly smaller predecessor in the regime's
    family plus the forward step that regenerates ``m``.

    The input should be in canonical labeling for reproducible traces.
    """
    cls = classify_shape(m)
    if cls not in _REGIME_CLASSES[regime]:
        raise IllegalTransitionError(f"class {cls.value} is outside regime {regime.value}")
    code = m.canonical_code()
    if code == _dodecahedron_code():
        raise AtDodecahedronError("the dodecahedron has no predecessor")
    if regime is Regime.SEVEN:
        return _reduce_seven(m, cls, code)
    return _reduce_growth(m, cls, code, regime)


def _step_single(kind: GrowthOpKind, csite, code: bytes) -> GrowthStep:
    return GrowthStep(kind, ("trunc", (csite,)), code)


def _reduce_seven(m: PlanarMap, cls: FamilyClass, code: bytes):
    order: list[tuple[GrowthOpKind, tuple[FamilyClass, ...]]]
    if cls is FamilyClass.F_MINUS1:
        order = [
            (GrowthOpKind.T155, _FULLERENE_CLASSES),
            (GrowthOpKind.T145, (FamilyClass.F_MINUS1,)),
        ]
    elif cls in _F1_CLASSES:
        order = [
            (GrowthOpKind.T2656, _FULLERENE_CLASSES),
            (GrowthOpKind.T2756, _F1_CLASSES),
        ]
    else:
        order = [
            (GrowthOpKind.T2655, _FULLERENE_CLASSES),
            (GrowthOpKind.T2645, (FamilyClass.F_MINUS1,)),
            (GrowthOpKind.T2755, _F1_CLASSES),
        ]
    for kind, expect in order:
        got = _undo_single(m, kind, expect)
        if got is not None:
            pred, csite = got
            return pred, _step_single(kind, csite, code)
    raise NoCaseAppliesError("no admissible truncation inverse found", m)


def _reduce_growth(m: PlanarMap, cls: FamilyClass, code: bytes, regime: Regime):
    if cls in _FULLERENE_CLASSES:
        if cls is FamilyClass.F:
            return _reduce_adjacent_pentagons(m, code)
        if regime is Regime.A_OPS:
            got = _undo_single(m, GrowthOpKind.T2755, _F1_CLASSES)
            if got is None:
                raise NoCaseAppliesError("IPR fullerene with no admissible A6 inverse", m)
            pred, csite = got
            return pred, _step_single(GrowthOpKind.A6, csite, code)
        return _reduce_ipr_ab(m, code)
    # heptagon class
    if regime is Regime.A_OPS:
        order = [
            (GrowthOpKind.A5, GrowthOpKind.T2656, _FULLERENE_CLASSES),
            (GrowthOpKind.A7, GrowthOpKind.T2756, _F1_CLASSES),
        ]
        for op, kind, expect in order:
            got = _undo_single(m, kind, expect)
            if got is not None:
                pred, csite = got
                return pred, _step_single(op, csite, code)
        raise NoCaseAppliesError("heptagon class with no A5/A7 inverse", m)
    return _reduce_f1_ipr_ab(m, code)


def _pentagon_pair_dart(m: PlanarMap, fa: int, fb: int) -> int:
    for d in m.faces[fa]:
        if m.face_of[m.twin(d)] == fb:
            return d
    raise MapError("faces do not share an edge")


def _reduce_adjacent_pentagons(m: PlanarMap, code: bytes):
    """Cap/patch dispatch for a fullerene with adjacent pentagons."""
    caps = recognize_nanotube(m)
    for fam, k in caps:
        if k == 0:
            continue
        builder = build_D5k if fam == "D5" else build_F3k
        pred = _canonicalize(builder(k - 1))
        op = GrowthOpKind.A1 if fam == "D5" else GrowthOpKind.A2
        return pred, GrowthStep(op, ("cap", fam, k - 1), code)
    p1 = find_fragments(m, Fragment.P1)
    if p1:
        emb = min(p1, key=lambda e: sorted(e.faces))
        d = _pentagon_pair_dart(m, emb.face(0), emb.face(1))
        got = _try_undo(m, d, _FULLERENE_CLASSES)
        if got is None:
            raise NoCaseAppliesError("P1 patch did not straighten to a fullerene", m)
        pred, csite, _ = got
        return pred, _step_single(GrowthOpKind.A4, csite, code)
    p2 = find_fragments(m, Fragment.P2)
    if p2:
        emb = min(p2, key=lambda e: sorted(e.faces))
        return _reduce_a3(m, emb, code)
    raise NoCaseAppliesError("adjacent pentagons but no cap or patch embeds", m)


def _reduce_a3(m: PlanarMap, emb, code: bytes):
    """Undo the two-truncation composition at a P2 patch."""
    d = _pentagon_pair_dart(m, emb.face(0), emb.face(1))
    got = _try_undo(m, d, (FamilyClass.F_MINUS1,))
    if got is None:
        raise NoCaseAppliesError("P2 patch did not straighten to the quadrangle class", m)
    mid, site_b, _ = got
    # second straightening: a quadrangle edge flanked by two hexagons
    quad = mid.face_sizes.index(4)
    for dd in sorted(mid.faces[quad]):
        ca, cb = mid.edge_corner_faces(dd)
        if mid.face_sizes[ca] == 6 and mid.face_sizes[cb] == 6:
            got2 = _try_undo(mid, dd, _FULLERENE_CLASSES)
            if got2 is not None:
                pred, site_a, _ = got2
                return pred, GrowthStep(GrowthOpKind.A3, ("trunc", (site_a, site_b)), code)
    raise NoCaseAppliesError("quadrangle intermediate did not straighten back", m)


def _sequence_search(m: PlanarMap, kinds: Sequence[GrowthOpKind], final: Sequence[FamilyClass]):
    """Depth-first search for a straightening sequence undoing ``kinds``.

    ``kinds`` is the forward composition order; straightenings run reversed.
    Returns (predecessor, substeps in forward order) or None.
    """

    def rec(cur: PlanarMap, remaining: list[GrowthOpKind], acc: list):
        kind = remaining[-1]
        rest = remaining[:-1]
        expect = final if not rest else (
            FamilyClass.F_MINUS1, FamilyClass.F1, FamilyClass.F1_IPR,
            FamilyClass.F, FamilyClass.F_IPR, FamilyClass.OTHER,
        )
        for d in _candidate_darts(cur, kind):
            got = _try_undo(cur, d, expect)
            if got is None:
                continue
            nxt, csite, _ = got
            if not rest:
                return nxt, [csite] + acc
            deeper = rec(nxt, rest, [csite] + acc)
            if deeper is not None:
                return deeper
        return None

    got = rec(m, list(kinds), [])
    if got is None:
        return None
    pred, sites = got
    return pred, tuple(sites)


def _reduce_ipr_ab(m: PlanarMap, code: bytes):
    """IPR fullerene under the extended regime: pentagon pair geometry picks
    the composite operation, with an A6 inverse fallback."""
    fs = m.face_sizes
    # case 1: an edge whose two endpoint corners are pentagons
    for d in sorted(m.edges):
        ca, cb = m.edge_corner_faces(d)
        if fs[ca] == 5 and fs[cb] == 5:
            got = _sequence_search(m, COMPOSITE_KINDS[GrowthOpKind.B1], _FULLERENE_CLASSES)
            if got is None:
                break
            pred, sites = got
            return pred, GrowthStep(GrowthOpKind.B1, ("trunc", sites), code)
    # case 2: a hexagon meeting pentagons along opposite edges
    for f in range(m.num_faces):
        if fs[f] != 6:
            continue
        nbrs = m.face_neighbors(f)
        if any(fs[nbrs[i]] == 5 and fs[nbrs[i + 3]] == 5 for i in range(3)):
            got = _sequence_search(m, COMPOSITE_KINDS[GrowthOpKind.B3], _FULLERENE_CLASSES)
            if got is None:
                break
            pred, sites = got
            return pred, GrowthStep(GrowthOpKind.B3, ("trunc", sites), code)
    # case 3: every pentagon is isolated behind hexagons
    got = _undo_single(m, GrowthOpKind.T2755, (FamilyClass.F1_IPR,))
    if got is not None:
        pred, csite = got
        return pred, _step_single(GrowthOpKind.A6, csite, code)
    raise NoCaseAppliesError("IPR fullerene matched no extended-regime case", m)


def _reduce_f1_ipr_ab(m: PlanarMap, code: bytes):
    got = _undo_single(m, GrowthOpKind.T2756, (FamilyClass.F1_IPR,))
    if got is not None:
        pred, csite = got
        return pred, _step_single(GrowthOpKind.A7, csite, code)
    for op in (GrowthOpKind.B2, GrowthOpKind.B4, GrowthOpKind.B5):
        got = _sequence_search(m, COMPOSITE_KINDS[op], _FULLERENE_CLASSES)
        if got is not None:
            pred, sites = got
            return pred, GrowthStep(op, ("trunc", sites), code)
    raise NoCaseAppliesError("heptagon IPR class matched no B-operation inverse", m)


# ----------------------------------------------------------------------
# forward successor enumeration (used by the closure engine)
# ----------------------------------------------------------------------


def _single_truncation_successors(m: PlanarMap, kind: GrowthOpKind):
    s, k, m1, m2 = KIND_SIGNATURES[kind]
    for site in enumerate_sites(m, s=s, k=k, m1=m1, m2=m2):
        raw = truncate(m, site).map
        yield kind, ("trunc", ((site.s, site.start_dart),)), raw


def _composite_successors(m: PlanarMap, kind: GrowthOpKind):
    """Chains of truncations realizing a composite operation.

    The first cut runs over all matching sites; later cuts are anchored by
    their signature to the unique exceptional face the chain created.
    """
    seq = COMPOSITE_KINDS[kind]

    def rec(cur: PlanarMap, idx: int, acc: tuple):
        k0 = seq[idx]
        s, k, m1, m2 = KIND_SIGNATURES[k0]
        for site in enumerate_sites(cur, s=s, k=k, m1=m1, m2=m2):
            raw = truncate(cur, site).map
            payload = acc + ((site.s, site.start_dart),)
            if idx + 1 == len(seq):
                yield kind, ("trunc", payload), raw
            else:
                yield from rec(_canonicalize(raw), idx + 1, payload)

    yield from rec(m, 0, ())


def _cap_successors(m: PlanarMap):
    for fam, k in recognize_nanotube(m):
        builder = build_D5k if fam == "D5" else build_F3k
        kind = GrowthOpKind.A1 if fam == "D5" else GrowthOpKind.A2
        yield kind, ("cap", fam, k), builder(k + 1)


_REGIME_OPS: dict[Regime, dict[FamilyClass, tuple[GrowthOpKind, ...]]] = {
    Regime.SEVEN: {
        FamilyClass.F: (GrowthOpKind.T155, GrowthOpKind.T2655, GrowthOpKind.T2656),
        FamilyClass.F_MINUS1: (GrowthOpKind.T145, GrowthOpKind.T2645),
        FamilyClass.F1: (GrowthOpKind.T2755, GrowthOpKind.T2756),
    },
    Regime.A_OPS: {
        FamilyClass.F: (
            GrowthOpKind.A1, GrowthOpKind.A2, GrowthOpKind.A3,
            GrowthOpKind.A4, GrowthOpKind.A5,
        ),
        FamilyClass.F1: (GrowthOpKind.A6, GrowthOpKind.A7),
    },
    Regime.AB_OPS: {
        FamilyClass.F: (
            GrowthOpKind.A1, GrowthOpKind.A2, GrowthOpKind.A3, GrowthOpKind.A4,
            GrowthOpKind.B1, GrowthOpKind.B2, GrowthOpKind.B3, GrowthOpKind.B4,
        ),
        FamilyClass.F1: (GrowthOpKind.A6, GrowthOpKind.A7),
    },
}


def successor_candidates(m: PlanarMap, regime: Regime):
    """All (kind, step payload, raw result) growth moves from a canonical map.

    Results are not class- or budget-filtered; the enumeration engine owns
    that policy.  For the extended regime only heptagon maps without adjacent
    pentagons are expanded, matching its family.
    """
    cls = classify_shape(m)
    key = FamilyClass.F if cls in _FULLERENE_CLASSES else (
        FamilyClass.F1 if cls in _F1_CLASSES else cls
    )
    if regime is Regime.AB_OPS and cls is FamilyClass.F1:
        return
    ops = _REGIME_OPS[regime].get(key, ())
    for kind in ops:
        if kind in (GrowthOpKind.A1, GrowthOpKind.A2):
            for item in _cap_successors(m):
                if item[0] is kind:
                    yield item
        elif kind in COMPOSITE_KINDS:
            yield from _composite_successors(m, kind)
        else:
            yield from _single_truncation_successors(m, kind)


def reduce_to_dodecahedron(m: PlanarMap, regime: Regime) -> DerivationTrace:
    """Full reduction; the returned trace replays forward to ``m``'s code."""
    cur = _canonicalize(m)
    target_code = cur.canonical_code()
    steps: list[GrowthStep] = []
    guard = 4 * m.num_faces + 16
    while cur.canonical_code() != _dodecahedron_code():
        cur, step = reduce_once(cur, regime)
        steps.append(step)
        if len(steps) > guard:
            raise NoCaseAppliesError("reduction did not terminate", m)
    trace = DerivationTrace(regime, _dodecahedron_code(), tuple(reversed(steps)))
    final = replay_trace(trace)
    if final.canonical_code() != target_code:
        raise MapError("reduction replay mismatch")
    return trace

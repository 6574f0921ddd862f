"""Oriented 3-regular planar maps encoded by darts.

A map is stored as two permutations on dart ids: ``twin`` (the fixed-point-free
involution pairing the two sides of each edge) and ``next`` (counterclockwise
rotation of darts around their source vertex).  Vertices, edges and faces are
orbits of ``next``, ``twin`` and ``next . twin`` respectively; nothing else is
authoritative state.  Maps are immutable after validation, so they can be
shared freely between threads and used as dictionary keys via their canonical
codes.

Dart numbering: vertex ``v`` owns darts ``3v``, ``3v+1``, ``3v+2`` in rotation
order, so ``next`` is just ``3v + (j+1) % 3``.
"""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

PLANAR_CODE_HEADER = b">>planar_code<<"


class MapError(ValueError):
    """Base class for malformed rotation systems and map-level failures."""


class NonCubicError(MapError):
    """A vertex does not have exactly three distinct neighbors."""


class AsymmetricError(MapError):
    """u lists v as a neighbor but v does not list u."""


class NonSphericalError(MapError):
    """The rotation system does not embed in the sphere (Euler check fails)."""


class DisconnectedError(MapError):
    """The underlying graph is not connected."""


class MalformedHeaderError(MapError):
    """A planar_code stream does not start with a valid record."""


class TruncatedRecordError(MapError):
    """A planar_code record ends before all adjacency lists are closed."""


class VertexOverflowError(MapError):
    """A map does not fit the one-byte planar_code variant."""


class PlanarMap:
    """Immutable oriented 3-regular planar map on the sphere."""

    def __init__(self, twin: Sequence[int], nxt: Sequence[int], _validated: bool = False):
        self._twin = tuple(twin)
        self._next = tuple(nxt)
        if not _validated:
            self._validate()

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def from_rotation(cls, neighbors: Sequence[Sequence[int]]) -> "PlanarMap":
        """Build a validated map from per-vertex counterclockwise neighbor lists.

        Raises:
            NonCubicError: some vertex does not list exactly 3 distinct others.
            AsymmetricError: adjacency is not symmetric.
            DisconnectedError: the graph is not connected.
            NonSphericalError: the embedding has nonzero genus.
        """
        n = len(neighbors)
        index_of = []
        for v, nbrs in enumerate(neighbors):
            nbrs = list(nbrs)
            if len(nbrs) != 3 or len(set(nbrs)) != 3 or v in nbrs:
                raise NonCubicError(f"vertex {v} must have 3 distinct neighbors, got {nbrs}")
            for u in nbrs:
                if not (0 <= u < n):
                    raise AsymmetricError(f"vertex {v} lists unknown neighbor {u}")
            index_of.append({u: j for j, u in enumerate(nbrs)})
        twin = [0] * (3 * n)
        for v, nbrs in enumerate(neighbors):
            for j, u in enumerate(nbrs):
                back = index_of[u].get(v)
                if back is None:
                    raise AsymmetricError(f"vertex {v} lists {u} but not vice versa")
                twin[3 * v + j] = 3 * u + back
        nxt = [3 * (d // 3) + (d + 1) % 3 for d in range(3 * n)]
        return cls(twin, nxt)

    def _validate(self) -> None:
        n = len(self._twin)
        if n == 0 or n % 3 != 0 or len(self._next) != n:
            raise NonCubicError("dart count must be 3V with matching permutations")
        for d in range(n):
            t = self._twin[d]
            if t == d or self._twin[t] != d:
                raise NonCubicError(f"twin is not a fixed-point-free involution at dart {d}")
            if self._next[d] // 3 != d // 3:
                raise NonCubicError(f"next must preserve source vertices (dart {d})")
        # loops and parallel edges
        seen = set()
        for d in range(n):
            u, v = d // 3, self._twin[d] // 3
            if u == v:
                raise NonCubicError(f"loop at vertex {u}")
            if u < v:
                if (u, v) in seen:
                    raise NonCubicError(f"parallel edge between {u} and {v}")
                seen.add((u, v))
        # connectivity (vertex BFS over the cubic graph)
        nv = n // 3
        seen_v = [False] * nv
        stack = [0]
        seen_v[0] = True
        count = 1
        while stack:
            v = stack.pop()
            for j in range(3):
                u = self._twin[3 * v + j] // 3
                if not seen_v[u]:
                    seen_v[u] = True
                    count += 1
                    stack.append(u)
        if count != nv:
            raise DisconnectedError(f"graph has {nv - count} unreachable vertices")
        # Euler check: V - E + F = 2 on the sphere
        if self.num_vertices - self.num_edges + self.num_faces != 2:
            raise NonSphericalError(
                f"V-E+F = {self.num_vertices - self.num_edges + self.num_faces}, expected 2"
            )

    # ------------------------------------------------------------------
    # basic structure
    # ------------------------------------------------------------------

    @property
    def num_darts(self) -> int:
        return len(self._twin)

    @property
    def num_vertices(self) -> int:
        return len(self._twin) // 3

    @property
    def num_edges(self) -> int:
        return len(self._twin) // 2

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def twin(self, d: int) -> int:
        return self._twin[d]

    def next(self, d: int) -> int:
        return self._next[d]

    def prev(self, d: int) -> int:
        """Inverse rotation (clockwise step around the source vertex)."""
        return 3 * (d // 3) + (d + 2) % 3

    def source(self, d: int) -> int:
        return d // 3

    def target(self, d: int) -> int:
        return self._twin[d] // 3

    def face_next(self, d: int) -> int:
        """Next dart along the face to the left of ``d``."""
        return self._next[self._twin[d]]

    def dart(self, u: int, v: int) -> int:
        """The dart from u to v; raises if the edge does not exist."""
        for j in range(3):
            d = 3 * u + j
            if self._twin[d] // 3 == v:
                return d
        raise MapError(f"no edge between {u} and {v}")

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Face orbits as tuples of darts, each traced by ``face_next``."""
        twin, nxt = self._twin, self._next
        seen = [False] * len(twin)
        out = []
        for d0 in range(len(twin)):
            if seen[d0]:
                continue
            cyc = []
            d = d0
            while not seen[d]:
                seen[d] = True
                cyc.append(d)
                d = nxt[twin[d]]
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        fo = [0] * self.num_darts
        for i, cyc in enumerate(self.faces):
            for d in cyc:
                fo[d] = i
        return tuple(fo)

    @cached_property
    def face_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.faces)

    @cached_property
    def face_vertex_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(d // 3 for d in cyc) for cyc in self.faces)

    def face_vertices(self, f: int) -> tuple[int, ...]:
        return tuple(d // 3 for d in self.faces[f])

    def face_neighbors(self, f: int) -> tuple[int, ...]:
        """Faces across each boundary dart of ``f``, in walk order."""
        return tuple(self.face_of[self._twin[d]] for d in self.faces[f])

    @cached_property
    def edges(self) -> tuple[int, ...]:
        """One canonical dart per edge (the smaller of the pair)."""
        return tuple(d for d in range(self.num_darts) if d < self._twin[d])

    def neighbors(self, v: int) -> tuple[int, int, int]:
        return tuple(self._twin[3 * v + j] // 3 for j in range(3))

    def rotation_lists(self) -> list[list[int]]:
        return [list(self.neighbors(v)) for v in range(self.num_vertices)]

    def edge_corner_faces(self, d: int) -> tuple[int, int]:
        """The two faces at the endpoints of dart d's edge, off the edge itself.

        The first is the third face at ``source(d)``, the second at ``target(d)``.
        """
        nxt = self._next
        return (
            self.face_of[nxt[nxt[d]]],
            self.face_of[nxt[nxt[self._twin[d]]]],
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PlanarMap)
            and self._twin == other._twin
            and self._next == other._next
        )

    def __hash__(self) -> int:
        return hash((self._twin, self._next))

    def __repr__(self) -> str:
        return f"PlanarMap(V={self.num_vertices}, E={self.num_edges}, F={self.num_faces})"

    # ------------------------------------------------------------------
    # canonical codes
    # ------------------------------------------------------------------

    @cached_property
    def _next_inverse(self) -> tuple[int, ...]:
        return tuple(3 * (d // 3) + (d + 2) % 3 for d in range(self.num_darts))

    def _code_symbols(self, sigma, d0: int, best):
        """First-visit labeling walk from dart d0; None if worse than best."""
        twin = self._twin
        nv = self.num_vertices
        label = [0] * nv
        label[d0 // 3] = 1
        refs = [d0]
        out = []
        nlab = 1
        improving = best is None
        bi = 2  # best[0:2] is the face-size prefix, already matched
        i = 0
        while i < len(refs):
            d = refs[i]
            i += 1
            for _ in range(3):
                td = twin[d]
                u = td // 3
                lab = label[u]
                if lab == 0:
                    nlab += 1
                    label[u] = nlab
                    refs.append(td)
                    lab = nlab
                out.append(lab)
                if not improving:
                    b = best[bi]
                    bi += 1
                    if lab > b:
                        return None
                    if lab < b:
                        improving = True
                d = sigma[d]
        return out

    def _canonical_search(self, include_reflection: bool):
        fo = self.face_of
        fs = self.face_sizes
        twin = self._twin
        orientations = [(self._next, False)]
        if include_reflection:
            orientations.append((self._next_inverse, True))
        # prefix = face sizes left/right of the starting dart; only darts with
        # the minimal prefix can start a minimal code
        best_prefix = None
        cands = []
        for sigma, refl in orientations:
            for d in range(self.num_darts):
                a, b = fs[fo[d]], fs[fo[twin[d]]]
                if refl:
                    a, b = b, a
                p = (a, b)
                if best_prefix is None or p < best_prefix:
                    best_prefix = p
                    cands = [(d, sigma, refl, p)]
                elif p == best_prefix:
                    cands.append((d, sigma, refl, p))
        best = None
        winner = None
        for d, sigma, refl, p in cands:
            syms = self._code_symbols(sigma, d, best)
            if syms is None:
                continue
            full = [p[0], p[1]] + syms
            if best is None or full < best:
                best = full
                winner = (d, sigma, refl)
        return best, winner

    def canonical_code(self, include_reflection: bool = True) -> bytes:
        """Byte string identifying the isomorphism class of this map.

        Two maps get equal codes exactly when they are isomorphic as oriented
        maps; with ``include_reflection`` (the default) mirror images are
        identified as well.
        """
        cache = self._code_cache
        code = cache.get(include_reflection)
        if code is None:
            best, _ = self._canonical_search(include_reflection)
            code = _encode_symbols(self.num_vertices, best)
            cache[include_reflection] = code
        return code

    @cached_property
    def _code_cache(self) -> dict:
        return {}

    def canonical_form(self, include_reflection: bool = True) -> tuple["PlanarMap", list[int], bool]:
        """Relabeled copy in canonical labeling plus the dart relabeling.

        Returns ``(map, dart_map, reflected)`` where ``dart_map[old] = new``
        sends each dart to the new dart with the same source and target; when
        ``reflected`` is set the rotation was inverted, so a dart's left face
        becomes its image's right face.  Isomorphic inputs produce
        dart-for-dart identical outputs.
        """
        _, (d0, sigma, refl) = self._canonical_search(include_reflection)
        twin = self._twin
        nv = self.num_vertices
        label = [0] * nv
        label[d0 // 3] = 1
        refs = [d0]
        i = 0
        while i < len(refs):
            d = refs[i]
            i += 1
            for _ in range(3):
                td = twin[d]
                u = td // 3
                if label[u] == 0:
                    label[u] = len(refs) + 1
                    refs.append(td)
                d = sigma[d]
        rot = []
        dart_map = [0] * self.num_darts
        for new_v, r in enumerate(refs):
            row = []
            d = r
            for j in range(3):
                row.append(label[twin[d] // 3] - 1)
                dart_map[d] = 3 * new_v + j
                d = sigma[d]
            rot.append(row)
        return PlanarMap.from_rotation(rot), dart_map, refl

    # independent map-isomorphism search (used as a test oracle, kept simple)
    def is_isomorphic_to(self, other: "PlanarMap", include_reflection: bool = True) -> bool:
        """Explicit dart-by-dart isomorphism search; quadratic but direct."""
        if self.num_vertices != other.num_vertices:
            return False
        if sorted(self.face_sizes) != sorted(other.face_sizes):
            return False
        sigmas = [(other._next, False)]
        if include_reflection:
            sigmas.append((other._next_inverse, True))
        ref_syms = self._code_symbols(self._next, 0, None)
        for sigma, _ in sigmas:
            for d0 in range(other.num_darts):
                if other._code_symbols(sigma, d0, None) == ref_syms:
                    return True
        return False


def _encode_symbols(nv: int, symbols: list[int]) -> bytes:
    if nv <= 255 and all(s <= 255 for s in symbols):
        return bytes([nv]) + bytes(symbols)
    out = bytearray([0])
    for s in (nv, *symbols):
        out += s.to_bytes(2, "big")
    return bytes(out)


def map_from_faces(face_cycles: Iterable[Sequence[int]]) -> PlanarMap:
    """Assemble a map from consistently oriented face vertex-cycles.

    Every edge must be traversed exactly once in each direction over all
    cycles; the rotation at each vertex is reconstructed from face corners.
    """
    succ: dict[int, dict[int, int]] = {}
    for cyc in face_cycles:
        m = len(cyc)
        for i in range(m):
            a, v, b = cyc[i - 1], cyc[i], cyc[(i + 1) % m]
            table = succ.setdefault(v, {})
            if a in table:
                raise MapError(f"edge ({v},{a}) traversed twice in the same direction")
            table[a] = b
    n = len(succ)
    if sorted(succ) != list(range(n)):
        raise MapError("face cycles must cover vertices 0..n-1")
    rot = []
    for v in range(n):
        table = succ[v]
        if len(table) != 3:
            raise NonCubicError(f"vertex {v} has degree {len(table)}")
        start = next(iter(table))
        row = [start, table[start]]
        row.append(table[row[1]])
        if table[row[2]] != start:
            raise MapError(f"rotation at vertex {v} does not close up")
        rot.append(row)
    return PlanarMap.from_rotation(rot)


def build_dodecahedron() -> PlanarMap:
    """The unique all-pentagon map: 20 vertices, 30 edges, 12 faces."""
    # top cap: center pentagon 0..4, boundary ring a_i=5+2i (spoked), b_i=6+2i
    t = [0, 1, 2, 3, 4]
    a = [5 + 2 * i for i in range(5)]
    b = [6 + 2 * i for i in range(5)]
    p = [15 + i for i in range(5)]
    faces: list[tuple[int, ...]] = [tuple(t)]
    for i in range(5):
        j = (i + 1) % 5
        faces.append((t[j], t[i], a[i], b[i], a[j]))
    # bottom cap glued to the boundary cycle [a0,b0,a1,b1,...]; the b_i take
    # the bottom spokes
    for i in range(5):
        j = (i + 1) % 5
        faces.append((b[j], a[j], b[i], p[i], p[j]))
    faces.append(tuple(reversed(p)))
    return map_from_faces(faces)


# ----------------------------------------------------------------------
# p-vectors
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PVector:
    """Face-size census: counts[k] = number of k-gonal faces."""

    counts: Mapping[int, int]

    def __post_init__(self):
        for k, c in self.counts.items():
            if k < 3 or c < 0:
                raise MapError(f"invalid p-vector entry p_{k} = {c}")

    def __getitem__(self, k: int) -> int:
        return self.counts.get(k, 0)

    def items(self):
        return sorted(self.counts.items())

    @property
    def num_faces(self) -> int:
        return sum(self.counts.values())

    def curvature_sum(self) -> int:
        """Value of sum (6-k) p_k, which is 12 for any cubic sphere map."""
        return sum((6 - k) * c for k, c in self.counts.items())

    def is_fullerene(self) -> bool:
        return set(self.counts) <= {5, 6} and self[5] == 12

    def __str__(self) -> str:
        return "{" + ", ".join(f"p{k}={c}" for k, c in self.items()) + "}"


def p_vector(m: PlanarMap) -> PVector:
    """Face-size counts of a map, with the sphere invariants asserted."""
    counts = Counter(m.face_sizes)
    pv = PVector(dict(counts))
    if pv.num_faces != m.num_faces or sum(k * c for k, c in counts.items()) != 2 * m.num_edges:
        raise MapError("p-vector bookkeeping failed")
    if pv.curvature_sum() != 12:
        raise NonSphericalError(f"sum (6-k) p_k = {pv.curvature_sum()}, expected 12")
    return pv


def is_fullerene(m: PlanarMap) -> bool:
    return p_vector(m).is_fullerene()


# ----------------------------------------------------------------------
# 3-connectivity (polytopality by Steinitz' criterion)
# ----------------------------------------------------------------------


def _has_bridge(adj: Sequence[Sequence[int]], skip: tuple[int, int] | None) -> bool:
    """Iterative bridge detection; ``skip`` removes one undirected edge."""
    n = len(adj)
    disc = [0] * n
    low = [0] * n
    timer = 1
    for root in range(n):
        if disc[root]:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]
        # parent edge tracked by endpoint; multi-edges excluded upstream
        it_stack: list[Iterator[int]] = []
        parent = [-1] * n
        disc[root] = low[root] = timer
        timer += 1
        it_stack.append(iter(adj[root]))
        path = [root]
        while path:
            v = path[-1]
            found = False
            for u in it_stack[-1]:
                if skip and (v, u) in (skip, skip[::-1]):
                    continue
                if u == parent[v]:
                    continue
                if disc[u]:
                    low[v] = min(low[v], disc[u])
                    continue
                parent[u] = v
                disc[u] = low[u] = timer
                timer += 1
                path.append(u)
                it_stack.append(iter(adj[u]))
                found = True
                break
            if not found:
                path.pop()
                it_stack.pop()
                if path:
                    w = path[-1]
                    low[w] = min(low[w], low[v])
                    if low[v] > disc[w]:
                        return True
    return False


def check_polytopal(m: PlanarMap) -> bool:
    """True iff the underlying graph is 3-connected (Steinitz criterion).

    For cubic simple graphs vertex connectivity equals edge connectivity, so
    the check reduces to: connected with no bridge and no 2-edge-cut.
    The map is planar and simple by construction.
    """
    if m.num_vertices < 4:
        return False
    adj = m.rotation_lists()
    if _has_bridge(adj, None):
        return False
    # connectivity after removing one edge: a bridge there means a 2-edge-cut
    for d in m.edges:
        u, v = d // 3, m.twin(d) // 3
        if _is_disconnected_without(adj, (u, v)) or _has_bridge_without(adj, (u, v)):
            return False
    return True


def _is_disconnected_without(adj, edge) -> bool:
    n = len(adj)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if (v, u) in (edge, edge[::-1]):
                continue
            if not seen[u]:
                seen[u] = True
                count += 1
                stack.append(u)
    return count != n


def _has_bridge_without(adj, edge) -> bool:
    return _has_bridge(adj, edge)


# ----------------------------------------------------------------------
# planar_code I/O
# ----------------------------------------------------------------------


def encode_planar_code(maps: Iterable[PlanarMap], with_header: bool = True) -> bytes:
    """Serialize maps in the 1-byte planar_code format."""
    out = bytearray()
    if with_header:
        out += PLANAR_CODE_HEADER
    for m in maps:
        n = m.num_vertices
        if n > 255:
            raise VertexOverflowError(f"{n} vertices exceed the 1-byte planar_code limit")
        out.append(n)
        for v in range(n):
            for u in m.neighbors(v):
                out.append(u + 1)
            out.append(0)
    return bytes(out)


def decode_planar_code(data: bytes) -> list[PlanarMap]:
    """Parse a planar_code byte stream into validated maps."""
    buf = io.BytesIO(data)
    head = buf.read(len(PLANAR_CODE_HEADER))
    if head != PLANAR_CODE_HEADER:
        buf.seek(0)
        if head[:2] == b">>":
            raise MalformedHeaderError("unrecognized planar_code header")
    maps = []
    while True:
        nb = buf.read(1)
        if not nb:
            break
        n = nb[0]
        if n == 0:
            raise VertexOverflowError("2-byte planar_code records are not supported")
        rot: list[list[int]] = []
        for _ in range(n):
            row = []
            while True:
                c = buf.read(1)
                if not c:
                    raise TruncatedRecordError("record ended inside an adjacency list")
                if c[0] == 0:
                    break
                row.append(c[0] - 1)
            rot.append(row)
        maps.append(PlanarMap.from_rotation(rot))
    return maps


def write_planar_code(path, maps: Iterable[PlanarMap]) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_planar_code(maps))


def read_planar_code(path) -> list[PlanarMap]:
    with open(path, "rb") as fh:
        return decode_planar_code(fh.read())

"""Independent reference implementations used as test oracles.

Nothing here shares logic with the package's canonical-code, belt, or
fragment machinery; these are direct transcriptions of the definitions.
"""

from __future__ import annotations

import itertools

from fforge import PlanarMap


def maps_isomorphic(m1: PlanarMap, m2: PlanarMap, reflect: bool = True) -> bool:
    """Explicit dart-bijection search by constraint propagation."""
    if m1.num_darts != m2.num_darts:
        return False
    mirrors = (False, True) if reflect else (False,)
    for mirrored in mirrors:
        for d2 in range(m2.num_darts):
            if _extend_iso(m1, m2, d2, mirrored):
                return True
    return False


def _extend_iso(m1, m2, d2_0, mirrored):
    image = {0: d2_0}
    stack = [0]
    while stack:
        d1 = stack.pop()
        d2 = image[d1]
        nxt2 = m2.prev(d2) if mirrored else m2.next(d2)
        for f1, f2 in ((m1.twin(d1), m2.twin(d2)), (m1.next(d1), nxt2)):
            if f1 in image:
                if image[f1] != f2:
                    return False
            else:
                image[f1] = f2
                stack.append(f1)
    return len(set(image.values())) == m1.num_darts


def _cycle_key(seq):
    best = None
    n = len(seq)
    for rev in (False, True):
        s = list(reversed(seq)) if rev else list(seq)
        for r in range(n):
            cand = tuple(s[r:] + s[:r])
            if best is None or cand < best:
                best = cand
    return best


def brute_belts(m: PlanarMap, k: int) -> set:
    """All k-belts by exhaustive arrangement checking; small maps only."""
    sets = m.face_vertex_sets
    nf = m.num_faces
    found = set()
    for combo in itertools.combinations(range(nf), k):
        for perm in itertools.permutations(combo[1:]):
            cyc = (combo[0],) + perm
            ok = True
            for i in range(k):
                for j in range(i + 1, k):
                    touching = bool(sets[cyc[i]] & sets[cyc[j]])
                    consecutive = (j - i == 1) or (i == 0 and j == k - 1)
                    if touching != consecutive:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                total = sets[cyc[0]]
                for f in cyc[1:]:
                    total = total & sets[f]
                if not total:
                    found.add(_cycle_key(cyc))
    return found


def pentagon_ring_sites(m: PlanarMap) -> set:
    """Face sets of a pentagon surrounded by five pentagons."""
    out = set()
    for f in range(m.num_faces):
        if m.face_sizes[f] != 5:
            continue
        nbrs = m.face_neighbors(f)
        if all(m.face_sizes[g] == 5 for g in nbrs):
            out.add(frozenset((f,) + nbrs))
    return out


def triple_cap_sites(m: PlanarMap) -> set:
    """Face sets of three pentagons at a vertex with pentagon notches."""
    out = set()
    for v in range(m.num_vertices):
        fs = sorted({m.face_of[3 * v + j] for j in range(3)})
        if len(fs) != 3 or any(m.face_sizes[f] != 5 for f in fs):
            continue
        notches = set()
        good = True
        for j in range(3):
            d = 3 * v + j
            # far end of the edge leaving v along dart d
            w = m.target(d)
            wfaces = {m.face_of[3 * w + i] for i in range(3)}
            notch = wfaces - set(fs)
            if len(notch) != 1:
                good = False
                break
            g = notch.pop()
            if m.face_sizes[g] != 5:
                good = False
                break
            notches.add(g)
        if good and len(notches) == 3:
            out.add(frozenset(fs) | frozenset(notches))
    return out


def pentagon_pair_hex_corners(m: PlanarMap) -> set:
    """Face sets of two adjacent pentagons whose shared edge meets hexagons."""
    out = set()
    for d in m.edges:
        fa, fb = m.face_of[d], m.face_of[m.twin(d)]
        if m.face_sizes[fa] != 5 or m.face_sizes[fb] != 5:
            continue
        ca, cb = m.edge_corner_faces(d)
        if m.face_sizes[ca] == 6 and m.face_sizes[cb] == 6:
            out.add(frozenset((fa, fb, ca, cb)))
    return out


def pentagon_triple_arm_sites(m: PlanarMap) -> set:
    """Face sets of the five-face pattern: three pentagons at a vertex, a
    hexagon past one shared edge, a hexagon across the third pentagon."""
    out = set()
    sets = m.face_vertex_sets
    for v in range(m.num_vertices):
        fs = sorted({m.face_of[3 * v + j] for j in range(3)})
        if len(fs) != 3 or any(m.face_sizes[f] != 5 for f in fs):
            continue
        for j in range(3):
            d = 3 * v + j
            a = m.face_of[d]
            b = m.face_of[m.twin(d)]
            c = next(f for f in fs if f not in (a, b))
            w = m.target(d)
            wfaces = {m.face_of[3 * w + i] for i in range(3)}
            ell = (wfaces - {a, b}).pop()
            if m.face_sizes[ell] != 6:
                continue
            blob = sets[a] | sets[b]
            us = [
                g for g in set(m.face_neighbors(c))
                if g not in (a, b) and not (sets[g] & blob)
            ]
            if len(us) == 1 and m.face_sizes[us[0]] == 6:
                out.add(frozenset((a, b, c, ell, us[0])))
    return out


def nx_polytopal(m: PlanarMap) -> bool:
    """Planarity plus 3-connectivity via networkx."""
    import networkx as nx

    g = nx.Graph()
    for d in m.edges:
        g.add_edge(d // 3, m.twin(d) // 3)
    planar, _ = nx.check_planarity(g)
    return planar and nx.algorithms.connectivity.node_connectivity(g) >= 3


def cube_map() -> PlanarMap:
    from fforge import map_from_faces

    return map_from_faces(
        [[0, 1, 2, 3], [1, 0, 4, 5], [2, 1, 5, 6], [3, 2, 6, 7], [0, 3, 7, 4], [7, 6, 5, 4]]
    )


def barrel_c24() -> PlanarMap:
    """Hexagonal-barrel 24-vertex fullerene, built face-by-face."""
    from fforge import map_from_faces

    t = list(range(6))
    u = list(range(6, 12))
    v = list(range(12, 18))
    b = list(range(18, 24))
    faces = [tuple(t)]
    for i in range(6):
        j = (i + 1) % 6
        faces.append((t[j], t[i], u[i], v[i], u[j]))
    for i in range(6):
        j = (i + 1) % 6
        faces.append((u[j], v[i], b[i], b[j], v[j]))
    faces.append(tuple(reversed(b)))
    return map_from_faces(faces)


def ipr_c60() -> PlanarMap:
    """Icosahedral 60-vertex fullerene wound from its face spiral."""
    from fforge.engine import _windup

    pent = {1, 7, 9, 11, 13, 15, 18, 20, 22, 24, 26, 32}
    sizes = [5 if (i + 1) in pent else 6 for i in range(32)]
    m = _windup(sizes)
    assert m is not None
    return m


def leapfrog(m: PlanarMap) -> PlanarMap:
    """Truncated dual of a cubic map, an independent isolated-pentagon source.

    Vertices of the result are the darts of ``m``: each face contributes its
    reversed walk, each vertex a hexagon alternating in-darts and out-darts.
    """
    from fforge import map_from_faces

    faces = [tuple(reversed(cyc)) for cyc in m.faces]
    for v in range(m.num_vertices):
        d = m.twin(3 * v)
        hexagon = []
        for _ in range(3):
            hexagon.append(d)
            d = m.face_next(d)
            hexagon.append(d)
            d = m.twin(d)
        faces.append(tuple(hexagon))
    return map_from_faces(faces)


def two_edge_connected_cubic() -> PlanarMap:
    """Cubic planar simple graph with a 2-edge-cut (not 3-connected).

    Two copies of K4 minus an edge, joined by the two edges (2,4), (3,5).
    """
    from fforge import map_from_faces

    faces = [
        (0, 2, 1),
        (0, 1, 3),
        (4, 7, 6),
        (5, 6, 7),
        (2, 0, 3, 5, 7, 4),
        (2, 4, 6, 5, 3, 1),
    ]
    return map_from_faces(faces)

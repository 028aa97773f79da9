"""Sweep-line boolean clipping of polygon sets (Martinez-Rueda style).

The engine works in three passes over plain ``(x, y)`` tuples:

1. each input polygon set is swept on its own, splitting segments at every
   crossing and annotating each with the region's fill state above and
   below it (even-odd, so holes are just rings);
2. both annotated segment sets are swept together, splitting at mutual
   crossings and annotating every segment with the *other* set's fill
   state, with exactly coincident segments merged;
3. a segment is kept iff the requested operation's predicate differs
   between the segment's two sides, and the kept segments are chained back
   into rings.

Ring assembly then snaps coordinates to the 1e-9 degree grid, splits rings
that pinch at a repeated vertex, derives exterior/hole roles from nesting
parity and orients exteriors counterclockwise, holes clockwise.  The result
is deterministic for fixed input, and symmetric operations are bitwise
symmetric because intersection points are always computed along the
lexicographically smaller of the two segments.

Point coincidence inside the sweep uses a 1e-10 tolerance, one decade below
the output snap grid.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Sequence, Tuple

Pt = Tuple[float, float]
Ring = List[Pt]

EPS = 1e-10
SNAP_DECIMALS = 9  # output vertex grid: 1e-9 degrees

OP_INTERSECTION = "intersection"
OP_UNION = "union"
OP_DIFFERENCE = "difference"
_OPS = (OP_INTERSECTION, OP_UNION, OP_DIFFERENCE)


class ClippingError(RuntimeError):
    """The sweep could not make progress; input violates its preconditions."""


# ---------------------------------------------------------------------------
# Tolerant point predicates


def _pts_equal(a: Pt, b: Pt) -> bool:
    return abs(a[0] - b[0]) < EPS and abs(a[1] - b[1]) < EPS


def _pt_compare(a: Pt, b: Pt) -> int:
    if abs(a[0] - b[0]) < EPS:
        if abs(a[1] - b[1]) < EPS:
            return 0
        return -1 if a[1] < b[1] else 1
    return -1 if a[0] < b[0] else 1


def _collinear(p1: Pt, p2: Pt, p3: Pt) -> bool:
    dx1 = p1[0] - p2[0]
    dy1 = p1[1] - p2[1]
    dx2 = p2[0] - p3[0]
    dy2 = p2[1] - p3[1]
    return abs(dx1 * dy2 - dx2 * dy1) < EPS


def _above_or_on(pt: Pt, left: Pt, right: Pt) -> bool:
    return (right[0] - left[0]) * (pt[1] - left[1]) - (right[1] - left[1]) * (
        pt[0] - left[0]
    ) >= -EPS


def _between(pt: Pt, left: Pt, right: Pt) -> bool:
    dpx = pt[0] - left[0]
    dpy = pt[1] - left[1]
    drx = right[0] - left[0]
    dry = right[1] - left[1]
    dot = dpx * drx + dpy * dry
    if dot < EPS:
        return False
    if dot - (drx * drx + dry * dry) > -EPS:
        return False
    return True


def _along(value: float) -> int:
    # -2/-1/0/1/2: before start / at start / inside / at end / past end
    if value <= -EPS:
        return -2
    if value < EPS:
        return -1
    if value - 1 <= -EPS:
        return 0
    if value - 1 < EPS:
        return 1
    return 2


def _lines_intersect(a0: Pt, a1: Pt, b0: Pt, b1: Pt):
    """Intersection of two segments' supporting lines.

    Returns None when (nearly) parallel, else (along_a, along_b, point).
    The point is evaluated along the lexicographically smaller segment so
    that swapping the two inputs yields the bitwise-identical point.
    """
    adx = a1[0] - a0[0]
    ady = a1[1] - a0[1]
    bdx = b1[0] - b0[0]
    bdy = b1[1] - b0[1]
    axb = adx * bdy - ady * bdx
    if abs(axb) < EPS:
        return None
    dx = a0[0] - b0[0]
    dy = a0[1] - b0[1]
    ta = (bdx * dy - bdy * dx) / axb
    tb = (adx * dy - ady * dx) / axb
    if (a0, a1) <= (b0, b1):
        pt = (a0[0] + ta * adx, a0[1] + ta * ady)
    else:
        pt = (b0[0] + tb * bdx, b0[1] + tb * bdy)
    return _along(ta), _along(tb), pt


# ---------------------------------------------------------------------------
# Sweep machinery


class _Segment:
    __slots__ = ("start", "end", "my_above", "my_below", "other_above", "other_below")

    def __init__(self, start: Pt, end: Pt, my_above=None, my_below=None):
        self.start = start
        self.end = end
        self.my_above = my_above
        self.my_below = my_below
        self.other_above = None
        self.other_below = None


class _Node:
    """Doubly-linked node used both for sweep events and status entries."""

    __slots__ = ("is_start", "pt", "seg", "primary", "other", "ev", "status", "prev", "next")

    def __init__(self, is_start=False, pt=None, seg=None, primary=False, other=None, ev=None):
        self.is_start = is_start
        self.pt = pt
        self.seg = seg
        self.primary = primary
        self.other = other
        self.ev = ev
        self.status = None
        self.prev = None
        self.next = None

    def unlink(self):
        self.prev.next = self.next
        if self.next is not None:
            self.next.prev = self.prev
        self.prev = None
        self.next = None


class _LinkedList:
    __slots__ = ("root",)

    def __init__(self):
        self.root = _Node()

    def exists(self, node: Optional[_Node]) -> bool:
        return node is not None and node is not self.root

    def is_empty(self) -> bool:
        return self.root.next is None

    def head(self) -> Optional[_Node]:
        return self.root.next

    def insert_before(self, node: _Node, goes_before: Callable[[_Node], bool]) -> None:
        last = self.root
        here = self.root.next
        while here is not None:
            if goes_before(here):
                node.prev = here.prev
                node.next = here
                here.prev.next = node
                here.prev = node
                return
            last = here
            here = here.next
        last.next = node
        node.prev = last
        node.next = None

    def find_transition(self, goes_before: Callable[[_Node], bool]):
        prev = self.root
        here = self.root.next
        while here is not None:
            if goes_before(here):
                break
            prev = here
            here = here.next

        def insert(node: _Node) -> _Node:
            node.prev = prev
            node.next = here
            prev.next = node
            if here is not None:
                here.prev = node
            return node

        before = None if prev is self.root else prev
        return before, here, insert


class _Sweep:
    """One sweep pass; ``self_fill`` selects fill-annotation mode (pass 1)
    versus cross-annotation mode (pass 2)."""

    def __init__(self, self_fill: bool):
        self.self_fill = self_fill
        self.events = _LinkedList()

    # -- event queue ---------------------------------------------------

    @staticmethod
    def _event_compare(p1_start: bool, p11: Pt, p12: Pt, p2_start: bool, p21: Pt, p22: Pt) -> int:
        comp = _pt_compare(p11, p21)
        if comp != 0:
            return comp
        if _pts_equal(p12, p22):
            return 0
        if p1_start != p2_start:
            return 1 if p1_start else -1
        return (
            1
            if _above_or_on(p12, p21 if p2_start else p22, p22 if p2_start else p21)
            else -1
        )

    def _event_add(self, ev: _Node, other_pt: Pt) -> None:
        def goes_before(here: _Node) -> bool:
            return (
                self._event_compare(ev.is_start, ev.pt, other_pt, here.is_start, here.pt, here.other.pt)
                < 0
            )

        self.events.insert_before(ev, goes_before)

    def _event_add_segment(self, seg: _Segment, primary: bool) -> _Node:
        ev_start = _Node(is_start=True, pt=seg.start, seg=seg, primary=primary)
        self._event_add(ev_start, seg.end)
        ev_end = _Node(is_start=False, pt=seg.end, seg=seg, primary=primary, other=ev_start)
        ev_start.other = ev_end
        self._event_add(ev_end, ev_start.pt)
        return ev_start

    def _event_update_end(self, ev: _Node, end: Pt) -> None:
        ev.other.unlink()
        ev.seg.end = end
        ev.other.pt = end
        self._event_add(ev.other, ev.pt)

    def _event_divide(self, ev: _Node, pt: Pt) -> _Node:
        # Own fill is constant along a segment so the tail inherits it; the
        # cross fill changes exactly at crossings, so it is left unset and
        # recomputed when the tail's start event is processed.
        tail = _Segment(pt, ev.seg.end, ev.seg.my_above, ev.seg.my_below)
        self._event_update_end(ev, pt)
        return self._event_add_segment(tail, ev.primary)

    # -- status line ---------------------------------------------------

    @staticmethod
    def _status_compare(ev1: _Node, ev2: _Node) -> int:
        a1, a2 = ev1.seg.start, ev1.seg.end
        b1, b2 = ev2.seg.start, ev2.seg.end
        if _collinear(a1, b1, b2):
            if _collinear(a2, b1, b2):
                return 1
            return 1 if _above_or_on(a2, b1, b2) else -1
        return 1 if _above_or_on(a1, b1, b2) else -1

    # -- intersections -------------------------------------------------

    def _check_intersection(self, ev1: _Node, ev2: _Node) -> Optional[_Node]:
        """Split segments where they cross; returns ev2 when the two
        segments exactly coincide (the caller merges fills)."""
        a1, a2 = ev1.seg.start, ev1.seg.end
        b1, b2 = ev2.seg.start, ev2.seg.end
        hit = _lines_intersect(a1, a2, b1, b2)
        if hit is None:
            # Parallel: only interesting when collinear with overlap.
            if not _collinear(a1, a2, b1):
                return None
            if _pts_equal(a1, b2) or _pts_equal(a2, b1):
                return None
            a1_is_b1 = _pts_equal(a1, b1)
            a2_is_b2 = _pts_equal(a2, b2)
            if a1_is_b1 and a2_is_b2:
                return ev2
            a1_between = not a1_is_b1 and _between(a1, b1, b2)
            a2_between = not a2_is_b2 and _between(a2, b1, b2)
            if a1_is_b1:
                if a2_between:
                    self._event_divide(ev2, a2)
                else:
                    self._event_divide(ev1, b2)
                return ev2
            if a1_between:
                if not a2_is_b2:
                    if a2_between:
                        self._event_divide(ev2, a2)
                    else:
                        self._event_divide(ev1, b2)
                self._event_divide(ev2, a1)
            return None
        along_a, along_b, pt = hit
        if along_a == 0:
            if along_b == -1:
                self._event_divide(ev1, b1)
            elif along_b == 0:
                self._event_divide(ev1, pt)
            elif along_b == 1:
                self._event_divide(ev1, b2)
        if along_b == 0:
            if along_a == -1:
                self._event_divide(ev2, a1)
            elif along_a == 0:
                self._event_divide(ev2, pt)
            elif along_a == 1:
                self._event_divide(ev2, a2)
        return None

    # -- input ----------------------------------------------------------

    def add_ring(self, ring: Sequence[Pt]) -> None:
        """Add one ring (closed or open; winding irrelevant, fill is even-odd)."""
        pt2 = ring[-1]
        for i in range(len(ring)):
            pt1, pt2 = pt2, ring[i]
            forward = _pt_compare(pt1, pt2)
            if forward == 0:
                continue
            seg = _Segment(pt1 if forward < 0 else pt2, pt2 if forward < 0 else pt1)
            self._event_add_segment(seg, True)

    def add_annotated(self, seg: _Segment, primary: bool) -> None:
        copy = _Segment(seg.start, seg.end, seg.my_above, seg.my_below)
        self._event_add_segment(copy, primary)

    # -- the sweep -------------------------------------------------------

    def run(self) -> List[_Segment]:
        status = _LinkedList()
        out: List[_Segment] = []
        events = self.events

        while not events.is_empty():
            ev = events.head()
            if ev.is_start:
                def goes_before(here: _Node, ev=ev) -> bool:
                    return self._status_compare(ev, here.ev) > 0

                above_node, below_node, insert = status.find_transition(goes_before)
                above = above_node.ev if above_node is not None else None
                below = below_node.ev if below_node is not None else None

                merged = None
                if above is not None:
                    merged = self._check_intersection(ev, above)
                if merged is None and below is not None:
                    merged = self._check_intersection(ev, below)

                if merged is not None:
                    # ev exactly coincides with an existing segment: fold its
                    # fill into the survivor and drop the duplicate.
                    seg = ev.seg
                    if self.self_fill:
                        toggle = seg.my_below is None or seg.my_above != seg.my_below
                        if toggle:
                            merged.seg.my_above = not merged.seg.my_above
                    else:
                        merged.seg.other_above = seg.my_above
                        merged.seg.other_below = seg.my_below
                    ev.other.unlink()
                    ev.unlink()

                if events.head() is not ev:
                    # Splitting created earlier events; reprocess.
                    continue

                if self.self_fill:
                    seg = ev.seg
                    toggle = seg.my_below is None or seg.my_above != seg.my_below
                    seg.my_below = False if below is None else below.seg.my_above
                    seg.my_above = (not seg.my_below) if toggle else seg.my_below
                else:
                    if ev.seg.other_above is None:
                        if below is None:
                            inside = False
                        elif ev.primary == below.primary:
                            inside = below.seg.other_above
                        else:
                            inside = below.seg.my_above
                        ev.seg.other_above = inside
                        ev.seg.other_below = inside
                ev.other.status = insert(_Node(ev=ev))
            else:
                st = ev.status
                if st is None:
                    raise ClippingError(
                        "sweep lost a segment status; input likely has "
                        "degenerate geometry below the tolerance"
                    )
                if status.exists(st.prev) and status.exists(st.next):
                    self._check_intersection(st.prev.ev, st.next.ev)
                st.unlink()
                seg = ev.seg
                if not ev.primary:
                    seg.my_above, seg.other_above = seg.other_above, seg.my_above
                    seg.my_below, seg.other_below = seg.other_below, seg.my_below
                out.append(seg)
            events.head().unlink()
        return out


# ---------------------------------------------------------------------------
# Pipeline stages


def _annotate(rings: Sequence[Sequence[Pt]]) -> List[_Segment]:
    sweep = _Sweep(self_fill=True)
    for ring in rings:
        sweep.add_ring(ring)
    return sweep.run()


def _combine(seg_a: Sequence[_Segment], seg_b: Sequence[_Segment]) -> List[_Segment]:
    sweep = _Sweep(self_fill=False)
    for seg in seg_a:
        sweep.add_annotated(seg, True)
    for seg in seg_b:
        sweep.add_annotated(seg, False)
    return sweep.run()


def _select(segments: Sequence[_Segment], op: str) -> List[_Segment]:
    if op == OP_INTERSECTION:
        predicate = lambda in_a, in_b: in_a and in_b
    elif op == OP_UNION:
        predicate = lambda in_a, in_b: in_a or in_b
    else:
        predicate = lambda in_a, in_b: in_a and not in_b
    kept = []
    for seg in segments:
        other_above = bool(seg.other_above)
        other_below = bool(seg.other_below)
        above = predicate(bool(seg.my_above), other_above)
        below = predicate(bool(seg.my_below), other_below)
        if above != below:
            kept.append(_Segment(seg.start, seg.end))
    return kept


def _chain(segments: Sequence[_Segment]) -> List[Ring]:
    """Stitch kept segments into closed regions (returned open, i.e. the
    first point is not repeated), merging collinear runs."""
    chains: List[Ring] = []
    regions: List[Ring] = []

    for seg in segments:
        p1, p2 = seg.start, seg.end
        if _pts_equal(p1, p2):
            continue

        first = None
        second = None
        for index, chain in enumerate(chains):
            head, tail = chain[0], chain[-1]
            if _pts_equal(head, p1):
                match = (index, True, True)
            elif _pts_equal(head, p2):
                match = (index, True, False)
            elif _pts_equal(tail, p1):
                match = (index, False, True)
            elif _pts_equal(tail, p2):
                match = (index, False, False)
            else:
                continue
            if first is None:
                first = match
            else:
                second = match
                break

        if first is None:
            chains.append([p1, p2])
            continue

        if second is None:
            # Grow one chain; close it if the new point reaches its far end.
            index, at_head, matches_p1 = first
            pt = p2 if matches_p1 else p1
            chain = chains[index]
            grow = chain[0] if at_head else chain[-1]
            grow2 = chain[1] if at_head else chain[-2]
            oppo = chain[-1] if at_head else chain[0]
            oppo2 = chain[-2] if at_head else chain[1]
            if _collinear(grow2, grow, pt):
                if at_head:
                    chain.pop(0)
                else:
                    chain.pop()
                grow = grow2
            if _pts_equal(oppo, pt):
                del chains[index]
                if _collinear(oppo2, oppo, grow):
                    if at_head:
                        chain.pop()
                    else:
                        chain.pop(0)
                regions.append(chain)
                continue
            if at_head:
                chain.insert(0, pt)
            else:
                chain.append(pt)
            continue

        # The segment bridges two chains; join them.
        def reverse_chain(i: int) -> None:
            chains[i].reverse()

        def append_chain(i1: int, i2: int) -> None:
            chain1, chain2 = chains[i1], chains[i2]
            tail = chain1[-1]
            tail2 = chain1[-2]
            head = chain2[0]
            head2 = chain2[1]
            if _collinear(tail2, tail, head):
                chain1.pop()
                tail = tail2
            if _collinear(tail, head, head2):
                chain2.pop(0)
            chains[i1] = chain1 + chain2
            del chains[i2]

        f_index, f_head, _ = first
        s_index, s_head, _ = second
        reverse_f = len(chains[f_index]) < len(chains[s_index])
        if f_head:
            if s_head:
                if reverse_f:
                    reverse_chain(f_index)
                    append_chain(f_index, s_index)
                else:
                    reverse_chain(s_index)
                    append_chain(s_index, f_index)
            else:
                append_chain(s_index, f_index)
        else:
            if s_head:
                append_chain(f_index, s_index)
            else:
                if reverse_f:
                    reverse_chain(f_index)
                    append_chain(s_index, f_index)
                else:
                    reverse_chain(s_index)
                    append_chain(f_index, s_index)

    return regions


# ---------------------------------------------------------------------------
# Ring assembly


def _ring_area_open(pts: Sequence[Pt]) -> float:
    total = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return 0.5 * total


def _dedupe_cyclic(pts: Ring) -> Ring:
    out: Ring = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _split_pinched(pts: Ring) -> List[Ring]:
    """Split rings that revisit a vertex into simple sub-rings."""
    out: List[Ring] = []
    work = [pts]
    while work:
        ring = work.pop()
        if len(ring) < 3:
            out.append(ring)
            continue
        seen: dict = {}
        split = False
        for idx, p in enumerate(ring):
            if p in seen:
                j = seen[p]
                work.append(ring[j:idx])
                work.append(ring[:j] + ring[idx:])
                split = True
                break
            seen[p] = idx
        if not split:
            out.append(ring)
    return out


def _point_on_closed_ring(pt: Pt, ring: Sequence[Pt]) -> bool:
    px, py = pt
    for i in range(len(ring) - 1):
        ax, ay = ring[i]
        bx, by = ring[i + 1]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross == 0.0 and min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by):
            return True
    return False


def _point_in_closed_ring(pt: Pt, ring: Sequence[Pt]) -> bool:
    px, py = pt
    inside = False
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        if (y1 > py) != (y2 > py):
            x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_int:
                inside = not inside
    return inside


def _probe_point(ring: Ring, other_closed: List[Ring]) -> Pt:
    """Pick a point of the ring's boundary that avoids every other ring's
    boundary so nesting parity is unambiguous."""
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
        if not any(_point_on_closed_ring(mid, other) for other in other_closed):
            return mid
    return ring[0]


def _ring_sort_key(ring: Ring):
    xs = [p[0] for p in ring]
    ys = [p[1] for p in ring]
    return (min(xs), min(ys), max(xs), max(ys), ring[0])


def _assemble(raw_rings: Sequence[Ring]) -> List[Tuple[Ring, List[Ring]]]:
    rings: List[Ring] = []
    for raw in raw_rings:
        pts = [(round(x, SNAP_DECIMALS), round(y, SNAP_DECIMALS)) for x, y in raw]
        pts = _dedupe_cyclic(pts)
        for part in _split_pinched(pts):
            if len(part) >= 3 and _ring_area_open(part) != 0.0:
                rings.append(part)
    if not rings:
        return []

    closed = [r + [r[0]] for r in rings]
    containers: List[List[int]] = []
    for i, ring in enumerate(rings):
        others = [closed[j] for j in range(len(rings)) if j != i]
        probe = _probe_point(ring, others)
        inside = [
            j
            for j in range(len(rings))
            if j != i and _point_in_closed_ring(probe, closed[j])
        ]
        containers.append(inside)
    depth = [len(c) for c in containers]

    shells: dict[int, List[int]] = {i: [] for i in range(len(rings)) if depth[i] % 2 == 0}
    for i in range(len(rings)):
        if depth[i] % 2 == 1:
            parent = max(containers[i], key=lambda j: (depth[j], -j))
            shells[parent].append(i)

    def finish(index: int, make_ccw: bool) -> Ring:
        pts = list(rings[index])
        area = _ring_area_open(pts)
        if (area > 0) != make_ccw:
            pts.reverse()
        k = pts.index(min(pts))
        pts = pts[k:] + pts[:k]
        pts.append(pts[0])
        return pts

    polygons = []
    for shell_index in sorted(shells, key=lambda i: _ring_sort_key(rings[i])):
        exterior = finish(shell_index, make_ccw=True)
        holes = [
            finish(h, make_ccw=False)
            for h in sorted(shells[shell_index], key=lambda i: _ring_sort_key(rings[i]))
        ]
        polygons.append((exterior, holes))
    return polygons


# ---------------------------------------------------------------------------
# Public entry point


def boolean_overlay(
    subject: Sequence[Sequence[Pt]], clipping: Sequence[Sequence[Pt]], op: str
) -> List[Tuple[Ring, List[Ring]]]:
    """Boolean combination of two even-odd ring sets.

    ``subject`` and ``clipping`` are sequences of rings (closed or open);
    returns polygons as ``(exterior, holes)`` with closed, snapped rings,
    exterior counterclockwise and holes clockwise.  May be empty.
    """
    if op not in _OPS:
        raise ValueError(f"unknown overlay operation {op!r}")
    if not subject and not clipping:
        return []
    seg_a = _annotate(subject)
    seg_b = _annotate(clipping)
    combined = _combine(seg_a, seg_b)
    kept = _select(combined, op)
    return _assemble(_chain(kept))

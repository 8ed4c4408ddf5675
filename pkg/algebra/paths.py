# algebra/paths.py
from __future__ import annotations
import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Literal, Optional, Sequence, Set, Tuple

import networkx as nx

from algebra.action import GlobalAction, Point, PointedAction
from algebra.errors import EndpointMismatch, GlobactError
from common.audit import log_event
from common.config import CAP_STEPS

logger = logging.getLogger("algebra.paths")

Word = Tuple[Point, ...]


@dataclass(frozen=True)
class Path:
    """
    Stable path stored as its window [x_ld, ..., x_ud]; constant to the left of
    ld and to the right of ud. Degrees are canonical: the window never starts or
    ends with a repeated point, and constant paths are single points at ld = 0.
    """
    points: Tuple[Point, ...]
    ld: int = 0

    def __post_init__(self):
        pts = list(self.points)
        if not pts:
            raise ValueError("a path needs at least one point")
        ld = self.ld
        while len(pts) > 1 and pts[0] == pts[1]:
            pts.pop(0)
            ld += 1
        while len(pts) > 1 and pts[-1] == pts[-2]:
            pts.pop()
        if len(pts) == 1:
            ld = 0
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "ld", ld)

    @classmethod
    def constant(cls, x: Point) -> "Path":
        return cls((x,))

    @property
    def ud(self) -> int:
        return self.ld + len(self.points) - 1

    @property
    def is_constant(self) -> bool:
        return len(self.points) == 1

    def value_at(self, k: int) -> Point:
        if k <= self.ld:
            return self.points[0]
        if k >= self.ud:
            return self.points[-1]
        return self.points[k - self.ld]

    def values(self, lo: int, hi: int) -> List[Point]:
        return [self.value_at(k) for k in range(lo, hi + 1)]

    def validate(self, action: GlobalAction) -> bool:
        if any(x not in action for x in self.points):
            return False
        return all(action.adjacent(x, y) for x, y in zip(self.points, self.points[1:]))

    def to_json(self) -> Dict[str, object]:
        return {"ld": self.ld, "points": [list(p) if isinstance(p, tuple) else p for p in self.points]}


def in_point(w: Path) -> Point:
    return w.points[0]


def ter_point(w: Path) -> Point:
    return w.points[-1]


def compose(w: Path, w2: Path) -> Path:
    """w followed by w2; requires ter(w) = in(w2)."""
    if ter_point(w) != in_point(w2):
        raise EndpointMismatch(f"ter {ter_point(w)!r} != in {in_point(w2)!r}")
    if w.is_constant:
        return w2
    if w2.is_constant:
        return w
    return Path(w.points + w2.points[1:], w.ld)


def inverse(w: Path) -> Path:
    if w.is_constant:
        return w
    return Path(tuple(reversed(w.points)), -w.ud)


def translate(w: Path, k: int) -> Path:
    if w.is_constant:
        return w
    return Path(w.points, w.ld + k)


def reduce_word(points: Sequence[Point]) -> Word:
    out: List[Point] = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    return tuple(out)


def reduced(w: Path) -> Word:
    return reduce_word(w.points)


def elementary_neighbors(w: Path, action: GlobalAction) -> Set[Path]:
    """
    One elementary move at a single position: (x,x,y) <-> (x,y,y) and
    (x,y,x) <-> (x,x,x). The identity move is left implicit.
    """
    lo, hi = w.ld - 2, w.ud + 2
    vals = w.values(lo, hi)
    out: Set[Path] = set()
    for pos in range(1, len(vals) - 1):
        left, mid, right = vals[pos - 1], vals[pos], vals[pos + 1]
        candidates: List[Point] = []
        if left == mid and right != mid:
            candidates.append(right)
        if mid == right and left != mid:
            candidates.append(left)
        if left == right and mid != left:
            candidates.append(left)
        if left == mid == right:
            candidates.extend(action.neighbors(mid))
        for new in candidates:
            if not (action.adjacent(left, new) and action.adjacent(new, right)):
                continue
            changed = list(vals)
            changed[pos] = new
            out.add(Path(tuple(changed), lo))
    return out


# --- one-step moves on stutter-free windows ---

def one_step_moves(word: Word, action: GlobalAction) -> Iterator[Word]:
    """
    Homotopies changing one interior value: replace y by y' inside a frame
    (a,y,c) -> (a,y',c) when {a,y,y'} and {y,y',c} each lie in one local orbit,
    plus the backtrack and triangle insertions that undo the collapsing cases.
    Endpoints never move.
    """
    k = len(word)
    same = action.same_local_orbit
    for i in range(1, k - 1):
        if word[i - 1] == word[i + 1]:
            yield word[:i] + word[i + 2:]
    for i in range(1, k - 1):
        a, y, c = word[i - 1], word[i], word[i + 1]
        for y2 in action.neighbors(y):
            if same((a, y, y2)) and same((y, y2, c)):
                yield reduce_word(word[:i] + (y2,) + word[i + 1:])
    for i in range(k):
        x = word[i]
        for y in action.neighbors(x):
            yield word[:i + 1] + (y, x) + word[i + 1:]
    for i in range(k - 1):
        a, c = word[i], word[i + 1]
        for y in action.neighbors(a):
            if y != c and same((a, y, c)):
                yield word[:i + 1] + (y,) + word[i + 1:]


@dataclass(frozen=True)
class HomotopyTrace:
    """Stutter-free windows, consecutive ones one move apart."""
    paths: Tuple[Path, ...]

    def verify(self, action: GlobalAction) -> bool:
        if not self.paths:
            return False
        first = self.paths[0]
        for p in self.paths:
            if in_point(p) != in_point(first) or ter_point(p) != ter_point(first):
                return False
            if not p.validate(action):
                return False
        for a, b in zip(self.paths, self.paths[1:]):
            if reduced(b) not in set(one_step_moves(reduced(a), action)):
                return False
        return True

    def reversed(self) -> "HomotopyTrace":
        return HomotopyTrace(tuple(reversed(self.paths)))

    def then(self, other: "HomotopyTrace") -> "HomotopyTrace":
        if reduced(self.paths[-1]) != reduced(other.paths[0]):
            raise EndpointMismatch("traces do not meet")
        return HomotopyTrace(self.paths + other.paths[1:])

    def to_json(self) -> List[Dict[str, object]]:
        return [p.to_json() for p in self.paths]


@dataclass(frozen=True)
class HomotopyResult:
    verdict: Literal["yes", "no", "undecided"]
    trace: Optional[HomotopyTrace] = None
    explored: int = 0


def _chain(parent: Dict[Word, Optional[Word]], node: Word) -> List[Word]:
    out = []
    cur: Optional[Word] = node
    while cur is not None:
        out.append(cur)
        cur = parent[cur]
    return out


def stably_homotopic(w: Path, w2: Path, action: GlobalAction, max_steps: Optional[int] = None,
                     max_window: Optional[int] = None) -> HomotopyResult:
    """
    Bidirectional best-first search (shortest windows first) over one-step
    moves. "no" means the reachable set within the window cap ran out.
    """
    if in_point(w) != in_point(w2) or ter_point(w) != ter_point(w2):
        raise EndpointMismatch("paths must share both endpoints")
    max_steps = max_steps or CAP_STEPS
    max_window = max_window or 3 * max(len(w.points), len(w2.points))
    start, goal = reduced(w), reduced(w2)
    if start == goal:
        return HomotopyResult("yes", HomotopyTrace((Path(start),)), 0)
    parents = ({start: None}, {goal: None})
    heaps: Tuple[list, list] = ([(len(start), 0, start)], [(len(goal), 0, goal)])
    counter = itertools.count(1)
    steps = 0
    side = 0
    meet: Optional[Word] = None
    while heaps[0] and heaps[1]:
        side = 0 if len(heaps[0]) <= len(heaps[1]) else 1
        _, _, state = heapq.heappop(heaps[side])
        steps += 1
        if steps > max_steps:
            log_event("SEARCH_DONE", source="algebra.paths", verdict="undecided", explored=steps)
            return HomotopyResult("undecided", None, steps)
        own, other = parents[side], parents[1 - side]
        for nxt in one_step_moves(state, action):
            if len(nxt) > max_window or nxt in own:
                continue
            own[nxt] = state
            if nxt in other:
                meet = nxt
                break
            heapq.heappush(heaps[side], (len(nxt), next(counter), nxt))
        if meet is not None:
            break
    if meet is None:
        log_event("SEARCH_DONE", source="algebra.paths", verdict="no", explored=steps)
        return HomotopyResult("no", None, steps)
    forward = list(reversed(_chain(parents[0], meet)))
    backward = _chain(parents[1], meet)[1:]
    trace = HomotopyTrace(tuple(Path(word) for word in forward + backward))
    log_event("SEARCH_DONE", source="algebra.paths", verdict="yes", explored=steps, length=len(trace.paths))
    return HomotopyResult("yes", trace, steps)


# --- pi0 ---

@dataclass(frozen=True)
class Pi0Result:
    classes: Tuple[Tuple[Point, ...], ...]
    base_class: Optional[int] = None

    @property
    def sizes(self) -> List[int]:
        return [len(c) for c in self.classes]

    def class_of(self, x: Point) -> int:
        for k, c in enumerate(self.classes):
            if x in c:
                return k
        raise KeyError(x)


def pi0(action: GlobalAction, base: Optional[Point] = None) -> Pi0Result:
    graph = nx.Graph()
    graph.add_nodes_from(action.carrier)
    for alpha in action.indices:
        for orbit in action.orbits(alpha):
            graph.add_edges_from(zip(orbit, orbit[1:]))
    comps = [tuple(sorted(c, key=action.position)) for c in nx.connected_components(graph)]
    comps.sort(key=lambda c: action.position(c[0]))
    base_class = None
    if base is not None:
        base_class = next(k for k, c in enumerate(comps) if base in c)
    return Pi0Result(tuple(comps), base_class)


# --- loops and pi1 by search ---

def enumerate_loops(action: GlobalAction, base: Point, max_length: int) -> List[Word]:
    """Stutter-free loops at base with at most max_length steps, constant loop first."""
    out: List[Word] = [(base,)]

    def extend(word: Word) -> None:
        steps = len(word) - 1
        if steps >= max_length:
            return
        for y in action.neighbors(word[-1]):
            nxt = word + (y,)
            if y == base:
                out.append(nxt)
            extend(nxt)

    extend((base,))
    return out


def edge_loops(action: GlobalAction, base: Point) -> List[Word]:
    """
    One loop per edge outside a BFS tree: tree path to u, the edge u-v, tree
    path back from v. Together they generate every loop at base.
    """
    graph = nx.Graph()
    graph.add_nodes_from(action.carrier)
    for x in action.carrier:
        graph.add_edges_from((x, y) for y in action.neighbors(x))
    parent = dict(nx.bfs_predecessors(graph, base))
    reachable = set(parent) | {base}

    def to_base(x: Point) -> Word:
        out = [x]
        while out[-1] != base:
            out.append(parent[out[-1]])
        return tuple(out)

    loops = []
    for u, v in graph.edges():
        if u == v or parent.get(u) == v or parent.get(v) == u:
            continue
        if not {u, v} <= reachable:
            continue
        loops.append(tuple(reversed(to_base(u))) + to_base(v))
    loops.sort(key=lambda w: (len(w), [action.position(p) for p in w]))
    return loops


class SearchUndecided(GlobactError):
    pass


@dataclass
class _LoopClassifier:
    action: GlobalAction
    max_window: int
    max_steps: int
    label: Dict[Word, int] = field(default_factory=dict)
    reps: List[Word] = field(default_factory=list)
    steps: int = 0

    def classify(self, word: Word, allow_new: bool = True, slack: int = 0) -> Optional[int]:
        if word in self.label:
            return self.label[word]
        cap = max(self.max_window, len(word) + slack)
        seen = {word}
        heap = [(len(word), 0, word)]
        counter = itertools.count(1)
        hit: Optional[int] = None
        while heap and hit is None:
            _, _, state = heapq.heappop(heap)
            self.steps += 1
            if self.steps > self.max_steps:
                raise SearchUndecided(f"step cap {self.max_steps} reached")
            for nxt in one_step_moves(state, self.action):
                if len(nxt) > cap or nxt in seen:
                    continue
                if nxt in self.label:
                    hit = self.label[nxt]
                    break
                seen.add(nxt)
                heapq.heappush(heap, (len(nxt), next(counter), nxt))
        if hit is None:
            if not allow_new:
                return None
            hit = len(self.reps)
            self.reps.append(word)
        for s in seen:
            self.label[s] = hit
        return hit


@dataclass(frozen=True)
class Pi1SearchResult:
    verdict: Literal["ok", "undecided"]
    representatives: Tuple[Path, ...] = ()
    table: Tuple[Tuple[int, ...], ...] = ()
    loops_checked: int = 0
    reason: str = ""

    @property
    def order(self) -> int:
        return len(self.representatives)


def check_group_table(table: Sequence[Sequence[int]]) -> List[str]:
    """Identity 0, inverses, associativity."""
    m = len(table)
    problems = []
    if any(len(row) != m for row in table):
        return ["table is not square"]
    if any(table[0][j] != j or table[j][0] != j for j in range(m)):
        problems.append("class 0 is not an identity")
    for i in range(m):
        if 0 not in table[i]:
            problems.append(f"class {i} has no right inverse")
    for a, b, c in itertools.product(range(m), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            problems.append(f"associativity fails at {(a, b, c)}")
            break
    return problems


def pi1_by_search(pointed: PointedAction, max_loop_length: int = 3, max_window: Optional[int] = None,
                  max_steps: Optional[int] = None) -> Pi1SearchResult:
    """
    Loop classes at the base under bounded homotopy search, with the table
    induced by composition. Requires a path-connected action. Undecided when
    some edge loop falls outside the classes found, since the enumerated
    loops then need not generate pi1.
    """
    action, base = pointed.action, pointed.base
    components = pi0(action, base)
    if len(components.classes) != 1:
        raise GlobactError(f"action has {len(components.classes)} path components; pi1 search needs one")
    cls = _LoopClassifier(action, max_window or max_loop_length + 2, max_steps or CAP_STEPS)
    loops = enumerate_loops(action, base, max_loop_length)
    try:
        for word in loops:
            cls.classify(word)
        for word in edge_loops(action, base):
            if cls.classify(word, allow_new=False, slack=2) is None:
                return Pi1SearchResult("undecided", loops_checked=len(loops),
                                       reason=f"loops of length <= {max_loop_length} do not reach every edge loop")
        reps = list(cls.reps)
        table = []
        for a in reps:
            row = []
            for b in reps:
                c = cls.classify(reduce_word(a + b[1:]), allow_new=False)
                if c is None:
                    return Pi1SearchResult("undecided", loops_checked=len(loops),
                                           reason="a product left the known classes")
                row.append(c)
            table.append(tuple(row))
    except SearchUndecided as exc:
        return Pi1SearchResult("undecided", loops_checked=len(loops), reason=str(exc))
    problems = check_group_table(table)
    if problems:
        return Pi1SearchResult("undecided", loops_checked=len(loops), reason="; ".join(problems))
    log_event("SEARCH_DONE", source="algebra.paths", target="pi1", order=len(reps), loops=len(loops),
              explored=cls.steps)
    return Pi1SearchResult("ok", tuple(Path(r) for r in reps), tuple(table), len(loops))

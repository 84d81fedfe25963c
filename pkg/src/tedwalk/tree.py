"""Unordered rooted trees: representation, canonical codes, characteristics,
and exhaustive enumeration of small trees.

Trees are mutable, but by convention a tree is only mutated by the single
walker that owns it.  Vertex ids come from a per-tree monotone counter and
are never reused, so they remain valid dictionary keys across edits.
"""

from __future__ import annotations

from functools import lru_cache


class TreeParseError(ValueError):
    """Malformed parenthesis string; ``offset`` is the failing byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class Tree:
    """Mutable unordered rooted tree with stable integer vertex ids.

    ``parent`` maps every vertex to its parent (None for the root) and
    ``children`` maps every vertex to the set of its children.  Because ids
    are handed out monotonically and dicts preserve insertion order,
    iterating ``parent`` always yields vertices in increasing id order.
    """

    __slots__ = ("parent", "children", "root", "_next_id")

    def __init__(self):
        self.parent: dict[int, int | None] = {0: None}
        self.children: dict[int, set[int]] = {0: set()}
        self.root: int = 0
        self._next_id: int = 1

    @property
    def size(self) -> int:
        return len(self.parent)

    def vertices(self):
        """All vertex ids, in increasing order."""
        return self.parent.keys()

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def leaves(self) -> list[int]:
        return [v for v, ch in self.children.items() if not ch]

    def ancestors(self, v: int) -> list[int]:
        """Proper ancestors of v, from parent up to the root."""
        out = []
        p = self.parent[v]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out

    def copy(self) -> Tree:
        t = Tree.__new__(Tree)
        t.parent = dict(self.parent)
        t.children = {v: set(ch) for v, ch in self.children.items()}
        t.root = self.root
        t._next_id = self._next_id
        return t

    def post_order(self) -> list[int]:
        """Vertices in post-order (children before parents), iterative."""
        children = self.children
        order = [self.root]
        stack = [self.root]
        while stack:
            v = stack.pop()
            ch = children[v]
            if ch:
                stack.extend(ch)
                order.extend(ch)
        order.reverse()  # reversed pre-order puts children before parents
        return order

    # Low-level mutations.  Preconditions are the caller's business: the
    # validated public interface lives in tedwalk.edits.

    def add_leaf(self, u: int) -> int:
        k = self._next_id
        self._next_id += 1
        self.parent[k] = u
        self.children[k] = set()
        self.children[u].add(k)
        return k

    def delete_leaf(self, k: int) -> None:
        self.children[self.parent[k]].discard(k)
        del self.parent[k]
        del self.children[k]

    def add_internal(self, u: int) -> int:
        k = self._next_id
        self._next_id += 1
        old = self.children[u]
        for c in old:
            self.parent[c] = k
        self.parent[k] = u
        self.children[k] = old
        self.children[u] = {k}
        return k

    def delete_internal(self, k: int) -> None:
        u = self.parent[k]
        kids = self.children[k]
        for c in kids:
            self.parent[c] = u
        self.children[u].discard(k)
        self.children[u] |= kids
        del self.parent[k]
        del self.children[k]


def canonical_code(t: Tree) -> str:
    """Canonical parenthesis code: equal codes iff the trees are isomorphic.

    code(v) = '(' + concatenation of child codes in non-decreasing byte
    order + ')'.  Length is exactly 2 * size.
    """
    codes: dict[int, str] = {}
    for v in t.post_order():
        if not t.children[v]:
            codes[v] = "()"
        else:
            codes[v] = "(" + "".join(sorted(codes[c] for c in t.children[v])) + ")"
    return codes[t.root]


def parse(code: str) -> Tree:
    """Parse a balanced parenthesis string with one outer pair into a Tree.

    Vertex ids are assigned in depth-first order of the input.  The input is
    not required to be canonical; re-serializing canonicalizes it.
    """
    if not code:
        raise TreeParseError("empty input", 0)
    if code[0] != "(":
        raise TreeParseError(f"expected '(', found {code[0]!r}", 0)
    t = Tree.__new__(Tree)
    t.parent = {}
    t.children = {}
    t._next_id = 0
    stack: list[int] = []
    for i, ch in enumerate(code):
        if stack == [] and t.parent:
            raise TreeParseError("trailing input after root closed", i)
        if ch == "(":
            v = t._next_id
            t._next_id += 1
            t.parent[v] = stack[-1] if stack else None
            t.children[v] = set()
            if stack:
                t.children[stack[-1]].add(v)
            stack.append(v)
        elif ch == ")":
            if not stack:
                raise TreeParseError("unmatched ')'", i)
            stack.pop()
        else:
            raise TreeParseError(f"unexpected character {ch!r}", i)
    if stack:
        raise TreeParseError("unbalanced input, missing ')'", len(code))
    t.root = 0
    return t


def size(t: Tree) -> int:
    return t.size


def height(t: Tree) -> int:
    """Number of edges on the longest root-to-leaf path (single node: 0)."""
    best = 0
    stack = [(t.root, 0)]
    while stack:
        v, d = stack.pop()
        if d > best:
            best = d
        for c in t.children[v]:
            stack.append((c, d + 1))
    return best


def outdegree(t: Tree) -> int:
    return max(len(ch) for ch in t.children.values())


def strahler(t: Tree) -> int:
    """Strahler number, leaf value 1; an internal vertex takes the maximum
    child value, plus 1 iff some child attaining it roots a subtree of
    size >= 2 (ties broken toward the larger subtree)."""
    s: dict[int, int] = {}
    sz: dict[int, int] = {}
    for v in t.post_order():
        ch = t.children[v]
        if not ch:
            s[v] = 1
            sz[v] = 1
        else:
            m = max(s[c] for c in ch)
            bonus = 1 if any(s[c] == m and sz[c] >= 2 for c in ch) else 0
            s[v] = m + bonus
            sz[v] = 1 + sum(sz[c] for c in ch)
    return s[t.root]


def tree_stats(t: Tree) -> tuple[int, int, int, int]:
    """(size, height, outdegree, strahler) in one traversal."""
    children = t.children
    root = t.root
    hmax = 0
    omax = 0
    depth = {root: 0}
    order = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        ch = children[v]
        if ch:
            if len(ch) > omax:
                omax = len(ch)
            d = depth[v] + 1
            for c in ch:
                depth[c] = d
            stack.extend(ch)
            order.extend(ch)
        elif depth[v] > hmax:
            hmax = depth[v]
    s: dict[int, int] = {}
    sz: dict[int, int] = {}
    for v in reversed(order):
        ch = children[v]
        if ch:
            m = 0
            bonus = 0
            total = 1
            for c in ch:
                cs = s[c]
                big = sz[c]
                if cs > m:
                    m = cs
                    bonus = 1 if big >= 2 else 0
                elif cs == m and big >= 2:
                    bonus = 1
                total += big
            s[v] = m + bonus
            sz[v] = total
        else:
            s[v] = 1
            sz[v] = 1
    return len(t.parent), hmax, omax, s[root]


def subtree_sizes(t: Tree) -> dict[int, int]:
    """Number of vertices of the subtree rooted at each vertex."""
    sz: dict[int, int] = {}
    for v in t.post_order():
        sz[v] = 1 + sum(sz[c] for c in t.children[v])
    return sz


MAX_ENUMERATION_SIZE = 12


@lru_cache(maxsize=None)
def _codes_of_size(n: int) -> frozenset[str]:
    if n == 1:
        return frozenset(("()",))
    out: set[str] = set()
    for code in _codes_of_size(n - 1):
        t = parse(code)
        for v in list(t.vertices()):
            t2 = t.copy()
            t2.add_leaf(v)
            out.add(canonical_code(t2))
    return frozenset(out)


def enumerate_trees(n: int) -> list[str]:
    """Sorted canonical codes of every unordered rooted tree with n vertices.

    Grown level by level (every size-n tree arises by adding a leaf to a
    size-(n-1) tree) with canonical deduplication.  Guarded to n <= 12 since
    counts grow like 2.48^n.
    """
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise ValueError(f"n must be in 1..{MAX_ENUMERATION_SIZE}, got {n}")
    return sorted(_codes_of_size(n))


def read_trees(path) -> list[Tree]:
    """Read trees from a file: one parenthesis code per line, '#' comments."""
    trees = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                trees.append(parse(text))
            except TreeParseError as exc:
                raise TreeParseError(
                    f"{path}:{lineno}: {exc.message}", exc.offset
                ) from None
    return trees

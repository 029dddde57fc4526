"""Graph helpers over implicit graphs given by a successor function.

Vertices are any hashable values.  ``succ(v)`` returns an iterable of
``(label, w)`` pairs so paths can be reported as label sequences.
"""

from collections import deque


def reachable(roots, succ) -> dict:
    """BFS from ``roots``; returns ``{vertex: (parent, label)}`` (roots map to None)."""
    parent = {}
    queue = deque()
    for r in roots:
        if r not in parent:
            parent[r] = None
            queue.append(r)
    while queue:
        v = queue.popleft()
        for label, w in succ(v):
            if w not in parent:
                parent[w] = (v, label)
                queue.append(w)
    return parent


def path_to(parent, v) -> list:
    """Labels along the BFS tree path ending at ``v``."""
    labels = []
    while parent[v] is not None:
        v, label = parent[v]
        labels.append(label)
    labels.reverse()
    return labels


def bfs_path(src, dst, succ, within=None):
    """Shortest label path ``src -> dst`` (possibly empty), restricted to ``within``."""
    if src == dst:
        return []
    parent = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for label, w in succ(v):
            if within is not None and w not in within:
                continue
            if w not in parent:
                parent[w] = (v, label)
                if w == dst:
                    return path_to(parent, w)
                queue.append(w)
    return None


def cycle_through(v, succ, within):
    """A nonempty label cycle ``v -> ... -> v`` inside ``within``, or None."""
    for label, w in succ(v):
        if w not in within:
            continue
        rest = bfs_path(w, v, succ, within)
        if rest is not None:
            return [label] + rest
    return None


def backward_closure(targets, pred) -> set:
    """All vertices that can reach ``targets`` (``pred(v)`` yields predecessors)."""
    seen = set(targets)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in pred(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def tarjan_scc(vertices, succ) -> list:
    """Strongly connected components, iterative Tarjan.

    ``succ(v)`` here yields plain vertices.  Components come out in reverse
    topological order (sinks first); each is a list.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    pushed = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def is_nontrivial(comp, succ) -> bool:
    """True if the component contains a cycle (size > 1 or a self-loop)."""
    if len(comp) > 1:
        return True
    v = comp[0]
    return any(w == v for w in succ(v))

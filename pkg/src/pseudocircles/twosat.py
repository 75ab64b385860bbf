"""Small 2-SAT solver: implication graph plus iterative Tarjan SCC."""

from __future__ import annotations


class TwoSat:
    """Variables are 0..n-1; literal (v, True) means v is true."""

    def __init__(self, n):
        self.n = n
        self.adj = [[] for _ in range(2 * n)]

    def _node(self, var, value):
        return 2 * var + (1 if value else 0)

    def add_implication(self, a, b):
        """Literal a implies literal b (and contrapositive)."""
        (va, sa), (vb, sb) = a, b
        self.adj[self._node(va, sa)].append(self._node(vb, sb))
        self.adj[self._node(vb, not sb)].append(self._node(va, not sa))

    def add_clause(self, a, b):
        (va, sa), (vb, sb) = a, b
        self.add_implication((va, not sa), (vb, sb))

    def add_unit(self, a):
        va, sa = a
        self.add_implication((va, not sa), (va, sa))

    def solve(self):
        """Assignment list of bools, or None if unsatisfiable."""
        N = 2 * self.n
        index = [0] * N
        low = [0] * N
        on_stack = [False] * N
        comp = [-1] * N
        counter = [1]
        ncomp = [0]
        stack = []

        for root in range(N):
            if index[root]:
                continue
            work = [(root, 0)]
            while work:
                node, pi = work[-1]
                if pi == 0:
                    index[node] = low[node] = counter[0]
                    counter[0] += 1
                    stack.append(node)
                    on_stack[node] = True
                recurse = False
                adj = self.adj[node]
                while pi < len(adj):
                    nb = adj[pi]
                    pi += 1
                    if not index[nb]:
                        work[-1] = (node, pi)
                        work.append((nb, 0))
                        recurse = True
                        break
                    if on_stack[nb]:
                        low[node] = min(low[node], index[nb])
                if recurse:
                    continue
                work[-1] = (node, pi)
                if low[node] == index[node]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp[0]
                        if w == node:
                            break
                    ncomp[0] += 1
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])

        result = []
        for v in range(self.n):
            t, f = comp[2 * v + 1], comp[2 * v]
            if t == f:
                return None
            # Tarjan numbers components in reverse topological order
            result.append(t < f)
        return result

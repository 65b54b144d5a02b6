#!/usr/bin/env python3
"""Emit a site file for the coordinate model used by the bundled fixtures.

Objects are X_A = B x prod_{j in A} P^1_j for subsets A of {1..k}, where the
base B is a curve (labelled 's', always carried along) or a point.  A morphism
X_A -> X_C copies each coordinate c in C from the source or sets it to 0, so it
is a triple (A, C, P) with P the zeroed coordinates.  Composites, fiber
products, pullbacks of the bundles O(e), tensors and the sections x_j are all
computed in the model, which keeps every declared table coherent.
"""

import argparse
from itertools import combinations, product


def subsets(labels):
    out = []
    for r in range(len(labels) + 1):
        out.extend(frozenset(c) for c in combinations(labels, r))
    return out


class Model:
    def __init__(self, k, base):
        self.labels = list(range(1, k + 1))
        self.base = base
        self.objects = subsets(self.labels)
        self.morphisms = []
        for a in self.objects:
            for c in self.objects:
                for rest in subsets(sorted(a & c)):
                    p = (c - a) | (c & a) - rest
                    self.morphisms.append((a, c, frozenset(p)))

    def obj(self, a):
        if not a:
            return "S" if self.base == "curve" else "pt"
        return "X" + "".join(str(j) for j in sorted(a))

    def dim(self, a):
        return len(a) + (1 if self.base == "curve" else 0)

    @staticmethod
    def code(a):
        return "".join(str(j) for j in sorted(a)) or "0"

    def mor(self, m):
        a, c, p = m
        if a == c and not p:
            return "id_" + self.obj(a)
        if not p:
            return "p%s_%s" % (self.code(a), self.code(c))
        return "z%s_%s_%s" % (self.code(a), self.code(c), self.code(p))

    @staticmethod
    def compose(g, f):
        a, b, p = f
        b2, c, q = g
        assert b == b2
        return (a, c, frozenset(q | (p & c)))

    @staticmethod
    def identity(m):
        return m[0] == m[1] and not m[2]

    def square(self, f, g):
        """Fiber product of f: X_A -> X_C and g: X_B -> X_C, or None."""
        a, c, pf = f
        b, c2, pg = g
        assert c == c2
        copy_both = c - pf - pg
        ka = frozenset(x for x in c if x not in pf and x in pg)
        kb = frozenset(x for x in c if x in pf and x not in pg)
        wa, wb = a - ka, b - kb
        if not (wa & wb) <= copy_both:
            return None
        w = wa | wb
        return w, (w, a, ka), (w, b, kb)

    def bits(self, a):
        return (["s"] if self.base == "curve" else []) + sorted(a)

    def bundles(self, a):
        n = len(self.bits(a))
        return [e for e in product((0, 1), repeat=n)]

    def bname(self, a, e):
        if not e:
            return "O_" + self.obj(a)
        return "O_%s_%s" % (self.obj(a), "".join(map(str, e)))

    def pull(self, m, e):
        a, c, p = m
        src, tgt = self.bits(a), self.bits(c)
        val = dict(zip(tgt, e))
        out = []
        for lab in src:
            if lab == "s":
                out.append(val["s"])
            elif lab in c and lab not in p:
                out.append(val[lab])
            else:
                out.append(0)
        return tuple(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--labels", type=int, default=2)
    ap.add_argument("--base", choices=["curve", "point"], default="curve")
    args = ap.parse_args()
    m = Model(args.labels, args.base)
    nonid = [x for x in m.morphisms if not m.identity(x)]
    lines = ["# generated by tools/gen_model_site.py --labels %d --base %s" % (args.labels, args.base), ""]

    lines.append("[objects]")
    for a in m.objects:
        lines.append("object %s dim=%d smooth" % (m.obj(a), m.dim(a)))

    lines += ["", "[morphisms]"]
    for x in nonid:
        a, c, p = x
        flags = "proper"
        if not p:
            flags += " smooth reldim=%d" % (m.dim(a) - m.dim(c))
        lines.append("morphism %s : %s -> %s %s" % (m.mor(x), m.obj(a), m.obj(c), flags))

    lines += ["", "[composites]"]
    for g in nonid:
        for f in nonid:
            if f[1] == g[0]:
                lines.append("composite %s.%s = %s" % (m.mor(g), m.mor(f), m.mor(m.compose(g, f))))

    lines += ["", "[squares]"]
    for i, f in enumerate(nonid):
        for g in nonid[i:]:
            if f[1] != g[1]:
                continue
            sq = m.square(f, g)
            if sq is None:
                continue
            w, gp, fp = sq
            assert m.compose(f, gp) == m.compose(g, fp)
            lines.append("square (%s,%s) corner=%s proj1=%s proj2=%s"
                         % (m.mor(f), m.mor(g), m.obj(w), m.mor(gp), m.mor(fp)))

    lines += ["", "[bundles]"]
    for a in m.objects:
        for e in m.bundles(a):
            lines.append("bundle %s on %s" % (m.bname(a, e), m.obj(a)))

    lines += ["", "[pullbacks]"]
    for x in nonid:
        a, c, _ = x
        for e in m.bundles(c):
            lines.append("pullback %s* %s = %s" % (m.mor(x), m.bname(c, e), m.bname(a, m.pull(x, e))))

    lines += ["", "[tensors]"]
    for a in m.objects:
        es = m.bundles(a)
        for i, e1 in enumerate(es):
            for e2 in es[i:]:
                s = tuple(u + v for u, v in zip(e1, e2))
                if max(s, default=0) <= 1:
                    lines.append("tensor %s (x) %s = %s on %s"
                                 % (m.bname(a, e1), m.bname(a, e2), m.bname(a, s), m.obj(a)))

    lines += ["", "[sections]"]
    for a in m.objects:
        n = len(m.bits(a))
        lines.append("section u_%s : %s on %s zero=empty" % (m.obj(a), m.bname(a, (0,) * n), m.obj(a)))
        for j in sorted(a):
            e = tuple(1 if lab == j else 0 for lab in m.bits(a))
            z = a - {j}
            incl = (z, a, frozenset([j]))
            lines.append("section x%d_%s : %s on %s zero=%s incl=%s"
                         % (j, m.obj(a), m.bname(a, e), m.obj(a), m.obj(z), m.mor(incl)))
    print("\n".join(lines))


if __name__ == "__main__":
    main()

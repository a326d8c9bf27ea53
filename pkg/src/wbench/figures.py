"""Hasse diagrams rendered to image files (used by ``wb report``)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .terms import Kind, atom  # noqa: E402


def cluster(labels, leq):
    """Group mutually related elements; returns (classes, class order matrix)."""
    n = len(labels)
    seen, classes = set(), []
    for i in range(n):
        if i in seen:
            continue
        cls = [j for j in range(n) if leq[i][j] and leq[j][i]]
        seen.update(cls)
        classes.append(cls)
    m = [[leq[a[0]][b[0]] for b in classes] for a in classes]
    return classes, m


def covers(m):
    """Covering pairs (a, b): a < b with nothing strictly between."""
    n = len(m)
    out = []
    for a in range(n):
        for b in range(n):
            if a == b or not m[a][b]:
                continue
            if any(c not in (a, b) and m[a][c] and m[c][b] for c in range(n)):
                continue
            out.append((a, b))
    return out


def levels(m):
    """Longest chain from a minimal element, per node."""
    n = len(m)
    lvl = [0] * n
    for _ in range(n):
        changed = False
        for a in range(n):
            for b in range(n):
                if a != b and m[a][b] and lvl[b] < lvl[a] + 1:
                    lvl[b] = lvl[a] + 1
                    changed = True
        if not changed:
            break
    return lvl


def draw_hasse(labels, leq, path, title=""):
    """Draw the order ``leq`` (a boolean matrix over ``labels``), bottom at the bottom."""
    classes, m = cluster(labels, leq)
    names = [" = ".join(str(labels[i]) for i in cls) for cls in classes]
    lvl = levels(m)
    rows: dict = {}
    for i, l in enumerate(lvl):
        rows.setdefault(l, []).append(i)
    pos = {}
    for l, members in rows.items():
        members.sort(key=lambda i: names[i])
        for k, i in enumerate(members):
            pos[i] = ((k + 1) / (len(members) + 1), l)
    height = max(lvl, default=0) + 1
    width = max(len(v) for v in rows.values()) if rows else 1
    fig, ax = plt.subplots(figsize=(max(4, 2.2 * width), max(3, 1.2 * height)))
    for a, b in covers(m):
        (x1, y1), (x2, y2) = pos[a], pos[b]
        ax.plot([x1, x2], [y1, y2], color="0.6", lw=1, zorder=1)
    for i, (x, y) in pos.items():
        ax.text(x, y, names[i], ha="center", va="center", fontsize=8, zorder=2,
                bbox=dict(boxstyle="round,pad=0.3", fc="white", ec="0.3"))
    ax.set_xlim(0, 1)
    ax.set_ylim(-0.6, height - 0.4)
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def kind_order():
    """Matrix with k1 <= k2 when a k1 reduction yields a k2 reduction (weaker kinds above)."""
    from .terms import kind_implies

    kinds = list(Kind)
    return [k.value for k in kinds], [[kind_implies(a, b) for b in kinds] for a in kinds]


def draw_kinds(path):
    labels, leq = kind_order()
    return draw_hasse(labels, leq, path, "reducibility kinds (stronger below)")


def draw_closure_order(closure, kind: Kind, names, path, title=None):
    """Order between named atoms as recorded in a closed fact base."""
    terms = [closure.kb.normalize(atom(n), kind) for n in names]
    from .kb import Fact

    leq = [[a is b or Fact("le", kind, a, b) in closure.facts for b in terms] for a in terms]
    return draw_hasse(list(names), leq, path, title or f"{kind} order on named problems")


def draw_algebra(A, path, title="finite algebra"):
    L = A.lattice
    return draw_hasse(list(map(str, L.carrier)), L.leq, path, title)

"""Temporally coupled stress-majorization layouts.

Each slice is drawn by minimizing MDS stress against its target distances;
the slices of one run are tied together by quadratic penalties pulling every
node toward its own positions in nearby slices.  The joint objective is
minimized block by block, one slice at a time, in forward and backward sweeps
over the sequence; each block is solved by localized majorization with
Gauss-Seidel node updates, which never increases the objective.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .simnet import ComponentDistances, DistanceTable, SliceGraph
from .windowing import Attribute, TimeWindow

# an anchor is (node index, target position, coefficient)
Anchor = tuple[int, np.ndarray, float]


@dataclass(frozen=True)
class StressParams:
    alpha: float = 1.0
    stability_window: int = 4
    max_iters: int = 1000
    rel_tol: float = 1e-6
    sweeps: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.stability_window < 0:
            raise ValueError("stability_window must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.max_iters < 1 or self.sweeps < 1:
            raise ValueError("max_iters and sweeps must be >= 1")


@dataclass(frozen=True, eq=False)
class LayoutSlice:
    window: TimeWindow
    positions: dict[Attribute, tuple[float, float]]


@dataclass(frozen=True, eq=False)
class Trajectory:
    slices: tuple[LayoutSlice, ...]
    stress_log: tuple[float, ...]


def classical_init(dist: np.ndarray, seed=0) -> np.ndarray:
    """Classical scaling coordinates for one component's distance matrix.

    Double-centers the squared distances and takes the top two eigenvectors
    scaled by the square roots of their eigenvalues.  The eigenpairs come
    from seeded power iteration on a diagonally shifted copy, so the result
    is deterministic for a given seed.  One node lands at the origin, two
    nodes at (+-d/2, 0).
    """
    dist = np.asarray(dist, dtype=float)
    k = dist.shape[0]
    if k == 1:
        return np.zeros((1, 2))
    if k == 2:
        d = float(dist[0, 1])
        return np.array([[-d / 2.0, 0.0], [d / 2.0, 0.0]])
    sq = dist ** 2
    grand = sq.mean()
    b = -0.5 * (sq - sq.mean(axis=1, keepdims=True)
                - sq.mean(axis=0, keepdims=True) + grand)
    rng = np.random.default_rng(seed)
    # Gershgorin shift keeps the iterated matrix positive semidefinite
    sigma = float(np.abs(b).sum(axis=1).max())
    m = b + sigma * np.eye(k)
    coords = np.zeros((k, 2))
    for axis in range(2):
        vec, mu = _power_iterate(m, rng)
        lam = mu - sigma
        if lam > 0.0:
            coords[:, axis] = vec * math.sqrt(lam)
        m = m - mu * np.outer(vec, vec)
    return coords


def _power_iterate(m: np.ndarray, rng, iters: int = 500,
                   tol: float = 1e-14) -> tuple[np.ndarray, float]:
    v = rng.standard_normal(m.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = m @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            break  # v lies in the null space; eigenvalue 0
        w /= norm
        done = float(np.linalg.norm(w - v)) < tol
        v = w
        if done:
            break
    mu = float(v @ (m @ v))
    top = int(np.argmax(np.abs(v)))
    if v[top] < 0.0:  # canonical sign
        v = -v
    return v, mu


def _aggregate_anchors(comp: ComponentDistances,
                       anchors: Sequence[Anchor]) -> tuple[np.ndarray, np.ndarray, float]:
    """Collapse this component's anchors into one quadratic per local row.

    sum_m c_m |x - t_m|^2 over a row equals ctot|x|^2 - 2 x.csum + const, so
    the per-row totals (ctot, csum) drive the update and `const` completes
    the exact objective value.
    """
    rows = {n: t for t, n in enumerate(comp.nodes)}
    k = len(comp.nodes)
    ctot = np.zeros(k)
    csum = np.zeros((k, 2))
    const = 0.0
    for node, target, c in anchors:
        t = rows.get(node)
        if t is None:
            continue
        tx, ty = float(target[0]), float(target[1])
        ctot[t] += c
        csum[t, 0] += c * tx
        csum[t, 1] += c * ty
        const += c * (tx * tx + ty * ty)
    return ctot, csum, const


def _component_stress(local: np.ndarray, comp: ComponentDistances,
                      ctot: np.ndarray, csum: np.ndarray, const: float) -> float:
    diff = local[:, None, :] - local[None, :, :]
    r = np.sqrt((diff ** 2).sum(axis=2))
    total = 0.5 * float((comp.weight * (r - comp.dist) ** 2).sum())
    if const != 0.0 or ctot.any():
        total += (float((ctot * (local ** 2).sum(axis=1)).sum())
                  - 2.0 * float((csum * local).sum()) + const)
    return total


def _component_pass(local: np.ndarray, comp: ComponentDistances,
                    ctot: np.ndarray, csum: np.ndarray, wsum: np.ndarray,
                    rng) -> np.ndarray:
    """One Gauss-Seidel majorization pass over a component, in local coords."""
    k = len(comp.nodes)
    local = np.array(local, dtype=float)
    if k == 0:
        return local
    w = comp.weight
    d = comp.dist
    # exactly coincident connected pairs would make the update direction
    # undefined; nudge the later node of each such pair
    same = ((local[:, None, 0] == local[None, :, 0])
            & (local[:, None, 1] == local[None, :, 1]) & (w > 0.0))
    if same.any():
        if rng is None:
            rng = np.random.default_rng(0)
        for a, b in zip(*np.nonzero(same)):
            if a < b and (local[a] == local[b]).all():
                local[b] += rng.standard_normal(2) * 1e-9
    for t in range(k):
        diff = local[t] - local
        r = np.sqrt((diff ** 2).sum(axis=1))
        r[t] = 1.0
        ratio = np.divide(d[t], r, out=np.zeros(k), where=r > 0.0)
        num = (w[t, :, None] * (local + ratio[:, None] * diff)).sum(axis=0)
        num += csum[t]
        den = wsum[t] + ctot[t]
        if den > 0.0:
            local[t] = num / den
    return local


def slice_stress(positions: np.ndarray, table: DistanceTable,
                 anchors: Sequence[Anchor] = ()) -> float:
    """Sum over components of w_ij(|x_i - x_j| - d_ij)^2 plus anchor pull terms."""
    positions = np.asarray(positions, dtype=float)
    total = 0.0
    claimed = set()
    for comp in table.components:
        idx = np.asarray(comp.nodes, dtype=int)
        claimed.update(comp.nodes)
        ctot, csum, const = _aggregate_anchors(comp, anchors)
        total += _component_stress(positions[idx], comp, ctot, csum, const)
    # anchors on nodes outside every component still count
    for node, target, c in anchors:
        if node not in claimed:
            delta = positions[node] - np.asarray(target, dtype=float)
            total += c * float(delta @ delta)
    return total


def stress_gradient(positions: np.ndarray, table: DistanceTable,
                    anchors: Sequence[Anchor] = ()) -> np.ndarray:
    """Analytic gradient of slice_stress with respect to every coordinate."""
    positions = np.asarray(positions, dtype=float)
    g = np.zeros_like(positions)
    for comp in table.components:
        idx = np.asarray(comp.nodes, dtype=int)
        local = positions[idx]
        diff = local[:, None, :] - local[None, :, :]
        r = np.sqrt((diff ** 2).sum(axis=2))
        np.fill_diagonal(r, 1.0)
        coef = 2.0 * comp.weight * (r - comp.dist) / r
        g[idx] += (coef[:, :, None] * diff).sum(axis=1)
    for node, target, c in anchors:
        g[node] += 2.0 * c * (positions[node] - np.asarray(target, dtype=float))
    return g


def majorize_sweep(positions: np.ndarray, table: DistanceTable,
                   anchors: Sequence[Anchor] = (), rng=None) -> np.ndarray:
    """One localized majorization pass over every component of a slice.

    Returns updated positions; slice_stress never increases under this map.
    """
    pos = np.array(positions, dtype=float)
    for comp in table.components:
        idx = np.asarray(comp.nodes, dtype=int)
        ctot, csum, _ = _aggregate_anchors(comp, anchors)
        pos[idx] = _component_pass(pos[idx], comp, ctot, csum,
                                   comp.weight.sum(axis=1), rng)
    return pos


# below this size a plain-float solve loop beats array dispatch overhead
_SMALL_COMPONENT = 12


def _solve_component_small(local: np.ndarray, comp: ComponentDistances,
                           ctot: np.ndarray, csum: np.ndarray, const: float,
                           params: StressParams, rng) -> np.ndarray:
    """Scalar twin of the array solve loop for components of a few nodes.

    Same updates, same stopping rule; summation order differs, which is
    irrelevant because callers never mix the two engines on one component.
    """
    k = len(comp.nodes)
    w = comp.weight.tolist()
    d = comp.dist.tolist()
    wsum = [float(v) for v in comp.weight.sum(axis=1)]
    ct = [float(v) for v in ctot]
    cs = [(float(a), float(b)) for a, b in csum]
    pulled = [t for t in range(k) if ct[t] > 0.0]
    ctotal = sum(ct[t] for t in pulled)
    xs = [float(p[0]) for p in local]
    ys = [float(p[1]) for p in local]

    def stress() -> float:
        total = const
        for a in range(k):
            wa, da = w[a], d[a]
            xa, ya = xs[a], ys[a]
            for b in range(a + 1, k):
                wab = wa[b]
                if wab > 0.0:
                    dx = xa - xs[b]
                    dy = ya - ys[b]
                    e = math.sqrt(dx * dx + dy * dy) - da[b]
                    total += wab * e * e
        for t in pulled:
            total += ct[t] * (xs[t] * xs[t] + ys[t] * ys[t])
            total -= 2.0 * (cs[t][0] * xs[t] + cs[t][1] * ys[t])
        return total

    def one_pass(rng):
        for a in range(k):
            wa = w[a]
            for b in range(a + 1, k):
                if wa[b] > 0.0 and xs[a] == xs[b] and ys[a] == ys[b]:
                    if rng is None:
                        rng = np.random.default_rng(0)
                    g = rng.standard_normal(2)
                    xs[b] += float(g[0]) * 1e-9
                    ys[b] += float(g[1]) * 1e-9
        for t in range(k):
            wt, dt = w[t], d[t]
            xt, yt = xs[t], ys[t]
            numx, numy = cs[t]
            for j in range(k):
                wij = wt[j]
                if wij == 0.0 or j == t:
                    continue
                dx = xt - xs[j]
                dy = yt - ys[j]
                r = math.sqrt(dx * dx + dy * dy)
                if r > 0.0:
                    ratio = dt[j] / r
                    numx += wij * (xs[j] + ratio * dx)
                    numy += wij * (ys[j] + ratio * dy)
                else:
                    numx += wij * xs[j]
                    numy += wij * ys[j]
            den = wsum[t] + ct[t]
            if den > 0.0:
                xs[t] = numx / den
                ys[t] = numy / den
        return rng

    pairs = [(a, b, w[a][b], d[a][b])
             for a in range(k) for b in range(a + 1, k) if w[a][b] > 0.0]
    rbuf = [0.0] * len(pairs)

    def rescale_and_stress() -> float:
        p = q = 0.0
        for i, (a, b, wab, dab) in enumerate(pairs):
            dx = xs[a] - xs[b]
            dy = ys[a] - ys[b]
            r = math.sqrt(dx * dx + dy * dy)
            rbuf[i] = r
            p += wab * r * r
            q += wab * r * dab
        s = 1.0
        if pulled:
            mux = sum(ct[t] * xs[t] for t in pulled) / ctotal
            muy = sum(ct[t] * ys[t] for t in pulled) / ctotal
            mtx = sum(cs[t][0] for t in pulled) / ctotal
            mty = sum(cs[t][1] for t in pulled) / ctotal
            aterm = bterm = 0.0
            for t in pulled:
                xtil = xs[t] - mux
                ytil = ys[t] - muy
                aterm += ct[t] * (xtil * xtil + ytil * ytil)
                bterm += (xtil * (cs[t][0] - ct[t] * mtx)
                          + ytil * (cs[t][1] - ct[t] * mty))
            den = p + aterm
            scand = (q + bterm) / den if den > 0.0 else 1.0
            if scand > 0.0:
                s = scand
                for i in range(k):
                    xs[i] = s * (xs[i] - mux) + mtx
                    ys[i] = s * (ys[i] - muy) + mty
        elif p > 0.0:
            scand = q / p
            if scand > 0.0 and scand != 1.0:
                s = scand
                mux = sum(xs) / k
                muy = sum(ys) / k
                for i in range(k):
                    xs[i] = s * (xs[i] - mux) + mux
                    ys[i] = s * (ys[i] - muy) + muy
        total = const
        for i, (a, b, wab, dab) in enumerate(pairs):
            e = s * rbuf[i] - dab
            total += wab * e * e
        for t in pulled:
            total += ct[t] * (xs[t] * xs[t] + ys[t] * ys[t])
            total -= 2.0 * (cs[t][0] * xs[t] + cs[t][1] * ys[t])
        return total

    def align():
        mux = sum(ct[t] * xs[t] for t in pulled) / ctotal
        muy = sum(ct[t] * ys[t] for t in pulled) / ctotal
        mtx = sum(cs[t][0] for t in pulled) / ctotal
        mty = sum(cs[t][1] for t in pulled) / ctotal
        b00 = b01 = b10 = b11 = 0.0
        for t in pulled:
            xtil = xs[t] - mux
            ytil = ys[t] - muy
            ttx = cs[t][0] - ct[t] * mtx
            tty = cs[t][1] - ct[t] * mty
            b00 += xtil * ttx
            b01 += xtil * tty
            b10 += ytil * ttx
            b11 += ytil * tty
        trace = b00 + b11
        _u, s, vt = np.linalg.svd(np.array([[b00, b01], [b10, b11]]))
        if float(s.sum()) - trace > 1e-15 * (1.0 + abs(trace)):
            q = vt.T @ _u.T
            q00, q01 = float(q[0, 0]), float(q[0, 1])
            q10, q11 = float(q[1, 0]), float(q[1, 1])
            for i in range(k):
                xtil = xs[i] - mux
                ytil = ys[i] - muy
                xs[i] = q00 * xtil + q01 * ytil + mtx
                ys[i] = q10 * xtil + q11 * ytil + mty
        else:
            dx = mtx - mux
            dy = mty - muy
            for i in range(k):
                xs[i] += dx
                ys[i] += dy

    prev = stress()
    for _ in range(params.max_iters):
        rng = one_pass(rng)
        if pulled:
            align()
        cur = rescale_and_stress()
        if prev - cur <= params.rel_tol * max(prev, 1e-12):
            break
        prev = cur
    return np.column_stack([xs, ys])


def _solve_component(local: np.ndarray, comp: ComponentDistances,
                     anchors: Sequence[Anchor], params: StressParams,
                     rng) -> np.ndarray:
    """Majorize one component to convergence of its stress-plus-anchors value.

    Anchored components get an exact rigid-motion relaxation after every
    pass; without it a tightly connected cluster approaches its anchor
    targets at a rate of roughly alpha over its total edge weight per pass.
    """
    ctot, csum, const = _aggregate_anchors(comp, anchors)
    if len(comp.nodes) <= _SMALL_COMPONENT:
        return _solve_component_small(local, comp, ctot, csum, const, params, rng)
    return _solve_component_array(local, comp, ctot, csum, const, params, rng)


def _solve_component_array(local: np.ndarray, comp: ComponentDistances,
                           ctot: np.ndarray, csum: np.ndarray, const: float,
                           params: StressParams, rng) -> np.ndarray:
    """Array twin of the scalar solve loop for larger components.

    Same updates and stopping rule as the scalar engine; coordinates are
    kept in separate contiguous vectors and all per-node work runs through
    preallocated buffers, which is what makes a 60-node slice affordable.
    """
    k = len(comp.nodes)
    w = comp.weight
    d = comp.dist
    anchored = bool(ctot.any())
    den = w.sum(axis=1) + ctot
    x = np.ascontiguousarray(local[:, 0], dtype=float)
    y = np.ascontiguousarray(local[:, 1], dtype=float)
    csx = np.ascontiguousarray(csum[:, 0])
    csy = np.ascontiguousarray(csum[:, 1])
    c = float(ctot.sum())
    dx = np.empty(k)
    dy = np.empty(k)
    sq = np.empty(k)
    rr = np.empty(k)
    wr = np.empty(k)

    def one_pass(rng):
        # deterministic separation of exactly coincident nodes; every pair
        # inside a component carries positive weight
        groups: dict[tuple[float, float], list[int]] = {}
        for i in range(k):
            groups.setdefault((x[i], y[i]), []).append(i)
        for members in groups.values():
            for b in members[1:]:
                if rng is None:
                    rng = np.random.default_rng(0)
                g = rng.standard_normal(2)
                x[b] += float(g[0]) * 1e-9
                y[b] += float(g[1]) * 1e-9
        for t in range(k):
            np.subtract(x[t], x, out=dx)
            np.subtract(y[t], y, out=dy)
            np.multiply(dx, dx, out=rr)
            np.multiply(dy, dy, out=sq)
            np.add(rr, sq, out=rr)
            np.sqrt(rr, out=rr)
            rr[t] = 1.0
            if rr.min() > 0.0:
                np.divide(d[t], rr, out=wr)
            else:
                wr.fill(0.0)
                np.divide(d[t], rr, out=wr, where=rr > 0.0)
            np.multiply(wr, w[t], out=wr)
            dt = den[t]
            if dt > 0.0:
                x[t] = (np.dot(w[t], x) + np.dot(wr, dx) + csx[t]) / dt
                y[t] = (np.dot(w[t], y) + np.dot(wr, dy) + csy[t]) / dt
        return rng

    def align():
        mux = float(np.dot(ctot, x)) / c
        muy = float(np.dot(ctot, y)) / c
        mtx = float(csx.sum()) / c
        mty = float(csy.sum()) / c
        xc = x - mux
        yc = y - muy
        tx = csx - ctot * mtx
        ty = csy - ctot * mty
        b00 = float(np.dot(xc, tx))
        b01 = float(np.dot(xc, ty))
        b10 = float(np.dot(yc, tx))
        b11 = float(np.dot(yc, ty))
        trace = b00 + b11
        _u, s, vt = np.linalg.svd(np.array([[b00, b01], [b10, b11]]))
        if float(s.sum()) - trace > 1e-15 * (1.0 + abs(trace)):
            q = vt.T @ _u.T
            q00, q01 = float(q[0, 0]), float(q[0, 1])
            q10, q11 = float(q[1, 0]), float(q[1, 1])
            x[:] = q00 * xc + q01 * yc + mtx
            y[:] = q10 * xc + q11 * yc + mty
        else:
            x[:] = xc + mtx
            y[:] = yc + mty

    def rescale_and_stress() -> float:
        dxm = x[:, None] - x[None, :]
        dym = y[:, None] - y[None, :]
        r = np.sqrt(dxm * dxm + dym * dym)
        wrm = w * r
        p = float((wrm * r).sum())
        q = float((wrm * d).sum())
        if anchored:
            mux = float(np.dot(ctot, x)) / c
            muy = float(np.dot(ctot, y)) / c
            mtx = float(csx.sum()) / c
            mty = float(csy.sum()) / c
            xc = x - mux
            yc = y - muy
            a2 = 2.0 * float(np.dot(ctot, xc * xc + yc * yc))
            b2 = 2.0 * (float(np.dot(xc, csx - ctot * mtx))
                        + float(np.dot(yc, csy - ctot * mty)))
            den_s = p + a2
            s = (q + b2) / den_s if den_s > 0.0 else 1.0
            if s > 0.0:
                x[:] = s * xc + mtx
                y[:] = s * yc + mty
                r = r * s
        elif p > 0.0:
            s = q / p
            if s > 0.0 and s != 1.0:
                mux = float(x.mean())
                muy = float(y.mean())
                x[:] = s * (x - mux) + mux
                y[:] = s * (y - muy) + muy
                r = r * s
        total = 0.5 * float((w * (r - d) ** 2).sum())
        if anchored or const != 0.0:
            total += (float(np.dot(ctot, x * x + y * y))
                      - 2.0 * (float(np.dot(csx, x)) + float(np.dot(csy, y)))
                      + const)
        return total

    prev = _component_stress(local, comp, ctot, csum, const)
    for _ in range(params.max_iters):
        rng = one_pass(rng)
        if anchored:
            align()
        cur = rescale_and_stress()
        if prev - cur <= params.rel_tol * max(prev, 1e-12):
            break
        prev = cur
    return np.column_stack([x, y])


def pack_components(layouts: Sequence[tuple[Sequence[int], np.ndarray]],
                    total: int | None = None) -> np.ndarray:
    """Arrange per-component layouts on a non-overlapping grid.

    `layouts` pairs each component's node indices with its local coordinate
    array.  Components are placed row-major in descending node-count order
    (ties broken by smallest node index), each translated so its bounding
    box is centered in its grid cell.  The gap between cells is 10% of the
    largest box dimension, or 1 when every box is a point.
    """
    if total is None:
        total = sum(len(nodes) for nodes, _ in layouts)
    pos = np.zeros((total, 2))
    if not layouts:
        return pos
    order = sorted(range(len(layouts)),
                   key=lambda c: (-len(layouts[c][0]), min(layouts[c][0])))
    boxes = []
    for c in order:
        local = layouts[c][1]
        boxes.append((local.min(axis=0), local.max(axis=0)))
    max_w = max(float(hi[0] - lo[0]) for lo, hi in boxes)
    max_h = max(float(hi[1] - lo[1]) for lo, hi in boxes)
    biggest = max(max_w, max_h)
    gap = 0.1 * biggest if biggest > 0.0 else 1.0
    cell_w = max_w + gap
    cell_h = max_h + gap
    ncols = math.ceil(math.sqrt(len(layouts)))
    for slot, c in enumerate(order):
        row, col = divmod(slot, ncols)
        center = np.array([col * cell_w + cell_w / 2.0,
                           -(row * cell_h + cell_h / 2.0)])
        lo, hi = boxes[slot]
        nodes, local = layouts[c]
        pos[np.asarray(list(nodes), dtype=int)] = local + (center - (lo + hi) / 2.0)
    return pos


def solve_slice(graph: SliceGraph, table: DistanceTable,
                params: StressParams) -> tuple[np.ndarray, float]:
    """Lay out one slice with no temporal terms.

    Every component is initialized by classical scaling with a seed derived
    from (params.seed, window index, component rank), majorized to
    convergence in its own frame, and the components are then packed onto a
    grid.  Returns (positions, final stress).
    """
    n = len(graph.nodes)
    layouts = []
    for rank, comp in enumerate(table.components):
        root = np.random.SeedSequence([params.seed, graph.window.index, rank])
        init_seq, jitter_seq = root.spawn(2)
        local = classical_init(comp.dist, init_seq)
        local = _solve_component(local, comp, (), params,
                                 np.random.default_rng(jitter_seq))
        layouts.append((comp.nodes, local))
    pos = pack_components(layouts, total=n)
    return pos, slice_stress(pos, table)


def _jitter_rng(params: StressParams, window_index: int, sweep: int):
    return np.random.default_rng(
        np.random.SeedSequence([params.seed, window_index, 10_000 + sweep]))


def _solve_block(pos: np.ndarray, table: DistanceTable,
                 anchors: Sequence[Anchor], params: StressParams,
                 rng) -> np.ndarray:
    """Majorize one slice to convergence of its stress-plus-anchors objective.

    Components share no terms of the objective, so each runs to convergence
    on its own instead of re-sweeping already converged ones.
    """
    pos = np.array(pos, dtype=float)
    for comp in table.components:
        idx = np.asarray(comp.nodes, dtype=int)
        pos[idx] = _solve_component(pos[idx], comp, anchors, params, rng)
    return pos


def _shares_nodes(graphs: Sequence[SliceGraph], window: int) -> bool:
    sets = [set(g.nodes) for g in graphs]
    for t in range(len(graphs)):
        for s in range(t + 1, min(t + window, len(graphs) - 1) + 1):
            if sets[t] & sets[s]:
                return True
    return False


def _coupling_anchors(t: int, state: list, graphs: Sequence[SliceGraph],
                      params: StressParams, include_future: bool) -> list[Anchor]:
    lo = max(0, t - params.stability_window)
    hi = min(len(graphs) - 1, t + params.stability_window) if include_future else t - 1
    index_t = graphs[t].node_index()
    anchors: list[Anchor] = []
    for s in range(lo, hi + 1):
        if s == t or state[s] is None:
            continue
        for j, attr in enumerate(graphs[s].nodes):
            i = index_t.get(attr)
            if i is not None:
                anchors.append((i, state[s][j], params.alpha))
    return anchors


def _fresh_component_init(graph: SliceGraph, comp: ComponentDistances,
                          rank: int, params: StressParams) -> np.ndarray:
    root = np.random.SeedSequence([params.seed, graph.window.index, rank])
    init_seq, _ = root.spawn(2)
    return classical_init(comp.dist, init_seq)


def _warm_start(t: int, state: list, graphs: Sequence[SliceGraph],
                tables: Sequence[DistanceTable], params: StressParams) -> np.ndarray:
    """Initial positions for slice t: inherit from slice t-1 where possible.

    Nodes carried over keep their previous coordinates; new nodes in a
    partially inherited component cascade outward from placed neighbors via
    centroids; fully fresh components are laid out by classical scaling,
    packed together, and parked to the right of the inherited bounding box.
    """
    graph, table = graphs[t], tables[t]
    n = len(graph.nodes)
    pos = np.zeros((n, 2))
    if n == 0:
        return pos
    placed = np.zeros(n, dtype=bool)
    if t > 0 and state[t - 1] is not None and len(graphs[t - 1].nodes) > 0:
        prev_index = graphs[t - 1].node_index()
        for i, attr in enumerate(graph.nodes):
            j = prev_index.get(attr)
            if j is not None:
                pos[i] = state[t - 1][j]
                placed[i] = True
    if not placed.any():
        layouts = [(comp.nodes, _fresh_component_init(graph, comp, rank, params))
                   for rank, comp in enumerate(table.components)]
        return pack_components(layouts, total=n)

    adjacency: list[list[int]] = [[] for _ in range(n)]
    for i, j, _w in graph.edges:
        adjacency[i].append(j)
        adjacency[j].append(i)

    fresh = []
    for rank, comp in enumerate(table.components):
        members = list(comp.nodes)
        if not any(placed[m] for m in members):
            fresh.append((rank, comp))
            continue
        settled = False
        while not settled:
            settled = True
            for m in members:
                if placed[m]:
                    continue
                near = [v for v in adjacency[m] if placed[v]]
                if near:
                    pos[m] = np.mean([pos[v] for v in near], axis=0)
                    placed[m] = True
                    settled = False

    if fresh:
        layouts = [(comp.nodes, _fresh_component_init(graph, comp, rank, params))
                   for rank, comp in fresh]
        packed = pack_components(layouts, total=n)
        fresh_idx = np.asarray([m for _, comp in fresh for m in comp.nodes], dtype=int)
        inherited_idx = np.asarray([i for i in range(n) if placed[i]], dtype=int)
        flo = packed[fresh_idx].min(axis=0)
        fhi = packed[fresh_idx].max(axis=0)
        ilo = pos[inherited_idx].min(axis=0)
        ihi = pos[inherited_idx].max(axis=0)
        biggest = max(float(fhi[0] - flo[0]), float(fhi[1] - flo[1]),
                      float(ihi[0] - ilo[0]), float(ihi[1] - ilo[1]))
        gap = 0.1 * biggest if biggest > 0.0 else 1.0
        shift = np.array([float(ihi[0]) + gap - float(flo[0]),
                          float((ilo[1] + ihi[1]) / 2.0 - (flo[1] + fhi[1]) / 2.0)])
        pos[fresh_idx] = packed[fresh_idx] + shift
    return pos


def _joint_objective(state: list, graphs: Sequence[SliceGraph],
                     tables: Sequence[DistanceTable], params: StressParams) -> float:
    total = sum(slice_stress(state[t], tables[t]) for t in range(len(graphs)))
    for t in range(len(graphs)):
        index_t = graphs[t].node_index()
        for s in range(t + 1, min(t + params.stability_window, len(graphs) - 1) + 1):
            for j, attr in enumerate(graphs[s].nodes):
                i = index_t.get(attr)
                if i is not None:
                    delta = state[t][i] - state[s][j]
                    total += params.alpha * float(delta @ delta)
    return total


def _finish(graphs: Sequence[SliceGraph], state: list,
            stress: list[float]) -> Trajectory:
    slices = []
    for g, pos in zip(graphs, state):
        positions = {attr: (float(pos[i, 0]), float(pos[i, 1]))
                     for i, attr in enumerate(g.nodes)}
        slices.append(LayoutSlice(g.window, positions))
    return Trajectory(tuple(slices), tuple(stress))


def solve_trajectory(graphs: Sequence[SliceGraph], tables: Sequence[DistanceTable],
                     params: StressParams) -> Trajectory:
    """Lay out a whole slice sequence with temporal coupling.

    The first sweep runs forward, warm-starting each slice from its
    predecessor and anchoring shared nodes to their positions in the
    preceding `stability_window` slices.  Later sweeps run forward then
    backward with anchors in both directions, until the joint objective's
    relative change drops below `rel_tol` or `sweeps` passes are done.

    With alpha = 0, or when no two nearby slices share a node, coupling
    cannot contribute, and every slice takes the plain solve_slice path so
    results match independent per-slice solving exactly.
    """
    if len(graphs) != len(tables):
        raise ValueError("graphs and tables must align")
    n = len(graphs)
    if n == 0:
        return Trajectory((), ())
    decoupled = (params.alpha == 0.0 or params.stability_window == 0
                 or not _shares_nodes(graphs, params.stability_window))
    if decoupled:
        solved = [solve_slice(g, tbl, params) for g, tbl in zip(graphs, tables)]
        return _finish(graphs, [pos for pos, _ in solved],
                       [st for _, st in solved])

    state: list = [None] * n
    for t in range(n):
        pos = _warm_start(t, state, graphs, tables, params)
        anchors = _coupling_anchors(t, state, graphs, params, include_future=False)
        state[t] = _solve_block(pos, tables[t], anchors, params,
                                _jitter_rng(params, graphs[t].window.index, 1))
    objective = _joint_objective(state, graphs, tables, params)
    for sweep in range(2, params.sweeps + 1):
        for t in list(range(n)) + list(range(n - 2, -1, -1)):
            anchors = _coupling_anchors(t, state, graphs, params, include_future=True)
            state[t] = _solve_block(state[t], tables[t], anchors, params,
                                    _jitter_rng(params, graphs[t].window.index, sweep))
        updated = _joint_objective(state, graphs, tables, params)
        if abs(objective - updated) <= params.rel_tol * max(abs(objective), 1e-12):
            break
        objective = updated
    return _finish(graphs, state,
                   [slice_stress(state[t], tables[t]) for t in range(n)])

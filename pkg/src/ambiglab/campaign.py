"""Randomized configuration builders and deterministic sweep campaigns.

A sweep fans out independent work items over a parameter grid; every item
derives its own random stream from the campaign seed by spawning, so
results are reproducible for any worker count.  Rows are merged in sorted
key order and written as full-precision CSV.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import cones as cn
from .generators import gen_coded_instance, gen_sparse_instance
from .verification import AmbiguityFamily, estimate_unidentifiable_dim, verify_instance
from .errors import InconclusiveProbeError

THREADS_ENV = "AMBIGLAB_THREADS"
TYPE_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


def max_workers() -> int:
    cap = os.environ.get(THREADS_ENV)
    if cap:
        return max(1, int(cap))
    return max(1, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# random admissible configurations

def random_zero_support(rng, d: int, interior: bool = True) -> tuple[int, ...]:
    """Nonempty random index set; interior keeps it inside {3, ..., d-2}."""
    lo, hi = (3, d - 2) if interior else (2, d - 1)
    if hi < lo:
        raise ValueError(f"d={d} leaves no admissible indices")
    pool = np.arange(lo, hi + 1)
    k = int(rng.integers(1, len(pool) + 1))
    return tuple(sorted(int(j) for j in rng.choice(pool, size=k, replace=False)))


def _random_ratio(rng) -> float:
    r = float(rng.uniform(0.2, 0.9))
    return r if rng.integers(2) == 0 else -r


def random_pair_of_type(rng, d: int, t: int) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Random (index set, code) pair of the requested type over dimension d.

    Type-1 codes are built exactly collinear on the overlap: within each run
    of consecutive indices the code is geometric with one shared ratio, with
    a fresh leading value per run (guarded against global collinearity with
    the all-ones vector).
    """
    if t == 0:
        lam = random_zero_support(rng, d, interior=True)
        return lam, tuple(0.0 for _ in lam)
    if t == 2:
        pool = list(range(2, d))
        rng.shuffle(pool)
        lam: list[int] = []
        for j in pool:
            if all(abs(j - i) > 1 for i in lam):
                lam.append(j)
        k = int(rng.integers(1, len(lam) + 1))
        lam = sorted(lam[:k])
        b = _nonzero_normals(rng, len(lam))
        return tuple(lam), tuple(b)
    if t == 1:
        if d < 4:
            raise ValueError("type-1 pairs need d >= 4")
        for _ in range(100):
            start = int(rng.integers(2, d - 2))
            run = [start, start + 1]
            extras = [j for j in range(2, d)
                      if all(abs(j - i) > 1 for i in run)]
            rng.shuffle(extras)
            for j in extras[: int(rng.integers(0, len(extras) + 1))]:
                if all(abs(j - i) > 1 for i in run):
                    run.append(j)
            lam = tuple(sorted(run))
            r = _random_ratio(rng)
            b = []
            prev = None
            for j in lam:
                if prev is not None and j == prev + 1:
                    b.append(b[-1] * r)
                else:
                    b.append(float(_nonzero_normals(rng, 1)[0]))
                prev = j
            ptype = cn.classify_pair(lam, b, d)
            if ptype.label == "type1":
                return lam, tuple(b)
        raise ValueError("failed to build a type-1 pair")
    raise ValueError(f"unknown type {t}")


def _nonzero_normals(rng, k: int) -> np.ndarray:
    out = rng.standard_normal(k)
    for i in range(k):
        while abs(out[i]) < 0.1:
            out[i] = rng.standard_normal()
    return out


# ---------------------------------------------------------------------------
# work items

def sparse_item(args) -> dict:
    """One sparse-grid cell: generate, verify, probe."""
    item_id, m, n, seed_entropy, trials = args
    rng = np.random.default_rng(seed_entropy)
    lam1 = random_zero_support(rng, m)
    lam2 = random_zero_support(rng, n)
    inst = gen_sparse_instance(lam1, lam2, m, n, rng)
    report = verify_instance(inst)
    row = {
        "key": f"sparse-m{m:03d}-n{n:03d}-{item_id:05d}",
        "family": "sparse", "m": m, "n": n,
        "lam1": " ".join(map(str, lam1)), "lam2": " ".join(map(str, lam2)),
        "t1": 0, "t2": 0,
        "p1": cn.p_of(lam1), "p2": cn.p_of(lam2),
        "claimed_dim": inst.claimed_dim,
        "conv_residual": report.conv_residual,
        "verified": report.passed,
    }
    _attach_probe(row, AmbiguityFamily(inst.cone1, inst.cone2), trials, rng)
    return row


def coded_item(args) -> dict:
    """One coded configuration: generate, verify, probe."""
    item_id, m, n, t1, t2, seed_entropy, trials = args
    rng = np.random.default_rng(seed_entropy)
    lam1, b = random_pair_of_type(rng, m, t1)
    lam2, bp = random_pair_of_type(rng, n, t2)
    inst = gen_coded_instance(lam1, b, lam2, bp, m, n, rng)
    report = verify_instance(inst)
    row = {
        "key": f"coded-t{t1}{t2}-m{m:03d}-n{n:03d}-{item_id:05d}",
        "family": "coded", "m": m, "n": n,
        "lam1": " ".join(map(str, lam1)), "lam2": " ".join(map(str, lam2)),
        "t1": t1, "t2": t2,
        "p1": cn.p_of(lam1), "p2": cn.p_of(lam2),
        "claimed_dim": inst.claimed_dim,
        "conv_residual": report.conv_residual,
        "verified": report.passed,
    }
    _attach_probe(row, AmbiguityFamily(inst.cone1, inst.cone2), trials, rng)
    return row


def _attach_probe(row: dict, family: AmbiguityFamily, trials: int, rng) -> None:
    try:
        probe = estimate_unidentifiable_dim(family, trials, rng)
        row.update(measured_pre=probe.measured_pre_quotient,
                   measured_post=probe.measured_post_quotient,
                   agreement=probe.agreement, inconclusive=False)
    except InconclusiveProbeError:
        row.update(measured_pre=-1, measured_post=-1,
                   agreement=False, inconclusive=True)


SWEEP_COLUMNS = ("key", "family", "m", "n", "lam1", "lam2", "t1", "t2", "p1",
                 "p2", "claimed_dim", "conv_residual", "verified",
                 "measured_pre", "measured_post", "agreement", "inconclusive")


def run_sweep(family: str, m_range: tuple[int, int], n_range: tuple[int, int],
              per_cell: int, seed: int, trials: int = 3) -> list[dict]:
    """Deterministic campaign over an (m, n[, type]) grid; returns sorted rows."""
    cells = []
    if family == "sparse":
        for m in range(m_range[0], m_range[1] + 1):
            for n in range(n_range[0], n_range[1] + 1):
                for _ in range(per_cell):
                    cells.append(("sparse", m, n, None))
    elif family == "coded":
        rng = np.random.default_rng(seed)
        for t1, t2 in TYPE_PAIRS:
            for _ in range(per_cell):
                m = int(rng.integers(max(m_range[0], 6), m_range[1] + 1))
                n = int(rng.integers(max(n_range[0], 6), n_range[1] + 1))
                cells.append(("coded", m, n, (t1, t2)))
    else:
        raise ValueError(f"unknown sweep family {family!r}")

    streams = np.random.SeedSequence(seed).spawn(len(cells))
    items = []
    for item_id, (cell, stream) in enumerate(zip(cells, streams)):
        kind, m, n, types = cell
        if kind == "sparse":
            items.append((sparse_item, (item_id, m, n, stream, trials)))
        else:
            items.append((coded_item, (item_id, m, n, types[0], types[1], stream, trials)))

    workers = min(max_workers(), len(items)) or 1
    if workers == 1:
        rows = [fn(args) for fn, args in items]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, args) for fn, args in items]
            rows = [f.result() for f in futures]
    rows.sort(key=lambda r: r["key"])
    return rows


def format_csv(rows: list[dict], columns=SWEEP_COLUMNS) -> str:
    """Full-precision CSV: header row, floats in 17-significant-digit form."""
    def cell(v):
        if isinstance(v, bool):
            return str(int(v))
        if isinstance(v, float):
            return f"{v:.16e}"
        return str(v)

    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"

"""Command-line front-end.

Subcommands: gen, verify, quotient, classify, dim, demo, sweep.
Exit codes: 0 success/pass, 1 verification or agreement failure,
2 inconclusive probe, 3 malformed input file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import campaign, cones as cn, worked_example as wx
from .convolution import convolve
from .errors import (AmbigLabError, InconclusiveProbeError,
                     NoCertificateFoundError)
from .generators import (AdversarialInstance, gen_coded_instance,
                         gen_mixed_instance, gen_sparse_instance,
                         rotational_family, rotated_output)
from .quotient import decompose, decompose_oracle
from .verification import (AmbiguityFamily, estimate_unidentifiable_dim,
                           verify_instance)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip() != "")

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip() != "")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (json.JSONDecodeError, OSError, KeyError, TypeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(3)


def _dump(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _cone_from_flags(lam, b, d: int) -> cn.ConeSpec:
    if lam is None:
        return cn.unconstrained(d)
    if b is None:
        return cn.zero(lam, d)
    return cn.coded(lam, b, d)


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args) -> int:
    if args.family in ("sparse", "coded") and (args.n is None or args.lambda2 is None):
        print("error: --n and --lambda2 are required for this family",
              file=sys.stderr)
        return 1
    if args.family == "sparse":
        inst = gen_sparse_instance(args.lambda1, args.lambda2, args.m, args.n,
                                   args.seed)
    elif args.family == "coded":
        b = args.b if args.b is not None else tuple(0.0 for _ in args.lambda1)
        bp = args.bprime if args.bprime is not None else tuple(0.0 for _ in args.lambda2)
        inst = gen_coded_instance(args.lambda1, b, args.lambda2, bp,
                                  args.m, args.n, args.seed, tol=args.tol)
    else:
        if not args.infile:
            print("error: --in with the right factor y is required for "
                  "the mixed family", file=sys.stderr)
            return 1
        y = np.asarray(_load_json(args.infile), dtype=float)
        try:
            inst = gen_mixed_instance(args.lambda1, args.m, y, args.seed)
        except NoCertificateFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    _dump(inst.to_json(), args.out)
    return 0


def cmd_verify(args) -> int:
    blob = _load_json(args.infile)
    try:
        inst = AdversarialInstance.from_json(blob)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        print(f"error: {args.infile} is not a witness file: {exc!r}",
              file=sys.stderr)
        return 3
    report = verify_instance(inst, tol=args.tol,
                             membership_tol=args.membership_tol)
    _dump(report.to_json(), args.out)
    return 0 if report.passed else 1


def cmd_quotient(args) -> int:
    w = np.asarray(_load_json(args.infile), dtype=float)
    elements = decompose(w, tol=args.tol)
    out = {"count": len(elements), "elements": [e.to_json() for e in elements]}
    if args.grid:
        oracle = decompose_oracle(w, grid_points=args.grid, tol=args.tol)
        out["oracle_count"] = len(oracle)
        out["oracle_agrees"] = len(oracle) == len(elements) and all(
            abs(a.gamma - b.gamma) <= 1e-6
            for a, b in zip(elements, oracle))
    _dump(out, args.out)
    return 0


def cmd_classify(args) -> int:
    ptype = cn.classify_pair(args.lambda1, args.b, args.m, tol=args.tol)
    _dump(ptype.to_json(), args.out)
    return 0


def cmd_dim(args) -> int:
    cone1 = _cone_from_flags(args.lambda1, args.b, args.m)
    cone2 = _cone_from_flags(args.lambda2, args.bprime, args.n)
    family = AmbiguityFamily(cone1, cone2, class_tol=args.tol)
    try:
        result = estimate_unidentifiable_dim(family, args.trials, args.seed)
    except InconclusiveProbeError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 2
    _dump(result.to_json(), args.out)
    return 0 if result.agreement else 1


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{v:.16e}" if isinstance(v, float) else str(v)
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


def cmd_demo(args) -> int:
    p1, p2 = wx.seed_pairs()
    z = convolve(p1.x, p1.y)
    z_alt = convolve(p2.x, p2.y)
    lines = []
    lines.append("seed pair 1: x1 = ({}), y1 = ({})".format(
        ",".join(map(str, p1.x)), ",".join(map(str, p1.y))))
    lines.append("seed pair 2: x2 = ({}), y2 = ({})".format(
        ",".join(map(str, p2.x)), ",".join(map(str, p2.y))))
    lines.append("z = ({})".format(",".join(map(str, z))))
    lines.append(f"common convolution: {np.array_equal(z, z_alt)}")
    s = np.linalg.svd(np.vstack([p1.x, p2.x]).astype(float), compute_uv=False)
    lines.append(f"x1, x2 non-collinear: {s[1] > 1e-9 * s[0]}")

    theta, phi = 0.3, 1.1
    q1, q2 = rotational_family(p1.x, p1.y, p2.x, p2.y, theta, phi)
    closed = rotated_output(z, convolve(p2.x, p1.y), convolve(p1.x, p2.y),
                            theta, phi)
    resid = max(float(np.max(np.abs(q1.convolved() - q2.convolved()))),
                float(np.max(np.abs(q1.convolved() - closed))))
    cone = wx.seed_cone()
    lines.append(f"rotated family (theta={theta}, phi={phi}): "
                 f"max residual {resid:.3e}, zero pattern kept: "
                 f"{cn.member(q1.x, cone) and cn.member(q2.x, cone)}")

    els = decompose(np.array([1.0, -1.0]))
    lines.append(f"decompose((1,-1)): {len(els)} elements, angles "
                 + " ".join(f"{e.gamma:.6f}" for e in els))
    lines.append(f"decompose(x1): {len(decompose(p1.x.astype(float)))} elements")

    s0 = wx.showcase_zero_vector()
    s1 = wx.showcase_coded_vector()
    ptype = cn.classify_pair(wx.SHOWCASE_ZERO_SET, wx.SHOWCASE_CODE,
                             wx.SHOWCASE_DIM, tol=wx.SHOWCASE_CLASS_TOL)
    lines.append("showcase zero-pattern vector on {} (d={}): member={}".format(
        wx.SHOWCASE_ZERO_SET, wx.SHOWCASE_DIM, cn.member(s0, cn.zero(
            wx.SHOWCASE_ZERO_SET, wx.SHOWCASE_DIM))))
    lines.append("showcase coded vector: member={}, scalar c={}, type={} "
                 "lam_star={} r={:.4f}".format(
                     cn.member(s1, wx.showcase_cone(), wx.SHOWCASE_CLASS_TOL),
                     wx.SHOWCASE_SCALAR, ptype.label, ptype.lam_star, ptype.r))
    print("\n".join(lines))

    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_csv(outdir / "demo_convolution.csv", "index,z",
                   [(i + 1, int(v)) for i, v in enumerate(z)])
        lam = set(wx.SHOWCASE_ZERO_SET)
        _write_csv(outdir / "demo_zero_vector.csv", "index,value,constrained",
                   [(i + 1, float(v), int(i + 1 in lam)) for i, v in enumerate(s0)])
        code = dict(zip(wx.SHOWCASE_ZERO_SET, wx.SHOWCASE_CODE))
        _write_csv(outdir / "demo_coded_vector.csv", "index,value,constrained,code",
                   [(i + 1, float(v), int(i + 1 in lam), float(code.get(i + 1, 0.0)))
                    for i, v in enumerate(s1)])
        _write_csv(outdir / "demo_rotational_x.csv", "index,theta,phi,x1p,x2p",
                   [(i + 1, theta, phi, float(a), float(b))
                    for i, (a, b) in enumerate(zip(q1.x, q2.x))])
        _write_csv(outdir / "demo_rotational_y.csv", "index,theta,phi,y1p,y2p",
                   [(i + 1, theta, phi, float(a), float(b))
                    for i, (a, b) in enumerate(zip(q1.y, q2.y))])
    return 0


def cmd_sweep(args) -> int:
    parts = args.grid.split(",")
    if len(parts) < 2:
        print("error: --grid expects MLO:MHI,NLO:NHI[,PER]", file=sys.stderr)
        return 3
    m_lo, m_hi = (int(t) for t in parts[0].split(":"))
    n_lo, n_hi = (int(t) for t in parts[1].split(":"))
    per_cell = int(parts[2]) if len(parts) > 2 else 1
    rows = campaign.run_sweep(args.family, (m_lo, m_hi), (n_lo, n_hi),
                              per_cell, args.seed, trials=args.trials)
    text = campaign.format_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    bad = [r for r in rows if not r["verified"]]
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# argument wiring

def _add_common(sp, *names):
    if "seed" in names:
        sp.add_argument("--seed", type=int, required=True,
                        help="seed for all randomness (reproducibility contract)")
    if "tol" in names:
        sp.add_argument("--tol", type=float, default=1e-9)
    if "out" in names:
        sp.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ambiglab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a certified witness instance")
    g.add_argument("--family", choices=("sparse", "coded", "mixed"),
                   default="sparse")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--lambda1", type=_ints, required=True)
    g.add_argument("--lambda2", type=_ints)
    g.add_argument("--b", type=_floats)
    g.add_argument("--bprime", type=_floats)
    g.add_argument("--in", dest="infile", help="JSON vector y (mixed family)")
    _add_common(g, "seed", "tol", "out")
    g.set_defaults(fn=cmd_gen)

    v = sub.add_parser("verify", help="audit an instance file")
    v.add_argument("--in", dest="infile", required=True)
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--membership-tol", type=float, default=1e-9)
    v.add_argument("--out", default=None)
    v.set_defaults(fn=cmd_verify)

    q = sub.add_parser("quotient", help="decompose a vector")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--grid", type=int, default=0,
                   help="also run the brute-force sweep with this many points")
    _add_common(q, "tol", "out")
    q.set_defaults(fn=cmd_quotient)

    c = sub.add_parser("classify", help="classify an (index set, code) pair")
    c.add_argument("--lambda1", type=_ints, required=True)
    c.add_argument("--b", type=_floats, required=True)
    c.add_argument("--m", type=int, required=True, help="ambient dimension d")
    _add_common(c, "tol", "out")
    c.set_defaults(fn=cmd_classify)

    d = sub.add_parser("dim", help="probe the ambiguity dimension of a family")
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--lambda1", type=_ints)
    d.add_argument("--lambda2", type=_ints)
    d.add_argument("--b", type=_floats)
    d.add_argument("--bprime", type=_floats)
    d.add_argument("--trials", type=int, default=5)
    _add_common(d, "seed", "tol", "out")
    d.set_defaults(fn=cmd_dim)

    e = sub.add_parser("demo", help="reproduce the worked example")
    e.add_argument("--out", default=None, help="directory for plot-ready CSV")
    e.set_defaults(fn=cmd_demo)

    s = sub.add_parser("sweep", help="campaign over an (m, n, types) grid")
    s.add_argument("--family", choices=("sparse", "coded"), default="sparse")
    s.add_argument("--grid", required=True, help="MLO:MHI,NLO:NHI[,PER]")
    s.add_argument("--trials", type=int, default=3)
    _add_common(s, "seed", "out")
    s.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except (ValueError, AmbigLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

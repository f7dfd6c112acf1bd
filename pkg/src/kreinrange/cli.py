"""Command-line front end.

    kreinrange certify  --input ex.json [--out report.json]
    kreinrange classify --input ex.json [--out report.json] [--svg fig.svg]
    kreinrange boundary --input ex.json [--out curve.csv] [--svg fig.svg]
    kreinrange sample   --input ex.json [--out cloud.csv] [--svg fig.svg]

Exit codes: 0 success (certified, for ``certify``), 1 not certified,
2 bad input or unsupported structure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import KreinError, Metric
from .geometry import DEFAULT_GRID, classify_range, sweep_boundary
from .hyperbola import RangeClassification, Shape
from .oracle import DEFAULT_SAMPLES, DEFAULT_SEED, containment_check, sample_both
from .spectra import eigvals, validity_windows
from .tridiag import (
    NormalForm,
    TridiagonalSpec,
    certificate_dict,
    certified_hyperbolas,
    certify,
    normal_form,
    signature,
)

EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_ERROR = 0, 1, 2


class InputError(KreinError):
    """Malformed input file."""


# -- input -----------------------------------------------------------------

_UNIT_IMAG = re.compile(r"(^|[+-])[ij]")


def parse_complex(value, where: str) -> complex:
    """``[re, im]``, a real number, or a string such as ``"3-2i"``."""
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a number, [re, im] pair or 'a+bi' string, got {value!r}")
    if isinstance(value, (int, float)):
        z = complex(value)
    elif isinstance(value, list):
        if len(value) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise InputError(f"{where}: complex pairs must be [re, im] with two numbers, got {value!r}")
        z = complex(value[0], value[1])
    elif isinstance(value, str):
        txt = _UNIT_IMAG.sub(r"\g<1>1j", value.replace(" ", "")).replace("i", "j")
        try:
            z = complex(txt)
        except ValueError:
            raise InputError(f"{where}: cannot parse complex string {value!r}") from None
    else:
        raise InputError(f"{where}: expected a number, [re, im] pair or 'a+bi' string, got {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{where}: non-finite value")
    return z


def _field(doc: dict, name: str, where: str = ""):
    if name not in doc:
        raise InputError(f"{where}missing field {name!r}")
    return doc[name]


def _complex_list(value, where: str) -> list[complex]:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list")
    return [parse_complex(v, f"{where}[{k}]") for k, v in enumerate(value)]


def parse_metric(value, where: str = "J") -> Metric:
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: expected a non-empty list of +1/-1")
    if any(isinstance(v, bool) or v not in (1, -1) for v in value):
        raise InputError("metric entries must be ±1")
    return Metric(tuple(int(v) for v in value))


def parse_document(doc) -> Union[tuple[np.ndarray, Metric], TridiagonalSpec]:
    """Validate a decoded JSON document (see :func:`parse_input`)."""
    if not isinstance(doc, dict):
        raise InputError("top level must be a JSON object")
    kind = _field(doc, "kind")
    if kind == "dense":
        rows = _field(doc, "A")
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise InputError("A: expected a non-empty list of rows")
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise InputError(f"A[{i}]: row has {len(r)} entries, expected {n} (matrix must be square)")
        A = np.array([[parse_complex(v, f"A[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)])
        J = parse_metric(_field(doc, "J"))
        if J.n != n:
            raise InputError(f"J: metric has {J.n} entries for a matrix of order {n}")
        return A, J
    if kind == "tridiagonal":
        order = _field(doc, "order")
        if isinstance(order, bool) or not isinstance(order, int) or order < 2:
            raise InputError(f"order: expected an integer >= 2, got {order!r}")
        a = _field(doc, "a")
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not math.isfinite(a):
            raise InputError(f"a: expected a real number, got {a!r}")
        b = _complex_list(_field(doc, "b"), "b")
        c = _complex_list(doc["c"], "c") if "c" in doc else b[::-1]
        for name, v in (("b", b), ("c", c)):
            if len(v) != order - 1:
                raise InputError(f"{name}: expected {order - 1} entries for order {order}, got {len(v)}")
        if "J" in doc and tuple(parse_metric(doc["J"]).signs) != signature(order):
            raise InputError(f"J: order-{order} tridiagonal data uses the metric {list(signature(order))}")
        return TridiagonalSpec(order, float(a), tuple(b), tuple(c))
    raise InputError(f"kind: expected 'dense' or 'tridiagonal', got {kind!r}")


def parse_input(path) -> Union[tuple[np.ndarray, Metric], TridiagonalSpec]:
    """Read a JSON input file.

    ``{"kind": "dense", "J": [1, -1], "A": [[...], ...]}`` gives ``(A, J)``;
    ``{"kind": "tridiagonal", "order": m, "a": ..., "b": [...], "c": [...]}``
    gives a :class:`TridiagonalSpec` (``c`` defaults to reversed ``b``).
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return parse_document(doc)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def as_dense(parsed) -> tuple[np.ndarray, Metric]:
    if isinstance(parsed, TridiagonalSpec):
        return parsed.matrix(), parsed.metric
    return parsed


# -- output ----------------------------------------------------------------

def to_jsonable(x):
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [to_jsonable(float(x.real)), to_jsonable(float(x.imag))]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, Shape):
        return x.value
    return x


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def render_svg(points: dict[int, np.ndarray], markers: np.ndarray, size: int = 640,
               window: Optional[tuple[float, float, float, float]] = None) -> str:
    """SVG 1.1 scatter plot; + points blue, - points red, markers green; y axis up."""
    pts = [z for arr in points.values() for z in np.asarray(arr, dtype=complex)]
    if window is None:
        allpts = np.array(pts + list(markers), dtype=complex)
        if allpts.size == 0:
            allpts = np.array([0j])
        window = (allpts.real.min(), allpts.real.max(), allpts.imag.min(), allpts.imag.max())
    x0, x1, y0, y1 = window
    span = max(x1 - x0, y1 - y0, 1e-9)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    half = span / 2 * 1.1
    x0, x1, y0, y1 = cx - half, cx + half, cy - half, cy + half
    sx = size / (x1 - x0)

    def px(z):
        return (z.real - x0) * sx, (y1 - z.imag) * sx

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>']
    if x0 < 0 < x1:
        xa = -x0 * sx
        out.append(f'<line x1="{xa:.6g}" y1="0" x2="{xa:.6g}" y2="{size}" stroke="#bbbbbb" stroke-width="0.5"/>')
    if y0 < 0 < y1:
        ya = y1 * sx
        out.append(f'<line x1="0" y1="{ya:.6g}" x2="{size}" y2="{ya:.6g}" stroke="#bbbbbb" stroke-width="0.5"/>')
    colors = {1: "#1f4fd1", -1: "#d12a1f"}
    for sign in sorted(points, reverse=True):
        out.append(f'<g fill="{colors.get(sign, "black")}" stroke="none">')
        for z in np.asarray(points[sign], dtype=complex):
            if x0 <= z.real <= x1 and y0 <= z.imag <= y1:
                x, y = px(z)
                out.append(f'<circle cx="{x:.6g}" cy="{y:.6g}" r="1.2"/>')
        out.append("</g>")
    out.append('<g fill="none" stroke="#14a03c" stroke-width="1.5">')
    for z in markers:
        if x0 <= z.real <= x1 and y0 <= z.imag <= y1:
            x, y = px(complex(z))
            out.append(f'<path d="M{x - 5:.6g},{y:.6g}H{x + 5:.6g}M{x:.6g},{y - 5:.6g}V{y + 5:.6g}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _window_around(mu: np.ndarray) -> tuple[float, float, float, float]:
    c = complex(np.mean(mu))
    r = max(1.0, 3 * float(np.abs(mu - c).max()))
    return c.real - r, c.real + r, c.imag - r, c.imag + r


def _curve_svg(A, J, classification_or_curve) -> str:
    curve = classification_or_curve
    pts = {s: curve.values(s) for s in (1, -1)}
    mu = eigvals(A)
    if len(set(np.round(curve.values(), 12))) <= 1:
        return render_svg(pts, mu)
    return render_svg(pts, mu, window=_window_around(mu))


# -- commands --------------------------------------------------------------

def _oracle_summary(A, J, cls: RangeClassification, args) -> dict:
    cloud = sample_both(A, J, args.samples, args.seed)
    rep = containment_check(cloud, cls, args.tol)
    return {"samples_per_sign": args.samples, "seed": args.seed, "clipped": cloud.clipped,
            "rejected": cloud.rejected, "method": rep.method, "worst_violation": rep.worst_violation,
            "verdict": rep.verdict, "tolerance": args.tol, "note": rep.note,
            "violations": [[z, s, v] for z, s, v in rep.violating_samples]}


def run_certify(args) -> int:
    """Run the entry-wise certificate and cross-check it by classification and sampling."""
    parsed = parse_input(args.input)
    nf: Optional[NormalForm] = None
    if isinstance(parsed, TridiagonalSpec):
        spec = parsed
        A, J = spec.matrix(), spec.metric
    else:
        A, J = parsed
        m = A.shape[0]
        if not 3 <= m <= 6:
            raise KreinError(f"unsupported order {m} (certificates exist for orders 3 to 6)")
        nf = normal_form(A, J)
        spec = nf.T
    if not 3 <= spec.order <= 6:
        raise KreinError(f"unsupported order {spec.order} (certificates exist for orders 3 to 6)")
    cert = certify(spec)
    hyps = certified_hyperbolas(cert)
    if nf is not None:
        hyps = [nf.to_original(h) for h in hyps]
    cls = classify_range(A, J, args.grid)
    report = {
        "command": "certify",
        "input": spec.as_dict() if nf is None else {"kind": "dense", "order": spec.order},
        "certificate": certificate_dict(cert),
        "certificate_verdict": cert.verdict,
        "certified_hyperbolas": [h.as_dict() for h in hyps],
        "classification": {"kind": cls.kind.value, "evidence": cls.evidence},
        "eigenvalues": sorted(eigvals(A), key=lambda z: (z.real, z.imag)),
    }
    if nf is not None:
        report["normal_form"] = {"tau": nf.tau, "delta": nf.delta, "T": spec.as_dict()}
    verdict = bool(cert.verdict) and cls.kind != Shape.WHOLE_PLANE
    if cert.verdict and hyps:
        oracle_cls = RangeClassification(Shape.HYPERBOLIC_DISC, hyperbolas=(hyps[0],))
        if len(hyps) > 1 and cls.kind != Shape.WHOLE_PLANE:
            # two certified hyperbolas: test against the assembled region
            oracle_cls = cls
        report["oracle"] = _oracle_summary(A, J, oracle_cls, args)
        verdict = verdict and report["oracle"]["verdict"]
    report["verdict"] = verdict
    _emit(dump_json(report), args.out)
    if args.svg:
        Path(args.svg).write_text(_curve_svg(A, J, cls.curve or sweep_boundary(A, J, args.grid)), encoding="utf-8")
    return EXIT_OK if verdict else EXIT_NOT_CERTIFIED


def run_classify(args) -> int:
    """Classify the shape of the range with its evidence trail."""
    A, J = as_dense(parse_input(args.input))
    cls = classify_range(A, J, args.grid)
    report = {"command": "classify", "classification": cls.as_dict(),
              "eigenvalues": sorted(eigvals(A), key=lambda z: (z.real, z.imag))}
    if J.is_indefinite and A.shape[0] > 1:
        report["validity_windows"] = validity_windows(A, J, args.grid)
    _emit(dump_json(report), args.out)
    if args.svg:
        curve = cls.curve if cls.curve is not None else sweep_boundary(A, J, args.grid)
        Path(args.svg).write_text(_curve_svg(A, J, curve), encoding="utf-8")
    return EXIT_OK


def run_boundary(args) -> int:
    """Write the sampled boundary generating curve as CSV."""
    A, J = as_dense(parse_input(args.input))
    curve = sweep_boundary(A, J, args.grid)
    _emit(curve.to_csv(), args.out)
    if args.svg:
        Path(args.svg).write_text(_curve_svg(A, J, curve), encoding="utf-8")
    return EXIT_OK


def run_sample(args) -> int:
    """Write Monte Carlo samples of both sign classes as CSV."""
    A, J = as_dense(parse_input(args.input))
    cloud = sample_both(A, J, args.samples, args.seed)
    _emit(cloud.to_csv(), args.out)
    if args.svg:
        pts = {s: cloud.values[cloud.signs == s] for s in (1, -1)}
        mu = eigvals(A)
        Path(args.svg).write_text(render_svg(pts, mu, window=_window_around(mu)), encoding="utf-8")
    return EXIT_OK


COMMANDS = {"certify": run_certify, "classify": run_classify, "boundary": run_boundary, "sample": run_sample}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kreinrange", description="Krein-space numerical ranges of small matrices.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().split("\n")[0] or None)
        p.add_argument("--input", required=True, help="JSON input file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--svg", help="also write an SVG figure here")
        p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="number of angles in the sweep")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Monte Carlo samples per sign")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--tol", type=float, default=1e-6, help="containment tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.grid < 16:
        print("error: --grid must be at least 16", file=sys.stderr)
        return EXIT_ERROR
    if args.samples < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    if not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (KreinError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

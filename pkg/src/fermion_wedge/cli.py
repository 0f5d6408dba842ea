"""Command-line interface.

Subcommands: ``canonicalize``, ``spectrum``, ``kernel``, ``verify``, ``dims``.
Exit codes: 0 success, 1 verification failure, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from math import comb
from pathlib import Path

import numpy as np

from . import SCHEMA
from .analytic import FOLD_TOL, SpectralReport, spectral_report
from .fock_basis import WedgeVector
from .geminal import CanonicalGeminal, GeminalError, GeminalMatrix, canonicalize
from .kernel import block_dimensions, kernel_decomposition, kernel_dimension
from .verify import run_battery

log = logging.getLogger("fermion_wedge")

FOLDED_FLAG = "pair eigenvalues folded into kernel"


class InputError(Exception):
    """Bad input document or arguments (exit code 2)."""


# -- GeminalDocument I/O ------------------------------------------------------

def _complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise InputError(f"expected a number or a [re, im] pair, got {x!r}")


def _encode(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def _encode_xi(xi: np.ndarray) -> list:
    if np.iscomplexobj(xi):
        return [_encode(x) for x in xi]
    return [float(x) for x in xi]


def _encode_matrix(a: np.ndarray) -> list:
    return [[_encode(x) for x in row] for row in a]


def _decode_matrix(rows, n: int) -> np.ndarray:
    """Row-major entries, either as ``n`` rows of ``n`` or one flat list of ``n*n``."""
    if not isinstance(rows, list):
        raise InputError("matrix must be a list")
    if len(rows) == n and all(isinstance(r, list) and len(r) == n for r in rows) and n > 1:
        flat = [x for r in rows for x in r]
    elif len(rows) == n * n:
        flat = rows
    else:
        raise InputError(f"matrix must hold {n}x{n} entries")
    return np.array([_complex(x) for x in flat]).reshape(n, n)


def parse_geminal(doc: dict) -> GeminalMatrix | CanonicalGeminal:
    """Validate a GeminalDocument and return the geminal it describes."""
    if not isinstance(doc, dict):
        raise InputError("geminal document must be a JSON object")
    if "schema" in doc and doc["schema"] != SCHEMA:
        raise InputError(f"unsupported schema {doc['schema']!r}, expected {SCHEMA!r}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("'n' must be an integer")
    has_c, has_m = "canonical" in doc, "matrix" in doc
    if has_c == has_m:
        raise InputError("exactly one of 'canonical' or 'matrix' must be present")
    if has_m:
        return GeminalMatrix(n, _decode_matrix(doc["matrix"], n))
    can = doc["canonical"]
    if not isinstance(can, dict) or "xi" not in can:
        raise InputError("'canonical' must be an object with an 'xi' list")
    xi = np.array([_complex(x) for x in can["xi"]])
    if np.all(xi.imag == 0):
        xi = xi.real
    u = _decode_matrix(can["U"], n) if "U" in can else None
    return CanonicalGeminal(n, xi, u)


def normalize_canonical(c: CanonicalGeminal) -> CanonicalGeminal:
    """Real positive ``xi`` in descending order, phases and order moved into ``U``."""
    xi = np.asarray(c.xi)
    u = np.array(c.U)
    phases = np.exp(1j * np.angle(xi)) if np.iscomplexobj(xi) else np.sign(xi).astype(complex)
    for k, ph in enumerate(phases):
        u[:, 2 * k] *= ph
    mags = np.abs(xi)
    order = sorted(range(len(mags)), key=lambda k: -mags[k])
    cols = [j for k in order for j in (2 * k, 2 * k + 1)] + list(range(2 * len(mags), c.n))
    u = u[:, cols]
    if np.all(np.abs(u.imag) == 0):
        u = u.real
    return CanonicalGeminal(c.n, mags[order], u)


def to_canonical(g: GeminalMatrix | CanonicalGeminal, tol: float) -> CanonicalGeminal:
    if isinstance(g, GeminalMatrix):
        return canonicalize(g, tol)
    return g


def canonical_document(c: CanonicalGeminal, include_u: bool = True) -> dict:
    out = {"schema": SCHEMA, "n": c.n, "canonical": {"xi": _encode_xi(c.xi)}}
    if include_u:
        out["canonical"]["U"] = _encode_matrix(np.asarray(c.U))
    return out


def _load(path: str) -> tuple[dict, GeminalMatrix | CanonicalGeminal]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read geminal document: {exc}") from exc
    try:
        return doc, parse_geminal(doc)
    except GeminalError as exc:
        raise InputError(str(exc)) from exc


# -- report assembly -----------------------------------------------------------

def _vector_terms(v: WedgeVector) -> dict:
    return {str(d): _encode(a) for d, a in v.terms(atol=0.0)}


def spectrum_section(rep: SpectralReport, vectors: bool) -> dict:
    out = {
        "eigenvalue_clusters": [{"value": v, "multiplicity": m} for v, m in rep.all_clusters()],
        "kernel_dim": rep.kernel_dim,
        "folded_pairs": rep.folded,
    }
    if vectors:
        out["families"] = [
            {
                "name": f.name,
                "label": f.label,
                "index": f.index,
                "eigenvalue": f.eigenvalue,
                "amplitudes": _vector_terms(f.vector),
            }
            for f in rep.families
        ]
    return out


def kernel_section(c: CanonicalGeminal, tol: float, vectors: bool) -> dict:
    kd = kernel_decomposition(c, tol)
    dims = block_dimensions(c.n, c.s)
    formula = dict(zip(["(0,3)", "(1,2)", "(2,1)", "(3,0)"], dims[:4]))
    blocks = []
    for label, block in kd.blocks.items():
        entry = {
            "signature": label,
            "dimension": block.dimension,
            "formula_dimension": formula[label],
            "basis": [f.name for f in block.basis],
        }
        if vectors:
            entry["vectors"] = {f.name: _vector_terms(f.vector) for f in block.basis}
        blocks.append(entry)
    folded = [f.name for f in kd.folded]
    return {
        "blocks": blocks,
        "folded_basis": folded,
        "dimension": kd.dimension,
        "expected_dimension": kernel_dimension(c.n, c.s, len(kd.folded) // 2),
    }


def _flags(rep: SpectralReport) -> list[str]:
    return [FOLDED_FLAG] if rep.folded else []


def _emit(args, payload, text: str | None = None) -> None:
    if args.json or text is None:
        out = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    else:
        out = text
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


# -- commands ------------------------------------------------------------------

def cmd_canonicalize(args) -> int:
    _, g = _load(args.input)
    c = normalize_canonical(to_canonical(g, args.tol))
    _emit(args, canonical_document(c))
    return 0


def _report_head(doc: dict, c: CanonicalGeminal, command: str, include_u: bool) -> dict:
    can = canonical_document(c, include_u)["canonical"]
    can["s"] = c.s
    return {"schema": SCHEMA, "command": command, "input": doc, "canonical": can, "basis": "natural-orbital"}


def cmd_spectrum(args) -> int:
    doc, g = _load(args.input)
    c = to_canonical(g, args.tol)
    rep = spectral_report(c, FOLD_TOL)
    report = _report_head(doc, c, "spectrum", args.include_u)
    report.update(spectrum_section(rep, args.vectors))
    report["flags"] = _flags(rep)
    lines = ["eigenvalue  multiplicity"]
    for v, m in rep.eigenvalue_clusters:
        lines.append(f"{v:.4f}  {m}")
    if rep.kernel_dim:
        lines.append(f"{0.0:.4f}  {rep.kernel_dim}")
    if args.vectors:
        for f in rep.families:
            lines.append(f"{f.name} = {f.vector.format(4)}  (eigenvalue {f.eigenvalue:.4f})")
    lines += [f"note: {flag}" for flag in report["flags"]]
    _emit(args, report, "\n".join(lines) + "\n")
    return 0


def cmd_kernel(args) -> int:
    doc, g = _load(args.input)
    c = to_canonical(g, args.tol)
    rep = spectral_report(c, FOLD_TOL)
    report = _report_head(doc, c, "kernel", args.include_u)
    report["kernel"] = kernel_section(c, FOLD_TOL, args.vectors)
    report["flags"] = _flags(rep)
    ker = report["kernel"]
    dims = " ".join(str(b["dimension"]) for b in ker["blocks"])
    lines = [f"blocks (0,3) (1,2) (2,1) (3,0): {dims}  total {ker['dimension']}"]
    for b in ker["blocks"]:
        lines.append(f"{b['signature']}: " + (", ".join(b["basis"]) or "-"))
    if ker["folded_basis"]:
        lines.append("folded: " + ", ".join(ker["folded_basis"]))
    lines += [f"note: {flag}" for flag in report["flags"]]
    _emit(args, report, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    cases = []
    if args.random:
        if not 2 <= len(args.random) <= 4:
            raise InputError("--random takes N S [SEED [COUNT]]")
        n, s, seed, count = (list(args.random) + [args.seed, 1][len(args.random) - 2:])[:4]
        if n < 3 or not 1 <= s <= n // 2 or count < 1:
            raise InputError(f"invalid --random parameters n={n} s={s} count={count}")
        from .oracle import random_geminal

        for i in range(count):
            rng = np.random.default_rng([seed, i])
            cases.append((f"random n={n} s={s} seed={seed} #{i}", random_geminal(n, s, rng)))
    elif args.input:
        cases.append((args.input, _load(args.input)[1]))
    else:
        raise InputError("verify needs an input document or --random N S SEED COUNT")

    results = [run_battery(g, tol=args.tol, label=label, inject_fault=args.inject_fault) for label, g in cases]
    passed = sum(r["passed"] for r in results)
    verdict = {
        "schema": SCHEMA,
        "command": "verify",
        "passed": passed == len(results),
        "summary": f"{passed}/{len(results)} pass",
        "degenerate": any(r["degenerate"] for r in results),
        "flags": [FOLDED_FLAG] if any(r["degenerate"] for r in results) else [],
        "cases": results,
    }
    _emit(args, verdict)
    return 0 if verdict["passed"] else 1


def _parse_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..")
        elif ":" in text:
            lo, hi = text.split(":")
        else:
            lo = hi = text
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise InputError(f"bad range {text!r}; use LO..HI") from exc
    if lo > hi:
        raise InputError(f"empty range {text!r}")
    return range(lo, hi + 1)


def dims_rows(n_range: range, s_range: range | None) -> list[dict]:
    rows = []
    for n in n_range:
        if n < 3:
            raise InputError(f"n must be at least 3, got {n}")
        s_values = s_range if s_range is not None else range(2, n // 2 + 1)
        for s in s_values:
            if s < 1 or 2 * s > n:
                raise InputError(f"invalid s={s} for n={n}: need 1 <= s <= n/2")
            d = block_dimensions(n, s)
            expected = comb(n, 3) - n
            rows.append({"n": n, "s": s, "d03": d.d03, "d12": d.d12, "d21": d.d21, "d30": d.d30,
                         "total": d.total, "expected": expected, "holds": d.total == expected,
                         "degenerate": s == 1})
    return rows


def cmd_dims(args) -> int:
    rows = dims_rows(_parse_range(args.n_range), _parse_range(args.s_range) if args.s_range else None)
    lines = []
    for r in rows:
        mark = "✓" if r["holds"] else "✗"
        note = "  (s=1: pair eigenvalues folded)" if r["degenerate"] else ""
        lines.append(f"n={r['n']:<3d} s={r['s']:<3d} {r['d03']} {r['d12']} {r['d21']} {r['d30']} | "
                     f"{r['total']} = {r['expected']} {mark}{note}")
    ok = all(r["holds"] for r in rows)
    _emit(args, {"schema": SCHEMA, "command": "dims", "rows": rows, "passed": ok}, "\n".join(lines) + "\n")
    return 0 if ok else 1


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    common.add_argument("--tol", type=float, default=1e-10, help="rank tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="seed for generated inputs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fermion-wedge", description="Spectrum and kernel of the 3-fermion operator built from a geminal.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonicalize", parents=[common], help="canonical pair decomposition of a geminal")
    p.add_argument("input", help="GeminalDocument path or - for stdin")
    p.set_defaults(func=cmd_canonicalize)

    for name, func, helptext in (("spectrum", cmd_spectrum, "eigenvalue clusters and eigenvectors"),
                                 ("kernel", cmd_kernel, "null-space blocks and basis")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input")
        p.add_argument("--vectors", action="store_true", help="include vector amplitudes")
        p.add_argument("--include-u", action="store_true", help="include natural orbitals in the report")
        p.add_argument("--table", dest="json", action="store_false", help="plain table output (default)")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="run the full cross-check battery")
    p.add_argument("input", nargs="?")
    p.add_argument("--random", nargs="+", type=int, metavar="N S [SEED [COUNT]]",
                   help="generate COUNT seeded geminals with N orbitals and S pairs")
    p.add_argument("--inject-fault", choices=["eigenvalue", "kernel", "operator"],
                   help="perturb one quantity to exercise the failure path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dims", parents=[common], help="block dimension table")
    p.add_argument("--n-range", default="3..30")
    p.add_argument("--s-range", default=None)
    p.set_defaults(func=cmd_dims)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, GeminalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

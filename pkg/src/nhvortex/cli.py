"""Command-line front end.

Exit status: 0 success, 1 validation or model error, 2 property failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
from pathlib import Path
import sys

from . import rm
from .berry import HALF_PI, PauliModel, berry_phase_line_integral, quantize
from .errors import EPProximity, ModelError
from .loopspec import SCHEMA_VERSION, load_loop
from .verify import DEFAULT_THRESHOLDS, format_report, run_suite
from .vortex import pauli_filaments, predict_from_filaments

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2
NOT_QUANTIZED_TOL = 1e-3
DIAGRAM_FIELDS = ["k_index", "k_over_pi", "branch", "delta_hop", "big_delta", "kind"]


def _num(x: float) -> float:
    """Floats are emitted with full precision (repr) and without negative zero."""
    return float(x) + 0.0


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _params(args) -> rm.RmParams:
    return rm.RmParams(
        j0=args.j0,
        delta_hop=args.delta,
        lam=args.lam,
        big_delta=args.big_delta,
        n_cells=args.n,
    )


def diagram_rows(p: rm.RmParams) -> list[dict]:
    rows = []
    for curve in rm.el_curves(p):
        kind = curve.kind
        for d, big, br in zip(curve.delta_hop, curve.big_delta, curve.branch):
            rows.append(
                {
                    "k_index": curve.k_index,
                    "k_over_pi": _num(2 * curve.k_index / p.n_cells),
                    "branch": int(br),
                    "delta_hop": _num(d),
                    "big_delta": _num(big),
                    "kind": kind,
                }
            )
    return rows


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _doc(payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2) + "\n"


def cmd_phase_diagram(args) -> int:
    p = _params(args)
    if p.lam != 0:
        raise ModelError("phase diagrams are drawn on the lambda = 0 slice")
    rows = diagram_rows(p)
    table = _csv(rows, DIAGRAM_FIELDS)
    doc = _doc({"kind": "phase_diagram", "j0": p.j0, "n_cells": p.n_cells, "fields": DIAGRAM_FIELDS, "rows": rows})
    if args.out is None:
        _write(table if args.format == "table" else doc, None)
    else:
        # both encodings are written: the requested one at --out, the other alongside
        out = Path(args.out)
        primary, other = (table, doc) if args.format == "table" else (doc, table)
        other_path = out.with_suffix(".json" if args.format == "table" else ".csv")
        out.write_text(primary)
        other_path.write_text(other)
    return EXIT_OK


def _loop_phase(spec, samples: int | None, j0: float, n_cells: int):
    path = spec.to_path(samples)
    if spec.space == "pauli":
        phase = berry_phase_line_integral(PauliModel(), path)
        predicted, windings = predict_from_filaments(pauli_filaments(), path)
        labels = [f.label for f in pauli_filaments()]
    else:
        res = rm.rm_berry_phase(path, rm.RmParams(j0, 0.0, 0.0, 0.0, n_cells))
        phase, predicted, windings = res.phase, res.predicted, res.windings
        labels = [f.label for f in rm.boundary_filaments(j0)]
    return path, phase, predicted, dict(zip(labels, windings))


def cmd_berry_phase(args) -> int:
    spec = load_loop(args.loop)
    j0 = args.j0 if args.j0 is not None else spec.model.get("j0", 1.0)
    n_cells = args.n if args.n is not None else spec.model.get("n_cells", 8)
    if spec.space == "rm":
        rm._check_n(n_cells)
    path, phase, predicted, windings = _loop_phase(spec, args.samples, j0, n_cells)
    n = path.n_samples
    _, phase_2n, _, _ = _loop_phase(spec, 2 * n, j0, n_cells)
    q = quantize(phase, strict=False)
    report = {
        "kind": "berry_phase",
        "loop": spec.name or args.loop,
        "space": spec.space,
        "samples": n,
        "phase_re": _num(phase.real),
        "phase_im": _num(phase.imag),
        "coefficient": q.coefficient,
        "residual": _num(q.residual),
        "windings": windings,
        "predicted_phase": _num(predicted),
        "predicted_coefficient": int(round(predicted / HALF_PI)),
        "convergence": {
            "samples": [n, 2 * n],
            "phase_re": [_num(phase.real), _num(phase_2n.real)],
            "difference": _num(abs(phase_2n - phase)),
        },
    }
    if spec.space == "rm":
        report["model"] = {"j0": j0, "n_cells": n_cells}
    if spec.expected_coefficient is not None:
        report["expected_coefficient"] = spec.expected_coefficient
    if q.residual > NOT_QUANTIZED_TOL:
        print(f"warning: NOT_QUANTIZED residual {q.residual:.3e} > {NOT_QUANTIZED_TOL:g}", file=sys.stderr)
    if args.format == "doc":
        _write(_doc(report), args.out)
    else:
        lines = []
        for key, value in report.items():
            if isinstance(value, dict):
                value = " ".join(f"{k}:{v!r}" for k, v in value.items())
            lines.append(f"{key:<22} {value!r}" if isinstance(value, float) else f"{key:<22} {value}")
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_filaments(args) -> int:
    filaments = pauli_filaments() if args.space == "pauli" else rm.boundary_filaments(args.j0)
    axes = ["beta", "gamma", "alpha"] if args.space == "pauli" else ["lambda", "Delta", "delta"]
    records = [f.to_record() for f in filaments]
    if args.format == "doc":
        _write(_doc({"kind": "filaments", "space": args.space, "axes": axes, "filaments": records}), args.out)
    else:
        rows = [
            {
                "label": r["label"],
                "sign": r["sign"],
                **{f"anchor_{a}": _num(v) for a, v in zip(axes, r["anchor"])},
                **{f"direction_{a}": _num(v) for a, v in zip(axes, r["direction"])},
                "flux": _num(r["sign"] * HALF_PI),
            }
            for r in records
        ]
        _write(_csv(rows, list(rows[0])), args.out)
    return EXIT_OK


def cmd_eig(args) -> int:
    p = _params(args)
    rows = []
    for n, k in enumerate(rm.k_grid(p.n_cells), start=1):
        eps = rm.spectrum_k(p, k)
        rows.append({"k_index": n, "k_over_pi": _num(2 * n / p.n_cells), "eps_re": _num(eps.real), "eps_im": _num(eps.imag)})
    gs = rm.ground_energy(p)
    meta = {
        "ground_energy_re": _num(gs.real),
        "ground_energy_im": _num(gs.imag),
        "real_spectrum": rm.real_spectrum_check(p),
    }
    if args.format == "doc":
        _write(_doc({"kind": "spectrum", "params": vars(p), "modes": rows, **meta}), args.out)
    else:
        text = _csv(rows, list(rows[0]))
        text += "".join(f"# {k} {v!r}\n" for k, v in meta.items())
        _write(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = {}
    if args.threshold is not None:
        overrides = {name: args.threshold for name in DEFAULT_THRESHOLDS}
    results = run_suite(args.seed, overrides, size=args.size)
    _write(format_report(results, args.seed), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhvortex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(sp, n_default=8):
        sp.add_argument("--n", type=int, default=n_default, help="number of unit cells N (even)")
        sp.add_argument("--j0", type=float, default=1.0)
        sp.add_argument("--delta", type=float, default=0.0, help="hopping dimerization delta")
        sp.add_argument("--lambda", dest="lam", type=float, default=0.0, help="real staggered potential")
        sp.add_argument("--big-delta", type=float, default=0.0, help="imaginary staggered potential Delta")

    def output_flags(sp):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=["table", "doc"], default="table")

    sp = sub.add_parser("phase-diagram", help="exceptional curves in the (delta, Delta) plane")
    model_flags(sp)
    output_flags(sp)
    sp.set_defaults(func=cmd_phase_diagram)

    sp = sub.add_parser("berry-phase", help="Berry phase of a loop document")
    sp.add_argument("--loop", required=True, help="loop JSON file or bundled name (fig4a..fig4f)")
    sp.add_argument("--samples", type=int, help="override the document's sample count")
    sp.add_argument("--n", type=int, help="unit cells for rm loops (default from document)")
    sp.add_argument("--j0", type=float, help="J0 for rm loops (default from document)")
    output_flags(sp)
    sp.set_defaults(func=cmd_berry_phase)

    sp = sub.add_parser("filaments", help="list vortex filaments")
    sp.add_argument("--space", choices=["rm", "pauli"], default="rm")
    sp.add_argument("--j0", type=float, default=1.0)
    output_flags(sp)
    sp.set_defaults(func=cmd_filaments)

    sp = sub.add_parser("eig", help="per-mode spectrum of the lattice model")
    model_flags(sp)
    output_flags(sp)
    sp.set_defaults(func=cmd_eig)

    sp = sub.add_parser("verify", help="run the seeded property suite")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--threshold", type=float, help="override every threshold")
    sp.add_argument("--size", type=int, default=20, help="random cases per property (scaled)")
    sp.add_argument("--out", help="report file (default stdout)")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK
    except EPProximity as exc:
        index = "" if exc.index is None else f" (sample index {exc.index})"
        print(f"error: {exc.code}{index}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        code = getattr(exc, "code", type(exc).__name__)
        print(f"error: {code}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""
Benchmark harness: load or generate a problem, run selected solvers,
report iterations / TRR / CPU per solver, optionally dump residual
histories.

Report determinism contract: for fixed (matrix, p, tol, seed, solver,
backend) the CSV report and history files are byte-identical across
invocations, except the cpu column. TRR and history values are printed
with repr(), the shortest decimal that round-trips the double, so
parsing a report back recovers the exact floats.

Exit codes: 0 when every requested solver converged, 1 when any did
not, 2 for usage or input errors.
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .mm_io import read_matrix_market
from .oracle import KINDS, ProblemSpec, gen_problem, gen_rhs
from .solvers import SOLVERS, SolverConfig, check_complex_symmetric

__all__ = [
    "SolverRow",
    "RunReport",
    "run_benchmark",
    "format_report_csv",
    "format_report_md",
    "parse_report_csv",
    "reports_equal",
    "emit_history",
    "main",
]

_CSV_HEADER = "solver,iterations,trr,cpu,status"


@dataclass
class SolverRow:
    """One report line: what a single solver did."""

    solver: str
    iterations: int
    trr: float
    cpu: float
    status: str


@dataclass
class RunReport:
    """Benchmark outcome: problem metadata plus one row per solver."""

    matrix: str
    n: int
    nnz: int
    p: int
    tol: float
    seed: int
    norm_ref: str
    backend: str
    parallel: bool = False
    rows: list = field(default_factory=list)

    @property
    def all_converged(self):
        return all(row.status == "converged" for row in self.rows)


def _load_problem(args):
    """Resolve --matrix/--gen into (name, matrix, rhs)."""
    if args.matrix is not None:
        path = Path(args.matrix)
        _, m = read_matrix_market(path)
        b = gen_rhs(m.n, args.p, args.seed)
        return path.stem, m, b
    if args.n is None:
        raise ValueError("generated problems need --n")
    spec = ProblemSpec(
        n=args.n, p=args.p, kind=args.gen, density=args.density, seed=args.seed
    )
    m, b = gen_problem(spec)
    return args.gen, m, b


def _stored_nnz(m):
    if m.storage == "csr":
        return m.nnz
    return int(np.count_nonzero(m.dense))


def run_benchmark(args):
    """Execute the benchmark described by parsed CLI args.

    Solvers run sequentially so the per-solver timings are honest;
    with --parallel they run concurrently on threads and the timings
    are flagged unreliable via the parallel metadata field.

    Returns
    -------
    RunReport
    """
    name, m, b = _load_problem(args)
    if not check_complex_symmetric(m):
        raise ValueError(
            f"matrix {name!r} failed check_complex_symmetric; the solvers "
            "require A equal to its unconjugated transpose"
        )
    solver_names = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if not solver_names:
        raise ValueError("no solvers requested")
    for s in solver_names:
        if s not in SOLVERS:
            raise ValueError(
                f"unknown solver {s!r}; available: {', '.join(SOLVERS)}"
            )
    cfg = SolverConfig(
        tol=args.tol,
        max_iter=args.maxit,
        norm_reference=args.norm_ref,
        record_history=True,
    )

    def _run(s):
        return SOLVERS[s](m, b, None, cfg)

    if args.parallel and len(solver_names) > 1:
        with ThreadPoolExecutor(max_workers=len(solver_names)) as pool:
            results = list(pool.map(_run, solver_names))
    else:
        results = [_run(s) for s in solver_names]
    report = RunReport(
        matrix=name,
        n=m.n,
        nnz=_stored_nnz(m),
        p=args.p if args.matrix is not None else b.shape[1],
        tol=args.tol,
        seed=args.seed,
        norm_ref=args.norm_ref,
        backend=kernels.get_backend(),
        parallel=bool(args.parallel),
    )
    for s, res in zip(solver_names, results):
        report.rows.append(
            SolverRow(
                solver=s,
                iterations=res.iterations,
                trr=res.trr,
                cpu=res.elapsed,
                status=res.status,
            )
        )
    if args.history_dir is not None:
        hist_dir = Path(args.history_dir)
        hist_dir.mkdir(parents=True, exist_ok=True)
        for s, res in zip(solver_names, results):
            with open(hist_dir / f"{s}.csv", "w") as f:
                emit_history(res, f)
    return report


def _meta_line(report):
    return (
        f"# matrix={report.matrix} n={report.n} nnz={report.nnz} "
        f"p={report.p} tol={report.tol!r} seed={report.seed} "
        f"norm_ref={report.norm_ref} backend={report.backend} "
        f"parallel={int(report.parallel)}"
    )


def format_report_csv(report):
    """Render a report as CSV: a '# k=v' metadata line, header, rows."""
    lines = [_meta_line(report), _CSV_HEADER]
    lines.extend(
        f"{r.solver},{r.iterations},{r.trr!r},{r.cpu:.6f},{r.status}"
        for r in report.rows
    )
    return "\n".join(lines) + "\n"


def format_report_md(report):
    """Render a report as an aligned Markdown table."""
    header = ["solver", "iters", "trr", "cpu_s", "status"]
    body = [
        [r.solver, str(r.iterations), f"{r.trr:.2f}", f"{r.cpu:.6f}", r.status]
        for r in report.rows
    ]
    widths = [
        max(len(header[c]), *(len(row[c]) for row in body)) if body else len(header[c])
        for c in range(len(header))
    ]

    def fmt(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    lines = [
        _meta_line(report),
        "",
        fmt(header),
        "|" + "|".join("-" * (w + 2) for w in widths) + "|",
    ]
    lines.extend(fmt(row) for row in body)
    return "\n".join(lines) + "\n"


def parse_report_csv(text):
    """Parse CSV produced by `format_report_csv` back into a RunReport."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("# "):
        raise ValueError("not a benchmark CSV: missing metadata line")
    meta = dict(tok.split("=", 1) for tok in lines[0][2:].split())
    if lines[1] != _CSV_HEADER:
        raise ValueError(f"unexpected header line: {lines[1]!r}")
    report = RunReport(
        matrix=meta["matrix"],
        n=int(meta["n"]),
        nnz=int(meta["nnz"]),
        p=int(meta["p"]),
        tol=float(meta["tol"]),
        seed=int(meta["seed"]),
        norm_ref=meta["norm_ref"],
        backend=meta["backend"],
        parallel=bool(int(meta["parallel"])),
    )
    for ln in lines[2:]:
        solver, iters, trr, cpu, status = ln.split(",", 4)
        report.rows.append(
            SolverRow(
                solver=solver,
                iterations=int(iters),
                trr=float(trr),
                cpu=float(cpu),
                status=status,
            )
        )
    return report


def reports_equal(a, b, ignore_cpu=True):
    """Whether two reports agree, by default ignoring the cpu column."""
    if (
        (a.matrix, a.n, a.nnz, a.p, a.tol, a.seed, a.norm_ref, a.backend, a.parallel)
        != (b.matrix, b.n, b.nnz, b.p, b.tol, b.seed, b.norm_ref, b.backend, b.parallel)
    ) or len(a.rows) != len(b.rows):
        return False
    for ra, rb in zip(a.rows, b.rows):
        if (ra.solver, ra.iterations, ra.status) != (rb.solver, rb.iterations, rb.status):
            return False
        if not (ra.trr == rb.trr or (ra.trr != ra.trr and rb.trr != rb.trr)):
            return False
        if not ignore_cpu and ra.cpu != rb.cpu:
            return False
    return True


def emit_history(result, stream):
    """Write a residual history as CSV: header 'iter,relres', one row
    per recorded iteration including m = 0, shortest round-trip floats."""
    stream.write("iter,relres\n")
    for i, h in enumerate(result.history):
        stream.write(f"{i},{h!r}\n")


def _bench_backends(args):
    """Time every solver under every available backend and check that
    their residual histories agree."""
    name, m, b = _load_problem(args)
    if not check_complex_symmetric(m):
        raise ValueError(
            f"matrix {name!r} failed check_complex_symmetric; the solvers "
            "require A equal to its unconjugated transpose"
        )
    solver_names = [s.strip() for s in args.solvers.split(",") if s.strip()]
    for s in solver_names:
        if s not in SOLVERS:
            raise ValueError(
                f"unknown solver {s!r}; available: {', '.join(SOLVERS)}"
            )
    cfg = SolverConfig(tol=args.tol, max_iter=args.maxit)
    backends = kernels.available_backends()
    repeat = max(1, args.repeat)
    timings = {}
    histories = {}
    ok = True
    for backend in backends:
        with kernels.use_backend(backend):
            SOLVERS[solver_names[0]](m, b, None, cfg)  # warm the kernels
            for s in solver_names:
                best = None
                for _ in range(repeat):
                    res = SOLVERS[s](m, b, None, cfg)
                    best = res.elapsed if best is None else min(best, res.elapsed)
                timings[backend, s] = (best, res.iterations, res.status)
                histories[backend, s] = res.history
                ok = ok and res.status == "converged"
    out = sys.stdout
    out.write(
        f"backend comparison: matrix={name} n={m.n} p={b.shape[1]} "
        f"tol={args.tol!r} best of {repeat}\n"
    )
    header = (
        ["solver"]
        + [f"{be} s" for be in backends]
        + [f"{backends[0]} speedup", "history dev"]
    )
    rows = []
    base = backends[0]
    for s in solver_names:
        cells = [s]
        for be in backends:
            cells.append(f"{timings[be, s][0]:.6f}")
        if len(backends) > 1:
            t0 = timings[base, s][0]
            t1 = timings[backends[1], s][0]
            cells.append(f"{t1 / t0:.2f}x" if t0 > 0 else "n/a")
            ha = np.asarray(histories[base, s])
            hb = np.asarray(histories[backends[1], s])
            k = min(ha.size, hb.size)
            dev = float(
                np.max(np.abs(ha[:k] - hb[:k]) / np.maximum(np.abs(ha[:k]), 1e-300))
            )
            cells.append(f"{dev:.2e}")
        else:
            cells.extend(["n/a", "n/a"])
        rows.append(cells)
    widths = [max(len(header[c]), *(len(r[c]) for r in rows)) for c in range(len(header))]
    out.write("| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |\n")
    out.write("|" + "|".join("-" * (w + 2) for w in widths) + "|\n")
    for r in rows:
        out.write("| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |\n")
    return 0 if ok else 1


def _add_problem_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="Matrix Market file to load")
    src.add_argument("--gen", choices=KINDS, help="generate a seeded problem")
    p.add_argument("--n", type=int, default=None, help="order for --gen")
    p.add_argument(
        "--density", type=float, default=0.05, help="fill fraction for --gen"
    )
    p.add_argument("--p", type=int, default=1, help="number of right-hand sides")
    p.add_argument(
        "--solvers",
        default=",".join(SOLVERS),
        help="comma list of solvers to run (default: all)",
    )
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument(
        "--maxit", type=int, default=None, help="iteration cap (default: n)"
    )
    p.add_argument("--seed", type=int, default=0, help="RHS / generator seed")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cskrylov",
        description="Block Krylov solver benchmark for complex symmetric systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="run solvers on one problem")
    _add_problem_args(solve)
    solve.add_argument(
        "--x0", choices=["zero"], default="zero", help="initial guess policy"
    )
    solve.add_argument(
        "--norm-ref",
        choices=["rhs", "r0"],
        default="rhs",
        help="residual normalization: RHS norm or initial-residual norm",
    )
    solve.add_argument(
        "--out", default="stdout", help="report destination path, or stdout"
    )
    solve.add_argument("--format", choices=["csv", "md"], default="csv")
    solve.add_argument(
        "--history-dir",
        default=None,
        help="write per-solver residual history CSVs into this directory",
    )
    solve.add_argument(
        "--parallel",
        action="store_true",
        help="run solvers concurrently (timings unreliable, flagged in report)",
    )
    bench = sub.add_parser(
        "bench-backends", help="time every solver under every compute backend"
    )
    _add_problem_args(bench)
    bench.add_argument(
        "--repeat", type=int, default=3, help="timed repetitions per solver"
    )
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench-backends":
            if args.matrix is None and args.n is None:
                args.n = 1000
                args.density = 0.02
            return _bench_backends(args)
        report = run_benchmark(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = (
        format_report_csv(report)
        if args.format == "csv"
        else format_report_md(report)
    )
    if args.out in ("stdout", "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0 if report.all_converged else 1


if __name__ == "__main__":
    sys.exit(main())

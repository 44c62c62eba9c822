"""Command-line interface.

    gcoherent element --algebra hw -n 0 -m 0 --z 1,0 --oracle
    gcoherent sweep --algebra su2 --spin 1 --re-min 0 --re-max 3 --re-steps 31 -o w.csv
    gcoherent verify --suite factorization --m-max 4
    gcoherent identities exchange --algebra su11 --spin 0.25 --a 0.4 --b 0.1 --c 0.4

Exit status: 0 success, 2 a verification check failed, 3 the oracle did not
converge, 4 usage or domain error.  Errors are also written to stderr as a
single JSON line.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional

import click
import numpy as np

from . import closed_form as cf
from .errors import DomainError, NoConvergence
from .identities import (
    IdentityCheck,
    bch_check,
    factorization_check,
    group_law_check,
    verify_disentangling,
    verify_exchange,
)
from .oracle import OracleConfig, default_dim_max, oracle_element
from .representations import Algebra, AlgebraSpec
from .suites import SUITES, SuiteOptions, check_record, report_record, run_suites

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_NO_CONVERGENCE = 3
EXIT_USAGE = 4

SWEEP_COLUMNS = (
    "algebra", "spin", "n", "m", "re_z", "im_z", "t",
    "re_val", "im_val", "abs2", "source", "est_error",
    "re_frame", "im_frame", "pole", "status",
)

log = logging.getLogger("gcoherent")


class VerificationFailed(Exception):
    pass


def fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{float(x):.17g}"


def parse_complex(text: str) -> complex:
    """"re,im" or a bare real number."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise click.BadParameter(f"expected 're,im', got {text!r}")


class ComplexParam(click.ParamType):
    name = "re,im"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return parse_complex(value)
        except click.BadParameter as exc:
            self.fail(exc.message, param, ctx)


COMPLEX = ComplexParam()


def _load_config(ctx: click.Context, param, path: Optional[str]):
    """Key-value file; each key mirrors a long flag (dashes or underscores)."""
    if not path:
        return path
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[gcoherent]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise click.BadParameter(str(exc), ctx=ctx, param=param)
    values = {k.replace("-", "_"): v for k, v in parser["gcoherent"].items()}
    default_map: Dict[str, Dict[str, Any]] = {}
    for name, command in cli.commands.items():
        # a key may name the parameter or any of its long flags
        lookup = {}
        for p in command.params:
            lookup[p.name] = p
            for flag in getattr(p, "opts", []):
                if flag.startswith("--"):
                    lookup[flag[2:].replace("-", "_")] = p
        entry: Dict[str, Any] = {}
        for key, raw in values.items():
            option = lookup.get(key)
            if option is None:
                continue
            entry[option.name] = raw.replace(",", " ").split() if getattr(option, "multiple", False) else raw
        default_map[name] = entry
    ctx.default_map = default_map
    return path


def _spec(algebra: str, spin: Optional[float]) -> AlgebraSpec:
    return AlgebraSpec(Algebra(algebra), spin)


def _oracle_cfg(tol: float, dim_max: Optional[int]) -> OracleConfig:
    return OracleConfig(tol=tol, dim_max=dim_max if dim_max is not None else default_dim_max())


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _csv_text(rows: List[Dict[str, str]], columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


ALGEBRA = click.Choice([a.value for a in Algebra])


def common_element_options(fn):
    fn = click.option("--algebra", type=ALGEBRA, required=True, help="hw, su11 or su2.")(fn)
    fn = click.option("--spin", type=float, default=None, help="K for su11, J for su2.")(fn)
    fn = click.option("--t", "t", type=float, default=0.0, show_default=True, help="Diagonal term of V(z,t), W(z,t).")(fn)
    fn = click.option("--tol", type=float, default=1e-10, show_default=True, help="Oracle convergence tolerance.")(fn)
    fn = click.option("--dim-max", type=int, default=None, help="Oracle cutoff cap (default: $ORACLE_DIM_MAX or 2048).")(fn)
    fn = click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True), default=None)(fn)
    return fn


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="Key-value file of option defaults; command-line flags win.",
)
@click.option("--verbose", "-v", is_flag=True, help="Log oracle progress to stderr.")
def cli(verbose: bool) -> None:
    """Matrix elements of U(z), V(z), W(z) and checks of their identities."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@common_element_options
@click.option("-n", "n", type=int, required=True, help="Bra index.")
@click.option("-m", "m", type=int, required=True, help="Ket index.")
@click.option("--z", "z", type=COMPLEX, required=True, help="Displacement as re,im.")
@click.option("--oracle", "use_oracle", is_flag=True, help="Also evaluate the matrix-exponential oracle.")
@click.option("--format", "fmt_", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def element(algebra, spin, t, tol, dim_max, output, n, m, z, use_oracle, fmt_):
    """One matrix element <n| X(z, t) |m>."""
    q = cf.ElementQuery(_spec(algebra, spin), n, m, z, t)
    record: Dict[str, Any] = {"algebra": algebra, "spin": q.algebra.spin, "n": n, "m": m, "z": z, "t": t}
    closed = None
    if t == 0:
        closed = cf.element(q)
        record["closed"] = closed
    if use_oracle or t != 0:
        res = oracle_element(q, _oracle_cfg(tol, dim_max))
        record.update(oracle=res.value, est_error=res.est_error, dim_used=res.dim_used)
        if closed is not None:
            record["abs_diff"] = abs(closed - res.value)
    if fmt_ == "json":
        text = _json_text(_serial(record))
    elif fmt_ == "csv":
        flat = _serial(record)
        text = _csv_text([{k: ("" if v is None else str(v)) for k, v in flat.items()}], flat.keys())
    else:
        lines = []
        for key in ("closed", "oracle", "est_error", "dim_used", "abs_diff"):
            if key in record:
                v = record[key]
                shown = f"{v.real:.17g}{v.imag:+.17g}i" if isinstance(v, complex) else (str(v) if isinstance(v, int) else fmt(v))
                lines.append(f"{key:<10} {shown}")
        text = "\n".join(lines) + "\n"
    _emit(text, output)


def _serial(record: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for k, v in record.items():
        if isinstance(v, complex):
            out[k] = f"{v.real:.17g},{v.imag:.17g}"
        else:
            out[k] = v
    return out


def _axis(lo: float, hi: float, steps: int) -> List[float]:
    if steps < 1:
        return []
    if steps == 1:
        return [float(lo)]
    return [float(x) for x in np.linspace(lo, hi, steps)]


def _sweep_row(spec: AlgebraSpec, n: int, m: int, z: complex, t: float, use_oracle: bool, cfg: OracleConfig) -> Dict[str, str]:
    row = {
        "algebra": spec.kind.value, "spin": fmt(spec.spin), "n": str(n), "m": str(m),
        "re_z": fmt(z.real), "im_z": fmt(z.imag), "t": fmt(t),
        "re_val": "", "im_val": "", "abs2": "", "source": "", "est_error": "",
        "re_frame": "", "im_frame": "", "pole": "", "status": "ok",
    }
    if spec.kind is not Algebra.HW:
        fr = cf.frame(spec, z)
        if fr.pole:
            row["pole"] = "pole"
        else:
            row.update(re_frame=fmt(fr.zeta_or_eta.real), im_frame=fmt(fr.zeta_or_eta.imag))
    try:
        q = cf.ElementQuery(spec, n, m, z, t)
        if use_oracle or t != 0:
            res = oracle_element(q, cfg)
            value, source, est = res.value, "oracle", res.est_error
        else:
            value, source, est = cf.element(q), "closed", None
    except (DomainError, NoConvergence) as exc:
        row["status"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        return row
    row.update(
        re_val=fmt(value.real), im_val=fmt(value.imag), abs2=fmt(abs(value) ** 2), source=source, est_error=fmt(est)
    )
    return row


@cli.command()
@common_element_options
@click.option("--n-min", type=int, default=0, show_default=True)
@click.option("--n-max", type=int, default=0, show_default=True)
@click.option("--m-min", type=int, default=0, show_default=True)
@click.option("--m-max", type=int, default=0, show_default=True)
@click.option("--re-min", type=float, default=0.0, show_default=True)
@click.option("--re-max", type=float, default=0.0, show_default=True)
@click.option("--re-steps", type=int, default=1, show_default=True)
@click.option("--im-min", type=float, default=0.0, show_default=True)
@click.option("--im-max", type=float, default=0.0, show_default=True)
@click.option("--im-steps", type=int, default=1, show_default=True)
@click.option("--oracle", "use_oracle", is_flag=True, help="Use the oracle instead of the closed form.")
@click.option("--format", "fmt_", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def sweep(algebra, spin, t, tol, dim_max, output, n_min, n_max, m_min, m_max,
          re_min, re_max, re_steps, im_min, im_max, im_steps, use_oracle, fmt_):
    """Tabulate elements over an index range and a rectangular z grid.

    Rows come in lexicographic order of (n, m, re z, im z).  A failing
    point is kept with its error in the status column.
    """
    spec = _spec(algebra, spin)
    ns, ms = range(n_min, n_max + 1), range(m_min, m_max + 1)
    res_, ims = _axis(re_min, re_max, re_steps), _axis(im_min, im_max, im_steps)
    if not (ns and ms and res_ and ims):
        raise click.UsageError("the sweep grid is empty")
    cfg = _oracle_cfg(tol, dim_max)
    rows = [
        _sweep_row(spec, n, m, complex(x, y), t, use_oracle, cfg)
        for n in ns for m in ms for x in res_ for y in ims
    ]
    text = _csv_text(rows, SWEEP_COLUMNS) if fmt_ == "csv" else _json_text({"columns": list(SWEEP_COLUMNS), "rows": rows})
    _emit(text, output)


def _report_text(reports) -> str:
    lines = []
    for r in reports:
        worst = r.worst
        tail = "" if worst is None else f"  worst {worst.name} {worst.residual:.3g} (tol {worst.tol:g})"
        status = "PASS" if r.failed == 0 else "FAIL"
        lines.append(f"{status} {r.suite:<15} {r.passed}/{r.total}{tail}")
    return "\n".join(lines) + "\n"


@cli.command()
@click.option("--suite", "suites", multiple=True, type=click.Choice(list(SUITES)), help="Repeatable; default all.")
@click.option("--m-max", type=int, default=None, help="Cap on the index ranges of the suites.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True, help="Oracle convergence tolerance.")
@click.option("--dim-max", type=int, default=None)
@click.option("--timing", is_flag=True, help="Include wall-clock seconds (reports are then not reproducible).")
@click.option("--format", "fmt_", type=click.Choice(["json", "text"]), default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True), default=None)
def verify(suites, m_max, seed, tol, dim_max, timing, fmt_, output):
    """Run the verification suites and report every check."""
    if m_max is not None and m_max < 0:
        raise click.BadParameter("must be >= 0", param_hint="--m-max")
    opts = SuiteOptions(seed=seed, m_max=m_max, oracle=_oracle_cfg(tol, dim_max))
    reports = run_suites(list(suites) or None, opts, timing=timing)
    failed = sum(r.failed for r in reports)
    if fmt_ == "json":
        body = {
            "seed": seed,
            "m_max": m_max,
            "total": sum(r.total for r in reports),
            "passed": sum(r.passed for r in reports),
            "failed": failed,
            "suites": [report_record(r) for r in reports],
        }
        text = _json_text(body)
    else:
        text = _report_text(reports)
    _emit(text, output)
    if failed:
        raise VerificationFailed(f"{failed} check(s) failed")


@cli.group()
def identities():
    """Check a single identity at one parameter point."""


def _finish_check(check: IdentityCheck, output: Optional[str]) -> None:
    _emit(_json_text(check_record(check)), output)
    if not check.passed:
        raise VerificationFailed(f"{check.name}: residual {check.residual:.3g} > tol {check.tol:g}")


_OUT = click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True), default=None)


@identities.command("exchange")
@click.option("--algebra", type=click.Choice(["su11", "su2"]), required=True)
@click.option("--spin", type=float, required=True)
@click.option("--a", "a", type=COMPLEX, required=True)
@click.option("--b", "b", type=COMPLEX, required=True)
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--dim", type=int, default=128, show_default=True, help="Starting su11 cutoff.")
@click.option("--tol", type=float, default=1e-8, show_default=True)
@_OUT
def identities_exchange(algebra, spin, a, b, c, dim, tol, output):
    """e^{aX_-} e^{2bX_3} e^{cX_+} against its normal-ordered form."""
    _finish_check(verify_exchange(_spec(algebra, spin), a, b, c, dim=dim, tol=tol), output)


@identities.command("disentangling")
@click.option("--algebra", type=ALGEBRA, required=True)
@click.option("--spin", type=float, default=None)
@click.option("--z", "z", type=COMPLEX, required=True)
@click.option("--dim", type=int, default=128, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@_OUT
def identities_disentangling(algebra, spin, z, dim, tol, output):
    """Direct exponential against both ordered products."""
    _finish_check(verify_disentangling(_spec(algebra, spin), z, dim=dim, tol=tol), output)


@identities.command("bch")
@click.option("--z", "z", type=COMPLEX, required=True)
@click.option("--dim", type=int, default=128, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@_OUT
def identities_bch(z, dim, tol, output):
    """e^{za^dagger - z*a} = e^{-|z|^2/2} e^{za^dagger} e^{-z*a}."""
    _finish_check(bch_check(z, dim=dim, tol=tol), output)


@identities.command("group-law")
@click.option("--z", "z", type=COMPLEX, required=True)
@click.option("--w", "w", type=COMPLEX, required=True)
@click.option("-n", "n", type=int, required=True)
@click.option("-m", "m", type=int, required=True)
@click.option("--kmax", type=int, default=None)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_OUT
def identities_group_law(z, w, n, m, kmax, tol, output):
    """<n|U(z+w)|m> against the phase times sum_k <n|U(z)|k><k|U(w)|m>."""
    _finish_check(group_law_check(z, w, n, m, kmax=kmax, tol=tol), output)


@identities.command("factorization")
@click.option("--z", "z", type=COMPLEX, required=True)
@click.option("--w", "w", type=COMPLEX, required=True)
@click.option("-m", "m", type=int, required=True)
@click.option("-N", "N", type=int, default=0, show_default=True)
@click.option("--kmax", type=int, default=None)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@_OUT
def identities_factorization(z, w, m, N, kmax, tol, output):
    """L_m^(N)(|z+w|^2) against its factorized series."""
    _finish_check(factorization_check(m, N, z, w, kmax=kmax, tol=tol), output)


def _error_line(kind: str, message: str, code: int) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit status instead of raising."""
    try:
        cli.main(args=argv, prog_name="gcoherent", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        _error_line("Abort", "aborted", EXIT_USAGE)
        return EXIT_USAGE
    except click.ClickException as exc:
        _error_line(type(exc).__name__, exc.format_message(), EXIT_USAGE)
        return EXIT_USAGE
    except VerificationFailed as exc:
        _error_line("VerificationFailed", str(exc), EXIT_FAILED)
        return EXIT_FAILED
    except NoConvergence as exc:
        _error_line("NoConvergence", str(exc), EXIT_NO_CONVERGENCE)
        return EXIT_NO_CONVERGENCE
    except (DomainError, KeyError) as exc:
        _error_line(type(exc).__name__, str(exc), EXIT_USAGE)
        return EXIT_USAGE
    return EXIT_OK


def run() -> None:
    sys.exit(main())

"""Command-line front end.

One subcommand per experiment: compress, mismatch, ree, bound,
dual-check, protocol. Flags mirror parameter names one-to-one; outputs
are JSON (default) or CSV, byte-identical for identical (config, seed).
Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import csv
import io as _io
import json
import sys

import click

from .errors import NumericalError, ValidationError
from . import compression, separable
from .duality import verify_adjoint
from .io import load_protocol, load_state
from .protocol_eval import audit_protocol

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _csv_dump(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _parse_probs(text: str, name: str):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"--{name} must be a comma-separated probability list, got {text!r}")


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ValidationError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_VALIDATION)
        except NumericalError as e:
            click.echo(f"numerical failure: {e}", err=True)
            sys.exit(EXIT_NUMERICAL)


@click.group(cls=_Group)
def main():
    """Local-purity distillation as compression with restricted means."""


@main.command()
@click.option("--state", required=True, help="state JSON file")
@click.option("--n", required=True, type=int, help="number of copies")
@click.option("--epsilon", required=True, type=float, help="fidelity slack in (0, 1)")
@click.option("--out", default=None, help="output path (default stdout)")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv")
def compress(state, n, epsilon, out, fmt):
    """Typical-subspace dimension and purity rate for rho^(x)n."""
    rho = load_state(state)
    res = compression.purity_rate(rho, n, epsilon)
    row = {
        "n": res.n, "epsilon": res.epsilon, "dim": res.projector_dim,
        "rate": res.rate_bits_per_copy, "purity_rate": res.purity_rate,
        "min_trace": res.min_trace,
    }
    if fmt == "csv":
        _emit(_csv_dump(row.keys(), [row.values()]), out)
    else:
        _emit(_json_dump(row), out)


@main.command()
@click.option("--p", "p_text", required=True, help="source distribution, e.g. 0.9,0.1")
@click.option("--q", "q_text", required=True, help="assumed distribution, e.g. 0.6,0.4")
@click.option("--n", required=True, type=int)
@click.option("--epsilon", required=True, type=float)
@click.option("--out", default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
def mismatch(p_text, q_text, n, epsilon, out, fmt):
    """Rate of compressing a p-source with machinery built for q."""
    p = _parse_probs(p_text, "p")
    q = _parse_probs(q_text, "q")
    res = compression.mismatched_detail(p, q, n, epsilon)
    row = {
        "n": n, "epsilon": epsilon, "rate": res.rate_bits_per_copy,
        "class_count": res.class_count, "set_size": res.set_size, "p_mass": res.p_mass,
    }
    if fmt == "csv":
        _emit(_csv_dump(row.keys(), [row.values()]), out)
    else:
        _emit(_json_dump(row), out)


def _ree_options(fn):
    for opt in (
        click.option("--state", required=True),
        click.option("--seed", required=True, type=int,
                     help="seed is mandatory: runs must be reproducible"),
        click.option("--restarts", default=separable.DEFAULT_RESTARTS, type=int),
        click.option("--tol", default=separable.DEFAULT_TOL, type=float),
        click.option("--max-iters", default=separable.DEFAULT_MAX_ITERS, type=int),
        click.option("--out", default=None),
    ):
        fn = opt(fn)
    return fn


@main.command()
@_ree_options
@click.option("--ensemble", "with_ensemble", is_flag=True,
              help="include the separable ensemble certificate")
def ree(state, seed, restarts, tol, max_iters, out, with_ensemble):
    """Relative entropy of entanglement (inner approximation), in bits."""
    rho = load_state(state)
    res = separable.ree(rho, max_iters=max_iters, restarts=restarts, tol=tol, seed=seed)
    obj = {
        "value_bits": res.value_bits, "iterations": res.iterations,
        "gap": res.gap, "seed": res.seed,
    }
    if with_ensemble:
        obj["ensemble"] = [
            {"weight": w,
             "a": [[v.real, v.imag] for v in a],
             "b": [[v.real, v.imag] for v in b]}
            for w, a, b in res.ensemble.terms
        ]
    _emit(_json_dump(obj), out)


@main.command()
@_ree_options
def bound(state, seed, restarts, tol, max_iters, out):
    """Separable upper bound log2(dA dB) - S(rho) - REE(rho)."""
    rho = load_state(state)
    rep = separable.ubound_rate(rho, max_iters=max_iters, restarts=restarts,
                                tol=tol, seed=seed)
    _emit(_json_dump({
        "terms": {
            "log_dim_bits": rep.log_dim_bits,
            "entropy_bits": rep.entropy_bits,
            "ree_bits": rep.ree_bits,
        },
        "bound_bits": rep.bound_bits,
        "seed": rep.seed,
        "iterations": rep.iterations,
    }), out)


@main.command("dual-check")
@click.option("--protocol", "protocol_path", required=True, help="protocol JSON file")
@click.option("--trials", default=200, type=int)
@click.option("--tol", default=1e-9, type=float)
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None)
def dual_check(protocol_path, trials, tol, seed, out):
    """Verify Tr(A^dag L(B)) = Tr(L^dag(A^dag) B) on random operator pairs."""
    protocol = load_protocol(protocol_path)
    report = verify_adjoint(protocol.compose(), trials=trials, tol=tol, seed=seed)
    _emit(_json_dump(report), out)


@main.command("protocol")
@click.option("--protocol", "protocol_path", required=True)
@click.option("--state", required=True)
@click.option("--n", required=True, type=int)
@click.option("--m", required=True, type=int)
@click.option("--out", default=None)
def protocol_cmd(protocol_path, state, n, m, out):
    """Audit a distillation protocol: fidelities, Pi trace, PPT, rate."""
    protocol = load_protocol(protocol_path)
    rho = load_state(state)
    report = audit_protocol(protocol, rho, n, m)
    _emit(_json_dump(report.to_dict()), out)


if __name__ == "__main__":
    main()

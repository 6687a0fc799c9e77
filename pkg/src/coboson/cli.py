"""Command-line front end: spectra, tables, observables and figure data.

Exit codes: 0 success, 1 failed verification, 2 usage errors (including
refusing to overwrite without ``--force``), 3 numeric-range errors,
4 oracle-cap refusals.  Every written table starts with ``# key: value``
provenance lines (command, parameters, package versions, spectrum
fingerprint); nothing time- or host-dependent is recorded, so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__, bell, ensemble, oracle, splitting, spectrum, sympoly
from .spectrum import SpectrumError

EXIT_FAIL, EXIT_USAGE, EXIT_RANGE, EXIT_CAP = 1, 2, 3, 4
THREADS_ENV = sympoly.THREADS_ENV
PRECISION_ENV = splitting.PRECISION_ENV
DEFAULT_T = 56
FIG_NAMES = ("fig1a", "fig1b", "fig1c", "fig2", "fig3", "fig4", "fig5")

log = logging.getLogger("coboson")


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _g(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _versions() -> dict:
    import numba
    import scipy
    return {"coboson": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__}


def _clean(params: dict) -> dict:
    out = {}
    for k, v in sorted(params.items()):
        if isinstance(v, Path):
            v = str(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def table_text(columns, rows, meta: dict) -> str:
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in meta.items()]
    lines.append(",".join(columns))
    lines += [",".join(_g(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def _check_target(path: Path | None, force: bool):
    if path is not None and path.exists() and not force:
        raise click.UsageError(f"{path} exists; pass --force to overwrite")


def emit(ctx, columns, rows, out: Path | None, meta_extra: dict | None = None):
    """Write a provenance-headed CSV table to ``out`` (stdout if None)."""
    root = ctx.find_root()
    meta = {"command": ctx.command_path,
            "params": _clean(ctx.params), "versions": _versions(),
            "precision": splitting.precision_mode()}
    meta.update(meta_extra or {})
    text = table_text(columns, rows, meta)
    if out is None:
        click.echo(text, nl=False)
    else:
        _check_target(out, root.params.get("force", False) or ctx.params.get("force", False))
        out.write_text(text)
    return text


def _threads(n: int | None) -> int:
    if n is not None:
        os.environ[THREADS_ENV] = str(n)
    return sympoly.num_threads()


def pmap(fn, items, threads: int):
    """Map over sweep points; results come back in sweep order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def load_spectrum(path: Path | None, preset: str | None):
    if (path is None) == (preset is None):
        raise click.UsageError("give exactly one of --spectrum or --preset")
    if preset is not None:
        from .solver import load_preset
        return load_preset(preset)
    return spectrum.read_spectrum(path)


def spectrum_options(f):
    f = click.option("--preset", type=click.Choice(["0.5", "1", "2"]), default=None,
                     help="shipped solver spectrum for (k_F a)^-1")(f)
    f = click.option("--spectrum", "spectrum_path", type=click.Path(exists=True, dir_okay=False,
                                                                     path_type=Path),
                     default=None, help="spectrum file")(f)
    return f


def out_option(f):
    return click.option("-o", "--out", type=click.Path(dir_okay=False, path_type=Path),
                        default=None, help="output file (default: stdout)")(f)


def _spec_meta(spec) -> dict:
    return {"spectrum": {"fingerprint": spec.fingerprint, "S": spec.S,
                         "kind": spec.provenance.get("kind"),
                         "inv_kfa": spec.provenance.get("inv_kfa")}}


def _need(cond, msg):
    if not cond:
        raise click.UsageError(msg)


# ---------------------------------------------------------------------------
# root
# ---------------------------------------------------------------------------

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="coboson")
@click.option("--threads", type=click.IntRange(1, 1024), default=None,
              help=f"worker threads (env {THREADS_ENV})")
@click.option("--precision", type=click.Choice(splitting.PRECISION_MODES), default=None,
              help=f"alpha-coefficient precision mode (env {PRECISION_ENV})")
@click.option("--force", is_flag=True, help="overwrite existing outputs")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def cli(ctx, threads, precision, force, verbose):
    """Coboson Schmidt-spectrum engine."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if precision:
        os.environ[PRECISION_ENV] = precision
    splitting.precision_mode()  # validate the environment early
    ctx.ensure_object(dict)
    ctx.obj["threads"] = _threads(threads)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

@cli.group("spectrum")
def spectrum_group():
    """Create or inspect Schmidt spectra."""


@spectrum_group.command("synth")
@click.option("--kind", type=click.Choice(["flat", "geometric", "custom"]), required=True)
@click.option("--size", type=click.IntRange(1), default=None)
@click.option("--ratio", type=float, default=None)
@click.option("--weights", type=str, default=None, help="comma-separated weights (custom)")
@click.option("-o", "--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_context
def spectrum_synth(ctx, kind, size, ratio, weights, out):
    """Synthetic spectrum (flat, geometric or custom weights)."""
    if kind in ("flat", "geometric"):
        _need(size is not None, f"--size is required for kind {kind}")
    if kind == "geometric":
        _need(ratio is not None and 0.0 < ratio < 1.0, "--ratio must lie in (0, 1)")
    w = None
    if kind == "custom":
        _need(weights is not None, "--weights is required for kind custom")
        try:
            w = [float(x) for x in weights.split(",") if x.strip()]
        except ValueError:
            raise click.BadParameter("weights must be numbers", param_hint="--weights")
    _check_target(out, ctx.find_root().params["force"])
    spec = spectrum.synth_spectrum(kind, size=size, ratio=ratio, weights=w)
    spectrum.write_spectrum(spec, out)
    click.echo(f"wrote {out} (S={spec.S}, fingerprint {spec.fingerprint})", err=True)


@spectrum_group.command("solve")
@click.option("--preset", type=click.Choice(["0.5", "1", "2"]), default=None)
@click.option("--inv-kfa", type=float, default=None, help="(k_F a)^-1 (>= 0.5)")
@click.option("--n", "N", type=click.IntRange(1), default=None, help="reference pair number for k_F")
@click.option("--l-max", type=click.IntRange(0), default=None)
@click.option("--tail", type=float, default=1e-7, show_default=True,
              help="stop adding partial waves below this channel weight")
@click.option("--keep", type=float, default=spectrum.KEEP_WEIGHT, show_default=True,
              help="cumulative weight kept before renormalising")
@click.option("-o", "--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_context
def spectrum_solve(ctx, preset, inv_kfa, N, l_max, tail, keep, out):
    """Solve the model two-body problem and Schmidt-decompose it."""
    from . import solver
    _need((preset is None) != (inv_kfa is None), "give exactly one of --preset or --inv-kfa")
    _need(0.0 < keep <= 1.0, "--keep must lie in (0, 1]")
    if preset is not None:
        params = solver.preset_params(preset)
    else:
        _need(inv_kfa >= 0.5, "--inv-kfa must be >= 0.5 for solver spectra")
        params = solver.PhysicalParams.from_inv_kfa(inv_kfa, N=N or solver.PRESET_N)
    _check_target(out, ctx.find_root().params["force"])
    spec = solver.solver_spectrum(params, l_max=l_max, tail=tail, keep=keep)
    spectrum.write_spectrum(spec, out)
    click.echo(f"wrote {out} (S={spec.S}, shells={spec.n_shells}, "
               f"discarded {spec.truncation['discarded_weight']:.3g})", err=True)


@spectrum_group.command("inspect")
@spectrum_options
@click.option("--top", type=click.IntRange(0), default=10, show_default=True)
@out_option
@click.pass_context
def spectrum_inspect(ctx, spectrum_path, preset, top, out):
    """Summary of a spectrum and its leading shells."""
    spec = load_spectrum(spectrum_path, preset)
    lam, g = spec.shell_lambdas, spec.degeneracy
    schmidt_number = 1.0 / math.fsum((g * lam * lam).tolist())
    rows = [(i + 1, int(spec.shell_first_index()[i]) + 1, int(spec.shell_n[i]), int(spec.shell_l[i]),
             int(g[i]), float(lam[i]), float(spec.shell_energy[i]))
            for i in range(min(top, spec.n_shells))]
    meta = _spec_meta(spec)
    meta["summary"] = {"S": spec.S, "shells": spec.n_shells, "schmidt_number": schmidt_number,
                       "lambda_max": float(lam.max()), "truncation": spec.truncation,
                       "provenance": spec.provenance}
    emit(ctx, ["shell", "j", "n", "l", "g", "lambda", "energy"], rows, out, meta)


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

@cli.command("chi")
@spectrum_options
@click.option("--k", "K", type=click.IntRange(0), required=True, help="highest order")
@click.option("--method", type=click.Choice(["dp", "newton"]), default="dp", show_default=True)
@out_option
@click.pass_context
def chi_cmd(ctx, spectrum_path, preset, K, method, out):
    """Table of log e_k and log chi_k = log(k! e_k)."""
    spec = load_spectrum(spectrum_path, preset)
    if method == "dp":
        table = sympoly.chi_table(spec, K)
    else:
        table = sympoly.chi_newton(sympoly.power_sums(spec, K), K)
    rows = [(k, float(table.log_e[k]), table.log_chi(k) if np.isfinite(table.log_e[k]) else -math.inf)
            for k in range(K + 1)]
    meta = _spec_meta(spec)
    meta["table"] = {"method": table.method, "notes": list(table.notes)}
    emit(ctx, ["k", "log_e", "log_chi"], rows, out, meta)


def _ens(spec, N, K=None):
    if N > spec.S:
        raise ensemble.EnsembleError(f"N={N} exceeds Schmidt rank S={spec.S}")
    return ensemble.make_ensemble(spec, N, K=K)


@cli.command("density")
@spectrum_options
@click.option("--n", "N", type=click.IntRange(1), required=True)
@click.option("--shells", "max_shells", type=click.IntRange(1), default=None,
              help="only the first shells (energy order)")
@out_option
@click.pass_context
def density_cmd(ctx, spectrum_path, preset, N, max_shells, out):
    """Occupations D_j and spectral density g N D per shell."""
    spec = load_spectrum(spectrum_path, preset)
    ens = _ens(spec, N)
    D = ensemble.shell_occupations(ens)
    approx = ensemble.occupation_approx(spec.shell_lambdas, N)
    first = spec.shell_first_index()
    k = spec.n_shells if max_shells is None else min(max_shells, spec.n_shells)
    rows = [(int(first[i]) + 1, int(spec.shell_n[i]), int(spec.shell_l[i]), int(spec.degeneracy[i]),
             float(spec.shell_lambdas[i]), float(spec.shell_energy[i]), float(D[i]), float(N * D[i]),
             float(spec.degeneracy[i] * N * D[i]), float(approx[i])) for i in range(k)]
    meta = _spec_meta(spec)
    meta["sum_rule"] = {"sum_D": math.fsum((spec.degeneracy * D).tolist())}
    emit(ctx, ["j", "n", "l", "g", "lambda", "energy", "D", "ND", "n_spect", "D_approx"], rows, out, meta)


@cli.command("counts")
@spectrum_options
@click.option("--n", "N", type=click.IntRange(1), required=True)
@click.option("--t", type=click.IntRange(1), default=DEFAULT_T, show_default=True)
@click.option("--m", "M", type=click.IntRange(0), default=None,
              help="pairs in mode 1: emit the split marginal P1(n1)")
@out_option
@click.pass_context
def counts_cmd(ctx, spectrum_path, preset, N, t, M, out):
    """Pair-number distribution in the t lowest states (unsplit or mode 1)."""
    spec = load_spectrum(spectrum_path, preset)
    _need(t <= spec.S, f"--t must be <= S={spec.S}")
    if M is not None:
        _need(M <= N, "--m must be <= --n")
    ens = _ens(spec, N)
    window = ensemble.CountWindow.build(ens, t)
    meta = _spec_meta(spec)
    meta["window"] = ensemble.window_report(ens, t)
    if M is None:
        P = ensemble.count_distribution(ens, window)
        emit(ctx, ["n", "P"], [(n, float(p)) for n, p in enumerate(P)], out, meta)
    else:
        P1 = splitting.marginal_count(ens, M, window)
        b = splitting.binomial_pmf(t, 0.5)
        meta["tv_binomial"] = splitting.total_variation(P1, b)
        emit(ctx, ["n1", "P1"], [(n, float(p)) for n, p in enumerate(P1)], out, meta)


def _purity_row(ens, N, M):
    lp = splitting.log_purity(ens, M)
    return (M, 1.0 - 2.0 * M / N, math.exp(lp), lp / math.log(10.0), 1.0 / math.comb(N, M))


@cli.command("purity")
@spectrum_options
@click.option("--n", "N", type=click.IntRange(1), required=True)
@click.option("--m", "M", type=click.IntRange(0), default=None)
@click.option("--sweep-m", is_flag=True, help="all M = 0..N")
@click.option("--step", type=click.IntRange(1), default=1, show_default=True, help="M step for --sweep-m")
@out_option
@click.pass_context
def purity_cmd(ctx, spectrum_path, preset, N, M, sweep_m, step, out):
    """Purity of mode 1 after projecting on M pairs there."""
    _need((M is None) == sweep_m, "give exactly one of --m or --sweep-m")
    if M is not None:
        _need(M <= N, "--m must be <= --n")
    spec = load_spectrum(spectrum_path, preset)
    ens = _ens(spec, N, K=2 * N)
    Ms = list(range(0, N + 1, step)) if sweep_m else [M]
    if sweep_m and Ms[-1] != N:
        Ms.append(N)
    # P(M) = P(N-M): evaluate the lower half once
    half = sorted({min(m, N - m) for m in Ms})
    vals = dict(zip(half, pmap(lambda m: _purity_row(ens, N, m), half, ctx.obj["threads"])))
    rows = []
    for m in Ms:
        r = vals[min(m, N - m)]
        rows.append((m, 1.0 - 2.0 * m / N) + r[2:])
    emit(ctx, ["M", "x", "purity", "log10_purity", "lower_bound"], rows, out, _spec_meta(spec))


def _log_grid(n_from, n_to, steps):
    if steps <= 1:
        return [n_from]
    g = np.unique(np.round(np.logspace(math.log10(n_from), math.log10(n_to), steps)).astype(int))
    return [int(x) for x in g]


def _bound_rows(Ns):
    out = []
    for N in (Ns[0], Ns[-1]):
        out.append(("classical", N, "", "", bell.CLASSICAL, "", "", "", "", "bound"))
    for N in (Ns[0], Ns[-1]):
        out.append(("tsirelson", N, "", "", bell.TSIRELSON, "", "", "", "", "bound"))
    return out


@cli.command("bell")
@spectrum_options
@click.option("--j", "j", type=click.IntRange(1), required=True, help="single-fermion state (1-based)")
@click.option("--n-from", type=click.IntRange(1), required=True)
@click.option("--n-to", type=click.IntRange(1), required=True)
@click.option("--log-steps", type=click.IntRange(1), default=40, show_default=True)
@click.option("--m-frac", type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True,
              help="M = round(m_frac * N)")
@click.option("--exact-max", type=click.IntRange(1), default=5000, show_default=True,
              help="largest N evaluated exactly; beyond it D_j = lambda_j / (1 + lambda_j (N-1))")
@click.option("--approx", is_flag=True, help="use the approximate D_j at every N")
@click.option("--bounds", is_flag=True, help="append classical and Tsirelson reference rows")
@out_option
@click.pass_context
def bell_cmd(ctx, spectrum_path, preset, j, n_from, n_to, log_steps, m_frac, exact_max, approx,
             bounds, out):
    """CHSH correlators for state j over a logarithmic sweep of N.

    Points with N above the Schmidt rank (where the state vanishes) are
    skipped and listed in the header.
    """
    _need(n_from <= n_to, "--n-from must be <= --n-to")
    spec = load_spectrum(spectrum_path, preset)
    _need(j <= spec.S, f"--j must be <= S={spec.S}")
    grid = _log_grid(n_from, n_to, log_steps)
    Ns = [n for n in grid if n <= spec.S]
    skipped = [n for n in grid if n > spec.S]
    if skipped:
        log.warning("skipping %d points with N > S=%d", len(skipped), spec.S)
    exact = [] if approx else [n for n in Ns if n <= exact_max]
    rest = [n for n in Ns if n not in exact]
    rows = (bell.chsh_sweep(spec, j, exact, m_frac) if exact else []) + \
        (bell.chsh_sweep(spec, j, rest, m_frac, approx=True) if rest else [])
    if bounds and Ns:
        rows += _bound_rows(Ns)
    meta = _spec_meta(spec)
    meta["skipped_N"] = skipped
    emit(ctx, bell.SWEEP_COLUMNS, rows, out, meta)


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

@cli.command("figures")
@click.argument("names", nargs=-1, type=click.Choice(FIG_NAMES + ("all",)))
@click.option("--outdir", type=click.Path(file_okay=False, path_type=Path), default=Path("."),
              show_default=True)
@click.option("--render", is_flag=True, help="also write an SVG rendering (needs matplotlib)")
@click.pass_context
def figures_cmd(ctx, names, outdir, render):
    """Data tables behind the figures, from the shipped presets."""
    from . import figures
    _need(names, "name at least one figure (or 'all')")
    todo = FIG_NAMES if "all" in names else tuple(dict.fromkeys(names))
    force = ctx.find_root().params["force"]
    outdir.mkdir(parents=True, exist_ok=True)
    for name in todo:
        datasets = figures.BUILDERS[name](threads=ctx.obj["threads"])
        for fname, (columns, rows, meta) in datasets.items():
            path = outdir / f"{fname}.csv"
            _check_target(path, force)
            head = {"command": f"coboson figures {name}", "figure": fname, "versions": _versions(),
                    "precision": splitting.precision_mode()}
            head.update(meta)
            path.write_text(table_text(columns, rows, head))
            click.echo(f"wrote {path}", err=True)
            if render:
                svg = outdir / f"{fname}.svg"
                _check_target(svg, force)
                figures.render(fname, columns, rows, svg)
                click.echo(f"wrote {svg}", err=True)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@cli.command("verify")
@click.option("--spectra", "n_spectra", type=click.IntRange(1), default=100, show_default=True,
              help="random spectra per (S, N)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--s-max", type=click.IntRange(2), default=6, show_default=True,
              help="Largest single-particle basis enumerated (oracle cap 14).")
@click.option("--n-max", type=click.IntRange(2), default=3, show_default=True,
              help="Largest pair number enumerated (oracle cap 6).")
@click.pass_context
def verify_cmd(ctx, n_spectra, seed, s_max, n_max):
    """Oracle equivalence suite; exits 1 if any comparison fails."""
    from . import verify
    ok = verify.run(n_spectra, seed, echo=click.echo, s_max=s_max, n_max=n_max)
    click.echo("verify: all checks passed" if ok else "verify: FAILURES")
    ctx.exit(0 if ok else EXIT_FAIL)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

RANGE_ERRORS = (sympoly.RangeError, ensemble.EnsembleError, bell.OccupationError,
                splitting.InstabilityError, SpectrumError, ArithmeticError, ValueError)


def main(argv=None) -> int:
    """Run the CLI and map failures onto the documented exit codes."""
    try:
        cli.main(args=argv, prog_name="coboson", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_FAIL
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE if e.exit_code == 2 else e.exit_code
    except oracle.OracleCapError as e:
        click.echo(f"error: oracle cap: {e}", err=True)
        return EXIT_CAP
    except FileExistsError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    except RANGE_ERRORS as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return EXIT_RANGE
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

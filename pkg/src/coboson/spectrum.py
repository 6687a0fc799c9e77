"""Schmidt spectra: shell bookkeeping, synthetic generators and file I/O."""
from __future__ import annotations

import gzip
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import __version__
from .sympoly import fingerprint

NORM_TOL = 1e-12
KEEP_WEIGHT = 1.0 - 1e-10


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class Shell:
    n: int
    l: int
    lam: float
    energy: float = float("nan")

    @property
    def degeneracy(self) -> int:
        return 2 * self.l + 1


class SchmidtSpectrum:
    """Ordered Schmidt coefficients with their (n, l, m) labels.

    Storage is per shell (``shell_n``, ``shell_l``, ``shell_lambdas``,
    ``shell_energy``); every shell stands for ``2l+1`` states of equal
    coefficient.  Per-state views (``lambdas[j-1]`` for state j, labels, m)
    are built on first use.  Instances are treated as immutable.
    """

    def __init__(self, shell_n, shell_l, shell_lambdas, shell_energy=None,
                 truncation=None, provenance=None):
        self.shell_n = np.asarray(shell_n, dtype=np.int64)
        self.shell_l = np.asarray(shell_l, dtype=np.int64)
        self.shell_lambdas = np.asarray(shell_lambdas, dtype=float)
        k = self.shell_lambdas.shape[0]
        self.shell_energy = (np.full(k, np.nan) if shell_energy is None
                             else np.asarray(shell_energy, dtype=float))
        if not (self.shell_n.shape == self.shell_l.shape == self.shell_energy.shape == (k,)):
            raise SpectrumError("shell arrays must be one-dimensional and of equal length")
        if np.any(self.shell_l < 0):
            raise SpectrumError("angular momentum must be >= 0")
        for arr in (self.shell_n, self.shell_l, self.shell_lambdas, self.shell_energy):
            arr.setflags(write=False)
        self.truncation = dict(truncation or {})
        self.provenance = dict(provenance or {})

    def __repr__(self):
        return f"SchmidtSpectrum(S={self.S}, shells={self.n_shells}, provenance={self.provenance!r})"

    # -- shell level ------------------------------------------------------
    @property
    def n_shells(self) -> int:
        return int(self.shell_lambdas.shape[0])

    @cached_property
    def degeneracy(self) -> np.ndarray:
        g = 2 * self.shell_l + 1
        g.setflags(write=False)
        return g

    @cached_property
    def shells(self) -> tuple:
        return tuple(Shell(int(n), int(l), float(x), float(E)) for n, l, x, E in
                     zip(self.shell_n, self.shell_l, self.shell_lambdas, self.shell_energy))

    @cached_property
    def S(self) -> int:
        return int(self.degeneracy.sum())

    def __len__(self):
        return self.S

    @property
    def has_shells(self) -> bool:
        return bool(np.any(self.shell_l > 0)) or self.provenance.get("kind") == "solver"

    @cached_property
    def fingerprint(self) -> str:
        return fingerprint(self.shell_lambdas, self.degeneracy)

    def shell_first_index(self) -> np.ndarray:
        """0-based flattened index of the first state of every shell."""
        return np.concatenate([[0], np.cumsum(self.degeneracy)[:-1]]).astype(np.int64)

    def shell_of(self, j: int) -> int:
        """0-based shell index of state ``j`` (1-based)."""
        if not 1 <= j <= self.S:
            raise IndexError(f"state {j} outside 1..{self.S}")
        return int(np.searchsorted(np.cumsum(self.degeneracy), j, side="left"))

    def shell_of_state(self, j: int) -> Shell:
        """Shell containing state ``j`` (1-based)."""
        i = self.shell_of(j)
        return Shell(int(self.shell_n[i]), int(self.shell_l[i]),
                     float(self.shell_lambdas[i]), float(self.shell_energy[i]))

    def split(self, t: int):
        """Degeneracies of the first t states and of the rest, per shell."""
        if not 0 <= t <= self.S:
            raise IndexError(f"split point {t} outside 0..{self.S}")
        cum = np.cumsum(self.degeneracy)
        inside = np.clip(t - (cum - self.degeneracy), 0, self.degeneracy)
        return inside, self.degeneracy - inside

    # -- state level (lazy) ------------------------------------------------
    def _ro(self, arr):
        arr.setflags(write=False)
        return arr

    @cached_property
    def shell_index(self) -> np.ndarray:
        return self._ro(np.repeat(np.arange(self.n_shells, dtype=np.int64), self.degeneracy))

    @cached_property
    def lambdas(self) -> np.ndarray:
        return self._ro(np.repeat(self.shell_lambdas, self.degeneracy))

    @cached_property
    def m(self) -> np.ndarray:
        start = np.repeat(self.shell_first_index(), self.degeneracy)
        return self._ro(np.arange(self.S, dtype=np.int64) - start - self.l)

    @property
    def n(self) -> np.ndarray:
        return self.shell_n[self.shell_index]

    @property
    def l(self) -> np.ndarray:
        return self.shell_l[self.shell_index]

    @property
    def energy(self) -> np.ndarray:
        return self.shell_energy[self.shell_index]


def _shell_arrays(shells):
    shells = list(shells)
    return (np.array([s.n for s in shells], dtype=np.int64),
            np.array([s.l for s in shells], dtype=np.int64),
            np.array([s.lam for s in shells], dtype=float),
            np.array([s.energy for s in shells], dtype=float))


def energy_order(energy, l) -> np.ndarray:
    """Permutation ordering shells by (energy, l); ties keep input order."""
    energy = np.asarray(energy, float)
    if np.any(np.isnan(energy)):
        raise SpectrumError("shell energies missing; cannot order by energy")
    idx = np.arange(energy.shape[0])
    return np.lexsort((idx, np.asarray(l), energy))


def normalize_weights(lam, g, keep: float = KEEP_WEIGHT, deficit_tol: float | None = None):
    """Shells kept by truncation at cumulative weight ``keep``, and the record.

    Truncation drops the smallest coefficients first (whole shells).  Returns
    ``(mask, factor, record)``; multiply the kept coefficients by ``factor``.
    """
    lam = np.asarray(lam, float)
    g = np.asarray(g, np.int64)
    pos = lam > 0
    if not pos.any():
        raise SpectrumError("spectrum is not normalizable (no positive weight)")
    w = lam * g
    total = math.fsum(w[pos].tolist())
    if deficit_tol is not None and abs(1.0 - total) > deficit_tol:
        raise SpectrumError(f"normalization deficit {1.0 - total:.3e} exceeds tolerance {deficit_tol:g}")
    order = np.argsort(-lam, kind="stable")
    order = order[pos[order]]
    before = np.concatenate([[0.0], np.cumsum(w[order])[:-1]])
    kept = order[before < keep * total]
    mask = np.zeros(lam.shape, dtype=bool)
    mask[kept] = True
    discarded = math.fsum(w[pos & ~mask].tolist())
    factor = 1.0 / math.fsum(w[mask].tolist())
    record = {
        "raw_weight": total,
        "discarded_weight": discarded,
        "renormalization_factor": factor,
        "kept_shells": int(mask.sum()),
        "dropped_shells": int(pos.sum() - mask.sum()),
    }
    return mask, factor, record


def normalize_shells(shells, keep: float = KEEP_WEIGHT, deficit_tol: float | None = None):
    """Truncate a list of shells to cumulative weight ``keep`` and renormalise."""
    n, l, lam, E = _shell_arrays(shells)
    mask, factor, record = normalize_weights(lam, 2 * l + 1, keep, deficit_tol)
    out = [Shell(int(a), int(b), float(x * factor), float(e))
           for a, b, x, e in zip(n[mask], l[mask], lam[mask], E[mask])]
    return out, record


def from_arrays(n, l, lam, energy=None, provenance=None, keep: float = KEEP_WEIGHT,
                deficit_tol: float | None = None, sort: bool = True) -> SchmidtSpectrum:
    """Truncate, renormalise and (optionally) energy-order shell arrays."""
    n = np.asarray(n, np.int64)
    l = np.asarray(l, np.int64)
    lam = np.asarray(lam, float)
    energy = np.full(lam.shape, np.nan) if energy is None else np.asarray(energy, float)
    mask, factor, record = normalize_weights(lam, 2 * l + 1, keep, deficit_tol)
    n, l, lam, energy = n[mask], l[mask], lam[mask] * factor, energy[mask]
    if sort:
        o = energy_order(energy, l)
        n, l, lam, energy = n[o], l[o], lam[o], energy[o]
    # one more pass so the flattened sum is 1 to rounding
    s = math.fsum((lam * (2 * l + 1)).tolist())
    if abs(s - 1.0) > 1e-15:
        lam = lam / s
        record["renormalization_factor"] /= s
    record["sum_lambda"] = math.fsum((lam * (2 * l + 1)).tolist())
    return SchmidtSpectrum(n, l, lam, energy, record, provenance)


def from_shells(shells, provenance=None, keep: float = KEEP_WEIGHT,
                deficit_tol: float | None = None, sort: bool = True) -> SchmidtSpectrum:
    n, l, lam, E = _shell_arrays(shells)
    return from_arrays(n, l, lam, E, provenance, keep, deficit_tol, sort)


def synth_spectrum(kind: str, size: int | None = None, ratio: float | None = None,
                   weights=None) -> SchmidtSpectrum:
    """Synthetic spectra: ``flat``, ``geometric`` or ``custom``.

    Synthetic spectra have one nondegenerate entry per state and keep the
    given order; they carry no energies.
    """
    if kind == "flat":
        if not size or size < 1:
            raise SpectrumError("flat spectrum needs size >= 1")
        w = np.full(size, 1.0 / size)
        prov = {"kind": "synthetic", "synthetic": "flat", "size": size}
    elif kind == "geometric":
        if not size or size < 1:
            raise SpectrumError("geometric spectrum needs size >= 1")
        if ratio is None or not 0.0 < ratio < 1.0:
            raise SpectrumError("geometric ratio must lie in (0, 1)")
        j = np.arange(size)
        w = ratio ** j * (1.0 - ratio) / (1.0 - ratio ** size)
        prov = {"kind": "synthetic", "synthetic": "geometric", "size": size, "ratio": ratio}
    elif kind == "custom":
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise SpectrumError("custom weights must be a nonempty nonnegative sequence")
        if not np.any(w > 0):
            raise SpectrumError("spectrum is not normalizable (all weights zero)")
        w = w[w > 0]
        prov = {"kind": "synthetic", "synthetic": "custom", "size": int(w.size)}
    else:
        raise SpectrumError(f"unknown synthetic kind {kind!r}")
    # synthetic spectra are never truncated
    return from_arrays(np.arange(w.size), np.zeros(w.size, np.int64), w, None, prov,
                       keep=2.0, sort=False)


def from_lambdas(lambdas, provenance=None) -> SchmidtSpectrum:
    """Wrap a plain coefficient sequence (kept in the given order)."""
    spec = synth_spectrum("custom", weights=lambdas)
    if provenance is not None:
        spec.provenance.update(provenance)
    return spec


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def _g17(x: float) -> str:
    return format(float(x), ".17g")


SHELL_SUFFIXES = (".shells.csv", ".shells.csv.gz")


def _is_shell_file(path: Path) -> bool:
    return any(path.name.endswith(x) for x in SHELL_SUFFIXES)


def provenance_header(spec: SchmidtSpectrum) -> dict:
    return {
        "format": "coboson-spectrum/1",
        "version": __version__,
        "fingerprint": spec.fingerprint,
        "S": spec.S,
        "sum_lambda": _g17(math.fsum((spec.shell_lambdas * spec.degeneracy).tolist())),
        "truncation": spec.truncation,
        "provenance": spec.provenance,
    }


def _header_lines(spec):
    return [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in provenance_header(spec).items()]


def _write_text(path: Path, text: str):
    if path.suffix == ".gz":
        # mtime pinned so repeated writes are byte-identical
        with open(path, "wb") as fh, gzip.GzipFile(filename="", mode="wb", fileobj=fh, mtime=0) as gz:
            gz.write(text.encode())
    else:
        path.write_text(text)


def _read_text(path: Path) -> str:
    if path.suffix == ".gz":
        with gzip.open(path, "rt") as fh:
            return fh.read()
    return path.read_text()


def write_spectrum(spec: SchmidtSpectrum, path, force: bool = True):
    """Write a spectrum file; the format follows the suffix.

    ``.json`` and ``.csv``/``.tsv`` hold one record per state;
    ``.shells.csv`` (optionally ``.gz``) holds one row per shell
    (``n,l,lambda,energy``) and is meant for large solver spectra.
    """
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists (use force to overwrite)")
    if _is_shell_file(path):
        lines = _header_lines(spec) + ["n,l,lambda,energy"]
        lines += [f"{int(n)},{int(l)},{_g17(x)},{_g17(E)}" for n, l, x, E in
                  zip(spec.shell_n, spec.shell_l, spec.shell_lambdas, spec.shell_energy)]
        _write_text(path, "\n".join(lines) + "\n")
        return path
    n, l, E = spec.n, spec.l, spec.energy
    if path.suffix == ".json":
        doc = provenance_header(spec)
        doc["records"] = [
            {"j": j + 1, "n": int(n[j]), "l": int(l[j]), "m": int(spec.m[j]),
             "lambda": _g17(spec.lambdas[j]), "energy": _g17(E[j])}
            for j in range(spec.S)
        ]
        path.write_text(json.dumps(doc, indent=1) + "\n")
        return path
    sep = "\t" if path.suffix == ".tsv" else ","
    lines = _header_lines(spec) + [sep.join(["j", "n", "l", "lambda", "energy"])]
    for j in range(spec.S):
        lines.append(sep.join([str(j + 1), str(int(n[j])), str(int(l[j])),
                               _g17(spec.lambdas[j]), _g17(E[j])]))
    _write_text(path, "\n".join(lines) + "\n")
    return path


def _shells_from_rows(rows):
    """Collapse per-state rows (n, l, lambda, E) into shell arrays."""
    out, i = [], 0
    while i < len(rows):
        n, l, lam, E = rows[i]
        g = 2 * l + 1
        block = rows[i:i + g]
        if len(block) != g or any((r[0], r[1]) != (n, l) for r in block):
            raise SpectrumError(f"shell (n={n}, l={l}) at row {i + 1} is not {g}-fold")
        out.append((n, l, lam, E))
        i += g
    if not out:
        raise SpectrumError("spectrum file has no records")
    n, l, lam, E = zip(*out)
    return np.array(n), np.array(l), np.array(lam, float), np.array(E, float)


def read_spectrum(path) -> SchmidtSpectrum:
    path = Path(path)
    text = _read_text(path)
    if path.suffix == ".json":
        doc = json.loads(text)
        rows = [(int(r["n"]), int(r["l"]), float(r["lambda"]), float(r["energy"]))
                for r in doc["records"]]
        meta = doc
        n, l, lam, E = _shells_from_rows(rows)
    else:
        meta, body = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = json.loads(val)
            elif line.strip():
                body.append(line)
        if not body:
            raise SpectrumError(f"{path}: no table")
        sep = "\t" if "\t" in body[0] else ","
        header = body[0].split(sep)
        cols = [ln.split(sep) for ln in body[1:]]
        if header[:4] == ["n", "l", "lambda", "energy"]:
            n = np.array([int(f[0]) for f in cols])
            l = np.array([int(f[1]) for f in cols])
            lam = np.array([float(f[2]) for f in cols])
            E = np.array([float(f[3]) for f in cols])
        elif header[:5] == ["j", "n", "l", "lambda", "energy"]:
            n, l, lam, E = _shells_from_rows(
                [(int(f[1]), int(f[2]), float(f[3]), float(f[4])) for f in cols])
        else:
            raise SpectrumError(f"unexpected header {header}")
    total = math.fsum((lam * (2 * l + 1)).tolist())
    if abs(total - 1.0) > NORM_TOL:
        raise SpectrumError(f"spectrum file not normalized: sum = {total!r}")
    return SchmidtSpectrum(n, l, lam, E, meta.get("truncation", {}), meta.get("provenance", {}))

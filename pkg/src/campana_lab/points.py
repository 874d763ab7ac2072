"""Point tests and enumeration for weak and strict multiplicity conditions.

A projective rational point is represented by its canonical primitive
coordinate vector (gcd 1, first nonzero coordinate positive).  The weak
test asks that the norm be m-full away from S; the strict test asks the
same of every local irreducible factor value separately.  Enumeration
walks the coordinate box with numpy tiles, sieves weak points against a
precomputed m-full table, and runs the strict test on the survivors.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .arith import is_m_full_with_witness, factorize, m_full_numbers_up_to
from .errors import ConfigError, UnsupportedPrime, ZeroVector
from .fieldspec import FieldSpec, norm, splitting_data, valuation_vector


@dataclass(frozen=True)
class PointRecord:
    coords: tuple[int, ...]
    height: int
    norm_value: int
    weak: bool
    campana: bool
    witness: tuple[int, int] | None


@dataclass
class CountRow:
    X: int
    B: int
    projective_weak: int
    projective_campana: int | None
    vector_mfull: int
    elapsed_ms: int


@dataclass
class CountTable:
    rows: list[CountRow]
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = []
        for key in sorted(self.metadata):
            lines.append(f"# {key} = {self.metadata[key]}")
        lines.append("X,B,projective_weak,projective_campana,vector_mfull,elapsed_ms")
        for r in self.rows:
            camp = "" if r.projective_campana is None else r.projective_campana
            lines.append(
                f"{r.X},{r.B},{r.projective_weak},{camp},{r.vector_mfull},{r.elapsed_ms}"
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "rows": [
                {
                    "X": r.X,
                    "B": r.B,
                    "projective_weak": r.projective_weak,
                    "projective_campana": r.projective_campana,
                    "vector_mfull": r.vector_mfull,
                    "elapsed_ms": r.elapsed_ms,
                }
                for r in self.rows
            ],
        }

    @staticmethod
    def from_csv(text: str) -> "CountTable":
        metadata = {}
        rows = []
        header_seen = False
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].split("=", 1)
                    metadata[k.strip()] = v.strip()
                continue
            if not header_seen:
                header_seen = True
                continue
            parts = line.split(",")
            rows.append(
                CountRow(
                    X=int(parts[0]),
                    B=int(parts[1]),
                    projective_weak=int(parts[2]),
                    projective_campana=int(parts[3]) if parts[3] else None,
                    vector_mfull=int(parts[4]),
                    elapsed_ms=int(parts[5]),
                )
            )
        return CountTable(rows=rows, metadata=metadata)


def canonicalize(x) -> tuple[int, ...]:
    """Primitive representative with positive first nonzero coordinate."""
    v = [int(c) for c in x]
    if all(c == 0 for c in v):
        raise ZeroVector("cannot canonicalize the zero vector")
    g = math.gcd(*v)
    v = [c // g for c in v]
    lead = next(c for c in v if c != 0)
    if lead < 0:
        v = [-c for c in v]
    return tuple(v)


def height(F: FieldSpec, x) -> int:
    """Anticanonical height (max |x_i|)^d of a primitive vector."""
    return max(abs(int(c)) for c in x) ** F.degree


def default_exclusions(F: FieldSpec) -> frozenset[int]:
    return frozenset(F.structure.bad_primes)


def is_weak_campana(F: FieldSpec, x, m: int, S=()) -> tuple[bool, tuple[int, int] | None]:
    """Weak verdict: the part of the norm prime to S must be m-full."""
    nv = norm(F, canonicalize(x))
    ok, witness = is_m_full_with_witness(int(nv), m, S)
    return ok, witness


def is_campana(F: FieldSpec, x, m: int, S=()) -> tuple[bool, tuple[int, int] | None]:
    """Strict verdict: every local factor valuation is 0 or >= m.

    Witness is the first (prime, offending factor valuation).  Raises
    UnsupportedPrime when a partially ramified prime divides the norm.
    """
    xc = canonicalize(x)
    nv = abs(int(norm(F, xc)))
    if nv == 1:
        return True, None
    excl = set(S)
    for p, vp in factorize(nv).factors:
        if p in excl:
            continue
        sd = splitting_data(F, p)
        if sd.g == 1:
            if 0 < vp < m:
                return False, (p, vp)
            continue
        cap = max(m, vp)
        vals = valuation_vector(F, xc, p, cap)
        total = sum(v for _, v in vals)
        if total != vp:
            raise AssertionError(
                f"factor valuations {vals} at p={p} do not sum to v_p(N) = {vp}"
            )
        for _, v in vals:
            if 0 < v < m:
                return False, (p, v)
    return True, None


def point_record(F: FieldSpec, x, m: int, S=()) -> PointRecord:
    xc = canonicalize(x)
    nv = int(norm(F, xc))
    weak, w_wit = is_weak_campana(F, xc, m, S)
    campana, c_wit = is_campana(F, xc, m, S)
    assert not campana or weak, "strict verdict must imply the weak one"
    witness = c_wit if not campana else None
    if not weak:
        witness = w_wit
    return PointRecord(
        coords=xc,
        height=height(F, xc),
        norm_value=nv,
        weak=weak,
        campana=campana,
        witness=witness,
    )


def norm_bound(F: FieldSpec, X: int) -> int:
    """Upper bound for |N| over the coordinate box max|x_i| <= X."""
    d = F.degree
    roots = np.roots(list(reversed(F.min_poly)))
    prod = 1.0
    for r in roots:
        s = 0.0
        for b in F.basis:
            s += abs(complex(np.polyval(list(reversed([float(c) for c in b])), r)))
        prod *= s
    return int(math.ceil(prod * (X**d) * 1.02)) + 16


def default_checkpoints(xmax: int, count: int = 8) -> list[int]:
    """Geometric checkpoints ending at xmax, ratio sqrt(2)."""
    if xmax < 1:
        raise ConfigError(f"xmax must be >= 1, got {xmax}")
    out = []
    for i in range(count):
        out.append(max(1, int(round(xmax / (math.sqrt(2) ** i)))))
    return sorted(set(out))


# ---------------------------------------------------------------------------
# enumeration workers
# ---------------------------------------------------------------------------

_W: dict = {}

_BITMAP_SHIFT = 10


def _init_worker(payload: dict) -> None:
    _W.update(payload)
    table = np.asarray(payload["mfull"], dtype=np.int64)
    _W["mfull"] = table
    bitmap = np.zeros((int(payload["norm_bound"]) >> _BITMAP_SHIFT) + 2, dtype=bool)
    bitmap[table >> _BITMAP_SHIFT] = True
    _W["bitmap"] = bitmap


def _strip_excluded(absn: np.ndarray, primes) -> np.ndarray:
    for p in primes:
        while True:
            mask = absn % p == 0
            if not mask.any():
                break
            absn = np.where(mask, absn // p, absn)
    return absn


def _eval_norm_tile(F: FieldSpec, cols: list) -> np.ndarray:
    """Evaluate the norm form on broadcast coordinate arrays (int64).

    cols[i] is None for coordinates pinned to zero; monomials touching
    them are skipped.  Column/row shaped inputs broadcast in the sum.
    """
    total = None
    powers: dict[tuple[int, int], np.ndarray] = {}

    def power(i: int, e: int) -> np.ndarray:
        key = (i, e)
        if key not in powers:
            powers[key] = cols[i] ** e
        return powers[key]

    for expo, c in F.norm_form:
        if any(e > 0 and cols[i] is None for i, e in enumerate(expo)):
            continue
        term = None
        for i, e in enumerate(expo):
            if e == 0:
                continue
            fac = power(i, e)
            term = fac if term is None else term * fac
        ci = int(c)
        if term is None:
            term = np.int64(ci)
        elif ci != 1:
            term = term * ci
        total = term if total is None else total + term
    assert total is not None
    return total


def _run_stratum_block(args) -> tuple[np.ndarray, np.ndarray, int]:
    """Count weak/strict points for leading coordinate values in [a0, a1).

    Returns per-checkpoint-bucket histograms (weak, campana) plus the
    number of strict tests run.  Deterministic for a fixed partition.
    """
    stratum, a0, a1 = args
    F: FieldSpec = _W["field"]
    m: int = _W["m"]
    S: tuple = _W["S"]
    xmax: int = _W["xmax"]
    checkpoints: list[int] = _W["checkpoints"]
    run_campana: bool = _W["run_campana"]
    table: np.ndarray = _W["mfull"]
    bitmap: np.ndarray = _W["bitmap"]

    d = F.degree
    free = d - 1 - stratum
    ncp = len(checkpoints)
    cps = np.asarray(checkpoints, dtype=np.int64)
    weak_hist = np.zeros(ncp, dtype=np.int64)
    camp_hist = np.zeros(ncp, dtype=np.int64)
    ntested = 0

    if free == 0:
        # single canonical vector (0, ..., 0, 1)
        for a in range(a0, a1):
            if a != 1:
                continue
            x = tuple([0] * stratum + [1])
            ok, _ = is_weak_campana(F, x, m, S)
            if ok:
                bucket = int(np.searchsorted(cps, 1, side="left"))
                weak_hist[bucket] += 1
                if run_campana:
                    cok, _ = is_campana(F, x, m, S)
                    if cok:
                        camp_hist[bucket] += 1
                    ntested += 1
        return weak_hist, camp_hist, ntested

    axis = np.arange(-xmax, xmax + 1, dtype=np.int64)
    if free == 1:
        grid_cols = [axis]
    else:
        mesh = np.meshgrid(*([axis] * free), indexing="ij")
        grid_cols = [g.reshape(-1) for g in mesh]
    grid_len = grid_cols[0].shape[0]
    grid_gcd = np.abs(grid_cols[0])
    for g in grid_cols[1:]:
        grid_gcd = np.gcd(grid_gcd, np.abs(g))
    grid_max = np.abs(grid_cols[0])
    for g in grid_cols[1:]:
        grid_max = np.maximum(grid_max, np.abs(g))

    rows = max(1, 6_000_000 // max(1, grid_len))

    def coords_at(i: int, j: int, avals: np.ndarray) -> tuple[int, ...]:
        return tuple(
            0 if k < stratum
            else int(avals[i]) if k == stratum
            else int(grid_cols[k - stratum - 1][j])
            for k in range(d)
        )

    a = a0
    while a < a1:
        b = min(a1, a + rows)
        avals = np.arange(a, b, dtype=np.int64)
        lead = avals[:, None]

        cols: list = []
        for i in range(d):
            if i < stratum:
                cols.append(None)
            elif i == stratum:
                cols.append(lead)
            else:
                cols.append(grid_cols[i - stratum - 1][None, :])
        absn = np.abs(_eval_norm_tile(F, cols))
        if S:
            absn = _strip_excluded(absn, S)

        # coarse bitmap prefilter, then exact table membership on the few
        # candidate hits, then the gcd filter on actual m-full values
        hit_i, hit_j = np.nonzero(bitmap[absn >> _BITMAP_SHIFT])
        if hit_i.size:
            nv = absn[hit_i, hit_j]
            idx = np.searchsorted(table, nv)
            exact = (idx < len(table)) & (table[np.minimum(idx, len(table) - 1)] == nv)
            hit_i, hit_j = hit_i[exact], hit_j[exact]
        if hit_i.size:
            prim = np.gcd(avals[hit_i], grid_gcd[hit_j]) == 1
            wi, wj = hit_i[prim], hit_j[prim]
        else:
            wi = wj = hit_i
        if wi.size:
            maxc = np.maximum(avals[wi], grid_max[wj])
            buckets = np.searchsorted(cps, maxc, side="left")
            weak_hist += np.bincount(buckets, minlength=ncp)

            if run_campana:
                for i, j, bucket in zip(wi.tolist(), wj.tolist(), buckets.tolist()):
                    x = coords_at(i, j, avals)
                    ntested += 1
                    if ntested % 100 == 1:
                        # dual-route check: factorization agrees with the sieve
                        ok, _ = is_weak_campana(F, x, m, S)
                        assert ok, f"sieve/factorization mismatch at {x}"
                    cok, _ = is_campana(F, x, m, S)
                    if cok:
                        camp_hist[bucket] += 1

        # spot-check sieve verdicts at three fixed positions per tile
        weak_set = set(zip(wi.tolist(), wj.tolist()))
        for j in (0, grid_len // 2, grid_len - 1):
            x_raw = [
                0 if k < stratum
                else int(avals[0]) if k == stratum
                else int(grid_cols[k - stratum - 1][j])
                for k in range(d)
            ]
            if math.gcd(*x_raw) != 1:
                continue
            ok, _ = is_weak_campana(F, x_raw, m, S)
            assert ok == ((0, j) in weak_set), f"sieve mismatch at {x_raw}"
        a = b

    return weak_hist, camp_hist, ntested


def enumerate_counts(
    F: FieldSpec,
    m: int,
    S=None,
    xmax: int = 100,
    checkpoints: list[int] | None = None,
    run_campana: bool = True,
    workers: int | None = None,
) -> CountTable:
    """Count canonical primitive vectors passing each test per checkpoint.

    The box max|x_i| <= X is tiled over the leading-coordinate strata;
    worker results merge by integer addition, so the table is identical
    for any worker count.  The raw m-full vector count is exactly twice
    the projective weak count (each point has two primitive lifts).
    """
    if xmax < 1:
        raise ConfigError(f"xmax must be >= 1, got {xmax}")
    if m < 2:
        raise ConfigError(f"m must be >= 2, got {m}")
    if S is None:
        S = default_exclusions(F)
    S = tuple(sorted(set(int(p) for p in S)))
    checkpoints = checkpoints or default_checkpoints(xmax)
    checkpoints = sorted(set(int(c) for c in checkpoints))
    if checkpoints[-1] != xmax:
        raise ConfigError("largest checkpoint must equal xmax")

    bound = norm_bound(F, xmax)
    if bound >= 2**62:
        raise ConfigError(
            f"norm bound {bound:.3g} exceeds the int64 enumeration fast path"
        )
    for expo, c in F.norm_form:
        if c.denominator != 1:
            raise ConfigError("enumeration requires an integral norm form")
    table = np.asarray(m_full_numbers_up_to(bound, m), dtype=np.int64)

    d = F.degree
    if workers is None:
        workers = os.cpu_count() or 1
    start = time.monotonic()

    payload = {
        "field": F,
        "m": m,
        "S": S,
        "xmax": xmax,
        "checkpoints": checkpoints,
        "run_campana": run_campana,
        "mfull": table,
        "norm_bound": bound,
    }

    tasks: list[tuple[int, int, int]] = []
    for stratum in range(d):
        free = d - 1 - stratum
        if free == 0:
            tasks.append((stratum, 1, 2))
            continue
        nblocks = max(1, 4 * workers) if stratum == 0 else 1
        edges = np.linspace(1, xmax + 1, nblocks + 1).astype(int)
        for lo, hi in zip(edges[:-1], edges[1:]):
            if lo < hi:
                tasks.append((stratum, int(lo), int(hi)))

    ncp = len(checkpoints)
    weak_hist = np.zeros(ncp, dtype=np.int64)
    camp_hist = np.zeros(ncp, dtype=np.int64)
    tested = 0
    if workers <= 1:
        _init_worker(payload)
        for t in tasks:
            w, c, n = _run_stratum_block(t)
            weak_hist += w
            camp_hist += c
            tested += n
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(payload,)
        ) as pool:
            for w, c, n in pool.map(_run_stratum_block, tasks):
                weak_hist += w
                camp_hist += c
                tested += n

    elapsed_ms = int((time.monotonic() - start) * 1000)
    weak_cum = np.cumsum(weak_hist)
    camp_cum = np.cumsum(camp_hist)
    rows = []
    for i, X in enumerate(checkpoints):
        w = int(weak_cum[i])
        rows.append(
            CountRow(
                X=X,
                B=X**d,
                projective_weak=w,
                projective_campana=int(camp_cum[i]) if run_campana else None,
                vector_mfull=2 * w,
                elapsed_ms=elapsed_ms,
            )
        )
    metadata = {
        "field": F.label,
        "m": m,
        "S": list(S),
        "xmax": xmax,
        "workers": workers,
        "campana_tests_run": tested,
        "version": __version__,
    }
    return CountTable(rows=rows, metadata=metadata)

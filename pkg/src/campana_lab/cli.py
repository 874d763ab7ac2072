"""Command-line front end.

Subcommands: invariants, orbits, count, series, fit, constant, selftest.
Every output file embeds the run configuration (seed included) so a
report can be regenerated bit for bit.  Exit codes: 0 success, 2
invalid configuration, 3 domain error, 4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .errors import CampanaLabError, ConfigError, DomainError
from .fieldspec import builtin_field, field_from_file
from .groups import builtin_group, builtin_groups_of_order, group_from_json
from .orbits import (
    b_exponent,
    count_s_gm,
    orbit_classes,
    partition_identity_check,
    reduced_classes,
)
from .points import CountTable, default_checkpoints, enumerate_counts


@dataclass
class RunConfig:
    """Everything needed to reproduce one CLI invocation."""

    command: str
    options: dict
    seed: int | None
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("CAMPANA_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"CAMPANA_LAB_THREADS={env!r} is not an integer")
    return os.cpu_count() or 1


def _resolve_field(args):
    if getattr(args, "spec", None):
        return field_from_file(args.spec)
    if getattr(args, "field", None):
        return builtin_field(args.field)
    raise ConfigError("one of --field or --spec is required")


def _resolve_group(args, d=None):
    name = getattr(args, "group", None)
    if name:
        if name.endswith(".json"):
            return group_from_json(name)
        return builtin_group(name)
    if d is None:
        raise ConfigError("a group (or --d) is required")
    return builtin_groups_of_order(d)[0]


def _excluded(args) -> tuple[int, ...]:
    raw = getattr(args, "exclude_primes", None)
    if not raw:
        return ()
    try:
        return tuple(sorted({int(p) for p in raw.split(",") if p}))
    except ValueError:
        raise ConfigError(f"--exclude-primes {raw!r} must be comma-separated integers")


def _emit(text: str, out: str | None, suffix: str) -> Path | None:
    if out is None:
        sys.stdout.write(text)
        return None
    path = Path(out).with_suffix(suffix) if Path(out).suffix == "" else Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _json_text(payload: dict, config: RunConfig) -> str:
    return json.dumps({"config": config.to_dict(), **payload}, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_invariants(args) -> int:
    d, m = args.d, args.m
    groups = (
        [_resolve_group(args)] if args.group else builtin_groups_of_order(d)
    )
    config = RunConfig("invariants", {"d": d, "m": m, "group": args.group}, None)
    rows = []
    for G in groups:
        if G.order != d:
            raise ConfigError(f"group {G} does not have order {d}")
        classes = orbit_classes(G, m)
        reduced = reduced_classes(G, m)
        b = b_exponent(d, m)
        closed = count_s_gm(d, m)
        rows.append({
            "group": G.name,
            "b_exponent": b,
            "class_count": len(classes),
            "class_count_closed_form": closed,
            "reduced_class_count": len(reduced),
        })
        if len(reduced) != b or len(classes) != closed:
            raise AssertionError(f"orbit counts disagree with formulas for {G}")
    if args.format == "json":
        text = _json_text({"rows": rows}, config)
    else:
        lines = [f"# command = invariants d={d} m={m}"]
        lines.append("group,b,class_count,class_count_closed_form,reduced_class_count")
        for r in rows:
            lines.append(
                f"{r['group']},{r['b_exponent']},{r['class_count']},"
                f"{r['class_count_closed_form']},{r['reduced_class_count']}"
            )
        text = "\n".join(lines) + "\n"
    _emit(text, args.out, ".json" if args.format == "json" else ".csv")
    return 0


def cmd_orbits(args) -> int:
    G = _resolve_group(args)
    m = args.m
    config = RunConfig("orbits", {"group": G.name, "m": m}, None)
    classes = orbit_classes(G, m)
    payload = {
        "group": G.name,
        "m": m,
        "classes": [
            {
                "representative": list(c.representative),
                "orbit_size": c.orbit_size,
                "distinct_support": c.distinct_support,
                "reduced": c.distinct_support <= G.order - 1,
            }
            for c in classes
        ],
    }
    if args.format == "json":
        text = _json_text(payload, config)
    else:
        lines = [f"# command = orbits group={G.name} m={m}"]
        lines.append("representative,orbit_size,distinct_support,reduced")
        for c in payload["classes"]:
            rep = " ".join(map(str, c["representative"]))
            lines.append(
                f"{rep},{c['orbit_size']},{c['distinct_support']},{int(c['reduced'])}"
            )
        text = "\n".join(lines) + "\n"
    _emit(text, args.out, ".json" if args.format == "json" else ".csv")
    return 0


def cmd_count(args) -> int:
    F = _resolve_field(args)
    if args.xmax < 1:
        raise ConfigError(f"--xmax must be >= 1, got {args.xmax}")
    S = tuple(sorted(set(_excluded(args)) | set(F.structure.bad_primes)))
    checkpoints = default_checkpoints(args.xmax, args.checkpoints)
    workers = _threads(args)
    config = RunConfig(
        "count",
        {
            "field": F.label,
            "m": args.m,
            "xmax": args.xmax,
            "checkpoints": checkpoints,
            "exclude_primes": list(S),
            "threads": workers,
            "campana": not args.no_campana,
        },
        None,
    )
    table = enumerate_counts(
        F,
        args.m,
        S=S,
        xmax=args.xmax,
        checkpoints=checkpoints,
        run_campana=not args.no_campana,
        workers=workers,
    )
    table.metadata.update({f"config.{k}": v for k, v in config.to_dict().items()})
    if args.format == "json":
        path = _emit(_json_text(table.to_json_dict(), config), args.out, ".json")
    else:
        path = _emit(table.to_csv(), args.out, ".csv")
    if path is not None and not args.no_figure:
        from .figures import count_figure

        count_figure(table, path.with_suffix(".png"))
    return 0


def cmd_series(args) -> int:
    from .groups import cyclic
    from .localseries import (
        CharacterValues,
        SplitType,
        draw_character_values,
        regularization_coefficients,
        division_recursion,
        vanishing_check,
        weak_local_transform,
    )

    try:
        sizes = tuple(int(s) for s in args.split.split(","))
    except ValueError:
        raise ConfigError(f"--split {args.split!r} must be comma-separated sizes")
    st = SplitType(sum(sizes), sizes)
    d = st.d
    G = _resolve_group(args) if args.group else cyclic(d)
    seed = args.seed if args.seed is not None else 0
    rng = random.Random(seed)
    if args.chars == "trivial":
        cv = CharacterValues.trivial(st.g)
    else:
        cv = draw_character_values(st, rng)
    config = RunConfig(
        "series",
        {
            "split": list(sizes),
            "m": args.m,
            "chars": args.chars,
            "terms": args.terms,
            "group": G.name,
        },
        seed,
    )
    N = max(args.terms, args.m)
    a = weak_local_transform(st, cv, args.m, N)
    F = regularization_coefficients(G, st, cv, args.m, N)
    quotient = division_recursion(a, F, args.m)
    report = vanishing_check(G, st, cv, args.m)
    coeff_rows = [
        (n, quotient[n].real, quotient[n].imag) for n in range(len(quotient))
    ]
    csv_lines = [f"# command = series split={args.split} m={args.m} seed={seed}"]
    csv_lines.append("n,re,im")
    for n, re, im in coeff_rows:
        csv_lines.append(f"{n},{re!r},{im!r}")
    path = _emit("\n".join(csv_lines) + "\n", args.out, ".csv")
    vanish_payload = {
        "max_abs": report.max_abs,
        "holds": report.holds,
        "character_values": [[z.real, z.imag] for z in cv.z],
    }
    if path is not None:
        path.with_suffix(".vanishing.json").write_text(
            _json_text(vanish_payload, config), encoding="utf-8"
        )
        if not args.no_figure:
            from .figures import series_figure

            series_figure(coeff_rows, report.max_abs, args.m,
                          path.with_suffix(".png"))
    else:
        sys.stdout.write(_json_text(vanish_payload, config))
    if not report.holds:
        raise AssertionError(f"vanishing failed: max |d_n| = {report.max_abs:.3e}")
    return 0


def cmd_fit(args) -> int:
    from .analysis import fit_counts

    table = CountTable.from_csv(Path(args.infile).read_text(encoding="utf-8"))
    config = RunConfig(
        "fit",
        {"in": args.infile, "m": args.m, "b": args.b, "kind": args.kind},
        None,
    )
    report = fit_counts(table, args.m, args.b, kind=args.kind)
    path = _emit(_json_text(report.to_json_dict(), config), args.out, ".json")
    if path is not None and not args.no_figure:
        from .figures import fit_figure

        fit_figure(report, table, args.kind, path.with_suffix(".png"))
    return 0


def cmd_constant(args) -> int:
    from .analysis import constant_estimate

    F = _resolve_field(args)
    config = RunConfig(
        "constant", {"field": F.label, "m": args.m, "p_max": args.pmax}, None
    )
    est = constant_estimate(F, args.m, args.pmax, collect_trace=True)
    path = _emit(_json_text(est.to_json_dict(), config), args.out, ".json")
    if path is not None and not args.no_figure:
        from .figures import constant_figure

        constant_figure(est.trace, path.with_suffix(".png"))
    return 0


def cmd_selftest(args) -> int:
    """Condensed invariant suite; nonzero exit on any failure."""
    from .groups import cyclic
    from .localseries import (
        SplitType,
        campana_leading_check,
        draw_character_values,
        vanishing_check,
    )
    from .orbits import all_partitions, fan_identity_check
    from .analysis import dedekind_residue
    from .points import is_campana, is_weak_campana
    from .fieldspec import norm
    from .arith import is_m_full

    t0 = time.monotonic()

    def step(label, fn):
        fn()
        print(f"ok   {label}  [{time.monotonic() - t0:6.1f}s]")

    def orbit_invariants():
        for d in range(2, 7):
            for G in builtin_groups_of_order(d):
                for m in range(2, 9):
                    if math.gcd(d, m) != 1 and d in (4, 6):
                        continue
                    assert len(reduced_classes(G, m)) == b_exponent(d, m)
                    assert len(orbit_classes(G, m)) == count_s_gm(d, m)
                    assert partition_identity_check(G, m).holds

    def fan_invariants():
        for d in range(1, 9):
            for part in all_partitions(d):
                assert fan_identity_check(part)

    def series_invariants():
        rng = random.Random(20260809)
        for d in (2, 3, 5):
            G = cyclic(d)
            for m in (2, 3, 4, 5):
                for st in (SplitType.split(d), SplitType.inert(d)):
                    for _ in range(25):
                        cv = draw_character_values(st, rng)
                        assert vanishing_check(G, st, cv, m).holds
                        assert campana_leading_check(st, cv, m).holds

    def point_invariants():
        for name in ("gaussian", "eisenstein"):
            F = builtin_field(name)
            t = enumerate_counts(F, 2, xmax=500, checkpoints=[250, 500], workers=1)
            for row in t.rows:
                assert row.projective_weak == row.projective_campana
        C = builtin_field("cyclic_cubic_9")
        t = enumerate_counts(C, 2, xmax=30, checkpoints=[30], workers=1)
        assert t.rows[0].projective_weak > t.rows[0].projective_campana
        import itertools

        for x in itertools.islice(
            (x for x in itertools.product(range(-4, 5), repeat=3)
             if any(x) and math.gcd(*x) == 1), 0, None
        ):
            weak, _ = is_weak_campana(C, x, 2)
            campana, _ = is_campana(C, x, 2)
            assert campana <= weak
            assert weak == is_m_full(norm(C, x), 2)

    def residue_invariants():
        assert abs(dedekind_residue(builtin_field("gaussian")) - math.pi / 4) < 1e-9
        assert (
            abs(dedekind_residue(builtin_field("eisenstein"))
                - math.pi / (3 * math.sqrt(3))) < 1e-9
        )

    step("orbit counts, partition identities", orbit_invariants)
    step("fan identities up to degree 8", fan_invariants)
    step("local vanishing and lattice sweeps", series_invariants)
    step("point tests and small enumerations", point_invariants)
    step("residue closed forms", residue_invariants)
    print(f"selftest passed in {time.monotonic() - t0:.1f}s")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="campana-lab",
        description="Counting, orbit combinatorics and local series for "
                    "norm-form orbifolds",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_output(p):
        p.add_argument("--out", help="output path (figures land alongside)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("invariants", help="b(d,m) and orbit class counts")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--group", help="builtin group name or Cayley JSON path")
    add_common_output(p)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("orbits", help="list the multiset orbit classes")
    p.add_argument("--group", required=True)
    p.add_argument("--m", type=int, required=True)
    add_common_output(p)
    p.set_defaults(fn=cmd_orbits)

    p = sub.add_parser("count", help="enumerate points up to a coordinate bound")
    p.add_argument("--field", help="builtin field name")
    p.add_argument("--spec", help="field spec file (TOML/JSON)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--xmax", type=int, required=True)
    p.add_argument("--checkpoints", type=int, default=8)
    p.add_argument("--exclude-primes", help="comma-separated extra primes for S")
    p.add_argument("--threads", type=int)
    p.add_argument("--no-campana", action="store_true",
                   help="skip the per-factor strict test")
    p.add_argument("--no-figure", action="store_true")
    add_common_output(p)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("series", help="local transform series and vanishing report")
    p.add_argument("--split", required=True, help="orbit sizes, e.g. 1,1,1")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--chars", choices=("trivial", "random"), default="random")
    p.add_argument("--seed", type=int)
    p.add_argument("--terms", type=int, default=32)
    p.add_argument("--group", help="group model (defaults to the cyclic one)")
    p.add_argument("--no-figure", action="store_true")
    add_common_output(p)
    p.set_defaults(fn=cmd_series)

    p = sub.add_parser("fit", help="fit a count table against the asymptotics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--kind", choices=("weak", "campana", "mfull"), default="weak")
    p.add_argument("--no-figure", action="store_true")
    add_common_output(p)
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("constant", help="truncated leading-constant estimate")
    p.add_argument("--field", help="builtin field name")
    p.add_argument("--spec", help="field spec file (TOML/JSON)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pmax", type=int, default=100_000)
    p.add_argument("--no-figure", action="store_true")
    add_common_output(p)
    p.set_defaults(fn=cmd_constant)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except CampanaLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())

"""Command line: ``fmft {compile,transform,bands,verify}``.

Every flag may also be set through an environment variable ``FMFT_<FLAG>``
(upper case, dashes as underscores, e.g. ``FMFT_THREADS=4``,
``FMFT_TOL_NORM=1e-12``); an explicit flag wins.  Errors print one line
``error[<reason>]: <message>`` to stderr and exit non-zero.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import verify as verify_mod
from .bethe import (
    ORACLE_CAP,
    ChainParams,
    SectorLeakageError,
    assemble_band_diagram,
    estimate_build_ops,
    full_ed_oracle,
)
from .fock import MAX_SITES, FockError, StateVector
from .io import (
    FormatError,
    max_spectral_deviation,
    read_gates,
    read_state,
    write_band_csv,
    write_gates,
    write_gnuplot,
    write_state,
)
from .transforms import (
    apply_sequence_array,
    dft_matrix,
    fmft_sequence,
    gate_count,
    invert_sequence,
    is_power_of_two,
    mft_fold_compile,
)

ENV_PREFIX = "FMFT_"
DEFAULT_BUDGET = 1e11


class CliError(Exception):
    def __init__(self, reason: str, message: str, code: int = 2):
        super().__init__(message)
        self.reason = reason
        self.code = code


def _env(flag: str, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise CliError("config", f"environment variable {ENV_PREFIX}{flag.upper()}={raw!r} is invalid") from None


def _flag(parser, name: str, cast, default, help: str, **kw):
    parser.add_argument(f"--{name}", type=cast, default=_env(name, default, cast), help=help, **kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fmft", description="Fast mode Fourier transform and Bethe-chain bands.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="write the gate list of a mode transform")
    c.add_argument("transform", choices=["fmft", "mft-dft"])
    _flag(c, "n", int, None, "number of sites")
    _flag(c, "out", str, None, "output gate-list JSON (optional)")

    t = sub.add_parser("transform", help="apply a gate list to a state file")
    _flag(t, "gates", str, None, "gate-list JSON")
    _flag(t, "state", str, None, "state JSON")
    _flag(t, "out", str, None, "output state JSON")
    t.add_argument("--inverse", action="store_true", default=_env("inverse", False, _truthy))
    _flag(t, "tol-norm", float, 1e-12, "allowed relative norm change")

    b = sub.add_parser("bands", help="band diagram of the periodic chain")
    _flag(b, "n", int, None, "number of sites")
    _flag(b, "m", int, None, "number of particles")
    _flag(b, "j", float, 1.0, "hopping J")
    _flag(b, "u", float, 0.0, "interaction U")
    _flag(b, "out", str, None, "output CSV (a .gp gnuplot script is written beside it)")
    b.add_argument("--oracle", action="store_true", default=_env("oracle", False, _truthy))
    _flag(b, "threads", int, os.cpu_count() or 1, "worker threads over sectors")
    _flag(b, "budget", float, DEFAULT_BUDGET, "refuse builds estimated above this many amplitude updates")
    _flag(b, "oracle-cap", int, ORACLE_CAP, "largest sector dimension the site-basis oracle accepts")
    _flag(b, "tol-spectrum", float, 1e-9, "allowed deviation from the oracle spectrum")

    v = sub.add_parser("verify", help="run the self-check suite")
    v.add_argument("level", nargs="?", choices=["quick", "full"], default=_env("level", "quick"))
    v.add_argument("--mutate", choices=["givens-sign", "no-parity"], default=None, help=argparse.SUPPRESS)
    return p


def _truthy(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")


def _require(value, flag: str):
    if value is None:
        raise CliError("usage", f"--{flag} is required")
    return value


def cmd_compile(args) -> int:
    n = _require(args.n, "n")
    if not 1 <= n <= MAX_SITES:
        raise CliError("invalid-n", f"N must lie in 1..{MAX_SITES}, got {n}")
    if args.transform == "fmft":
        if not (is_power_of_two(n) and n >= 2):
            raise CliError("invalid-n", f"fmft needs N a power of two >= 2, got {n}; use mft-dft for other N")
        seq = fmft_sequence(n)
    else:
        if n < 2:
            raise CliError("invalid-n", f"mft-dft needs N >= 2, got {n}")
        seq = mft_fold_compile(dft_matrix(n))
    if args.out:
        write_gates(seq, args.out)
    for kind, count in gate_count(seq).items():
        print(f"{kind}: {count}")
    return 0


def cmd_transform(args) -> int:
    seq = read_gates(_require(args.gates, "gates"))
    v = read_state(_require(args.state, "state"))
    out = _require(args.out, "out")
    if seq.n != v.basis.n:
        raise CliError("mismatch", f"gate list is for N={seq.n}, state has N={v.basis.n}")
    if args.inverse:
        seq = invert_sequence(seq)
    w = StateVector(v.basis, apply_sequence_array(v.amp, v.basis, seq))
    before, after = v.norm(), w.norm()
    change = abs(after - before) / before if before > 0 else abs(after)
    print(f"norm change: {change:.3e}")
    if change > args.tol_norm:
        raise CliError("norm", f"relative norm change {change:.3e} exceeds {args.tol_norm:.1e}")
    write_state(w, out)
    return 0


def cmd_bands(args) -> int:
    n, m = _require(args.n, "n"), _require(args.m, "m")
    out = _require(args.out, "out")
    try:
        params = ChainParams(n, m, args.j, args.u)
    except ValueError as exc:
        raise CliError("invalid-params", str(exc)) from None
    seq = fmft_sequence(n) if is_power_of_two(n) else mft_fold_compile(dft_matrix(n))
    ops = estimate_build_ops(params, seq)
    if ops > args.budget:
        raise CliError(
            "budget",
            f"estimated {ops:.2e} amplitude updates for N={n}, M={m} exceeds the budget {args.budget:.1e}",
        )
    diagram = assemble_band_diagram(params, seq, threads=max(1, args.threads))
    write_band_csv(diagram, out)
    script = Path(out).with_suffix(".gp")
    write_gnuplot(diagram, out, script)
    energies = diagram.all_energies()
    print(f"eigenvalues: {len(energies)}")
    print(f"max sector leakage: {diagram.max_leakage:.3e}")
    for i, c in enumerate(diagram.clusters()):
        print(f"cluster {i}: {len(c)} states, mean {c.mean():.6g}, width {c.max() - c.min():.6g}")
    if args.oracle:
        if params.dim > args.oracle_cap:
            print(f"warning: oracle skipped, dimension {params.dim} exceeds cap {args.oracle_cap}", file=sys.stderr)
        else:
            dev = max_spectral_deviation(energies, full_ed_oracle(params, cap=args.oracle_cap))
            print(f"oracle max deviation: {dev:.3e}")
            if not dev <= args.tol_spectrum:
                raise CliError("oracle", f"spectrum deviates from exact diagonalization by {dev:.3e}")
    return 0


def cmd_verify(args) -> int:
    with verify_mod.mutation(args.mutate):
        ok = verify_mod.run(args.level)
    print("verify: " + ("all checks passed" if ok else "FAILED"))
    return 0 if ok else 1


COMMANDS = {"compile": cmd_compile, "transform": cmd_transform, "bands": cmd_bands, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error[{exc.reason}]: {exc}", file=sys.stderr)
        return exc.code
    except FormatError as exc:
        print(f"error[format]: {exc}", file=sys.stderr)
        return 2
    except (FockError, SectorLeakageError) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

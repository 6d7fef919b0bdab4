"""JSON state files, JSON gate lists, band CSV and the companion gnuplot script."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bethe import BandDiagram
from .fock import FockError, StateVector, enumerate_basis
from .transforms import GateSequence, Givens, Permute, Phase

CSV_HEADER = "q,k,K,energy"


class FormatError(ValueError):
    """Malformed input file."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def state_to_dict(v: StateVector) -> dict:
    if v.amp.ndim != 1:
        raise FormatError("only single state vectors can be written")
    amps = [
        {"mask": int(mk), "re": float(a.real), "im": float(a.imag)}
        for mk, a in zip(v.basis.states, v.amp)
        if a != 0
    ]
    return {"n": v.basis.n, "m": v.basis.m, "amplitudes": amps}


def state_from_dict(data: dict) -> StateVector:
    try:
        n, m = int(data["n"]), int(data["m"])
        entries = data["amplitudes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"state file needs integer 'n', 'm' and an 'amplitudes' list: {exc}") from None
    try:
        basis = enumerate_basis(n, m)
    except FockError as exc:
        raise FormatError(str(exc)) from None
    v = StateVector.zeros(basis)
    for e in entries:
        try:
            mask = int(e["mask"])
            amp = complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad amplitude entry {e!r}: {exc}") from None
        if mask < 0 or mask >> n or mask.bit_count() != m:
            raise FormatError(f"mask {mask} is not an {n}-site state with {m} particles")
        v.amp[basis.index(mask)] += amp
    return v


def read_state(path) -> StateVector:
    return state_from_dict(_load_json(path))


def write_state(v: StateVector, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(v), indent=1) + "\n")


def gates_to_dict(seq: GateSequence) -> dict:
    out = []
    for g in seq.gates:
        if isinstance(g, Givens):
            out.append({"type": "givens", "x": g.x, "y": g.y, "theta": g.theta})
        elif isinstance(g, Phase):
            out.append({"type": "phase", "site": g.site, "phi": g.phi})
        else:
            out.append({"type": "permute", "perm": list(g.perm)})
    return {"n": seq.n, "gates": out}


def gates_from_dict(data: dict) -> GateSequence:
    try:
        n = int(data["n"])
        gates = []
        for g in data["gates"]:
            kind = g["type"]
            if kind == "givens":
                gates.append(Givens(int(g["x"]), int(g["y"]), float(g["theta"])))
            elif kind == "phase":
                gates.append(Phase(int(g["site"]), float(g["phi"])))
            elif kind == "permute":
                gates.append(Permute(tuple(int(p) for p in g["perm"])))
            else:
                raise FormatError(f"unknown gate type {kind!r}")
        return GateSequence(n, gates)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed gate list: {exc}") from None


def read_gates(path) -> GateSequence:
    return gates_from_dict(_load_json(path))


def write_gates(seq: GateSequence, path) -> None:
    Path(path).write_text(json.dumps(gates_to_dict(seq), indent=1) + "\n")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None


def band_csv(diagram: BandDiagram) -> str:
    lines = [CSV_HEADER]
    for q, k, K, e in diagram.rows():
        lines.append(f"{q},{_fmt(k)},{_fmt(K)},{_fmt(e)}")
    return "\n".join(lines) + "\n"


def write_band_csv(diagram: BandDiagram, path) -> None:
    Path(path).write_text(band_csv(diagram))


def read_band_csv(path) -> list[tuple[int, float, float, float]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise FormatError(f"{path}: expected header {CSV_HEADER!r}")
    rows = []
    for line in lines[1:]:
        q, k, K, e = line.split(",")
        rows.append((int(q), float(k), float(K), float(e)))
    return rows


def gnuplot_script(csv_path, diagram: BandDiagram) -> str:
    p = diagram.params
    return "\n".join(
        [
            "set datafile separator ','",
            f"set title 'N={p.n}, M={p.m}, J={_fmt(p.j)}, U={_fmt(p.u)}'",
            "set xlabel 'K'",
            "set ylabel 'Energy'",
            f"set xrange [0:{_fmt(2 * math.pi)}]",
            "unset key",
            f"plot '{Path(csv_path).name}' using 3:4 skip 1 with points pt 7 ps 0.4",
            "",
        ]
    )


def write_gnuplot(diagram: BandDiagram, csv_path, script_path) -> None:
    Path(script_path).write_text(gnuplot_script(csv_path, diagram))


def max_spectral_deviation(a, b) -> float:
    a, b = np.sort(np.asarray(a)), np.sort(np.asarray(b))
    if a.shape != b.shape:
        return math.inf
    return float(np.abs(a - b).max()) if a.size else 0.0

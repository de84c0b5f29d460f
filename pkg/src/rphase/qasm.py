"""OpenQASM 2.0 interchange for the supported subset.

Emitted programs use one ``qreg`` and the gates
``x, y, z, s, sdg, t, tdg, h, ry(theta), cx, cz, ccx`` with theta an
integer multiple of pi/4. Parse/emit round-trips lowered circuits
exactly.

Constructs QASM has no word for ride along in structured comments::

    // rphase: {"roles": [...]}                      ancilla roles
    // rphase: {"marker": ..., "gates": N}           marker + N-gate expansion
    // rphase: {"gate": "tof"|..., "neg": [...], "gates": N}
                                                     negative controls / wide tof

A directive with ``"gates": N`` is followed by its N-statement expansion;
the parser swallows the expansion and restores the high-level gate, so
other QASM consumers still see a runnable program. A tof with three or
more controls cannot be expanded without ancillae and is emitted with an
empty expansion. ``parse_qasm(..., strict=True)`` rejects all rphase
directives.
"""

from __future__ import annotations

import json
import re
from math import gcd

from .catalog import marker_definition
from .circuit import (
    Circuit,
    Gate,
    ROLE_PRIMARY,
    ROLES,
    cx,
    cz,
    marker,
    ry,
    tof,
)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

_KIND_TO_QASM = {
    "x": "x", "y": "y", "z": "z", "p": "s", "pdg": "sdg",
    "t": "t", "tdg": "tdg", "h": "h",
}
_QASM_TO_KIND = {v: k for k, v in _KIND_TO_QASM.items()}


class QasmError(Exception):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"line {line}, col {col or 1}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


class UnsupportedGate(QasmError):
    pass


def _theta_str(units: int) -> str:
    """Integer multiple of pi/4 as a QASM expression."""
    if units == 0:
        return "0"
    sign = "-" if units < 0 else ""
    num, den = abs(units), 4
    g = gcd(num, den)
    num, den = num // g, den // g
    s = "pi" if num == 1 else f"{num}*pi"
    if den > 1:
        s += f"/{den}"
    return sign + s


_THETA_RE = re.compile(r"^(-?)(?:(\d+)\*)?pi(?:/(\d+))?$")


def _parse_theta(text: str, line: int, col: int) -> int:
    text = text.replace(" ", "")
    if text == "0":
        return 0
    m = _THETA_RE.match(text)
    if not m:
        raise QasmError(f"unsupported angle {text!r} (multiples of pi/4 only)", line, col)
    sign = -1 if m.group(1) else 1
    num = int(m.group(2) or 1)
    den = int(m.group(3) or 1)
    if den not in (1, 2, 4):
        raise QasmError(f"unsupported angle {text!r} (multiples of pi/4 only)", line, col)
    return sign * num * (4 // den)


def _basic_stmt(g: Gate, reg: str) -> str:
    if g.kind in _KIND_TO_QASM:
        return f"{_KIND_TO_QASM[g.kind]} {reg}[{g.target}];"
    if g.kind == "ry":
        return f"ry({_theta_str(g.param)}) {reg}[{g.target}];"
    if g.kind == "cnot":
        return f"cx {reg}[{g.controls[0]}],{reg}[{g.target}];"
    if g.kind == "cz":
        return f"cz {reg}[{g.controls[0]}],{reg}[{g.target}];"
    if g.kind == "tof" and len(g.controls) == 2:
        c1, c2 = g.controls
        return f"ccx {reg}[{c1}],{reg}[{c2}],{reg}[{g.target}];"
    raise UnsupportedGate(f"unsupported gate {g.kind}")


def _expansion(g: Gate) -> list[Gate]:
    """Plain-gate expansion of a high-level gate, [] when impossible."""
    if g.is_marker:
        return marker_definition(g)
    base = Gate(g.kind, g.controls, g.target, frozenset(), g.param)
    wraps = [Gate("x", (), q) for q in sorted(g.neg)]
    if g.kind == "tof" and len(g.controls) > 2:
        return []  # would need ancillae; directive-only
    inner = [base]
    return wraps + inner + list(reversed(wraps))


def emit_qasm(circuit: Circuit) -> str:
    """Serialize; markers and negative controls become rphase directives."""
    reg = "q"
    lines = [HEADER.rstrip("\n"), f"qreg {reg}[{circuit.width}];"]
    if any(r != ROLE_PRIMARY for r in circuit.roles):
        lines.append("// rphase: " + json.dumps({"roles": list(circuit.roles)}))
    for g in circuit.gates:
        if g.is_marker or g.neg or (g.kind == "tof" and len(g.controls) != 2):
            body = _expansion(g)
            info: dict = {"controls": list(g.controls), "target": g.target,
                          "gates": len(body)}
            if g.is_marker:
                info = {"marker": g.kind, **info, "dagger": g.dagger}
            else:
                info = {"gate": g.kind, **info, "neg": sorted(g.neg)}
            lines.append("// rphase: " + json.dumps(info))
            for gg in body:
                lines.append(_basic_stmt(gg, reg))
        else:
            lines.append(_basic_stmt(g, reg))
    return "\n".join(lines) + "\n"


_STMT_RE = re.compile(r"^(\w+)\s*(\(([^)]*)\))?\s*(.*)$")
_ARG_RE = re.compile(r"^(\w+)\[(\d+)\]$")


def _parse_args(text: str, reg: str, line: int) -> list[int]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        m = _ARG_RE.match(piece)
        if not m:
            raise QasmError(f"cannot parse qubit argument {piece!r}", line, 1)
        if m.group(1) != reg:
            raise QasmError(f"unknown register {m.group(1)!r}", line, 1)
        out.append(int(m.group(2)))
    return out


def parse_qasm(text: str, strict: bool = False) -> Circuit:
    """Parse the supported subset back into a circuit.

    ``strict=True`` rejects rphase directives (plain OpenQASM only).
    """
    reg = None
    width = 0
    roles = None
    gates: list[Gate] = []
    pending = None  # (high-level Gate, expansion statements to swallow)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("//"):
            payload = line[2:].strip()
            if not payload.startswith("rphase:"):
                continue
            if strict:
                raise QasmError("rphase directive rejected in strict mode", lineno, 1)
            info = json.loads(payload[len("rphase:"):].strip())
            if "roles" in info:
                roles = tuple(info["roles"])
                for r in roles:
                    if r not in ROLES:
                        raise QasmError(f"unknown ancilla role {r!r}", lineno, 1)
                continue
            if "marker" in info:
                g = marker(info["marker"], tuple(info["controls"]), info["target"],
                           dagger=bool(info.get("dagger")))
            else:
                g = Gate(info["gate"], tuple(info["controls"]), info["target"],
                         frozenset(info.get("neg", ())))
            pending = (g, int(info["gates"]))
            if pending[1] == 0:
                gates.append(g)
                pending = None
            continue
        if line.startswith("OPENQASM") or line.startswith("include"):
            continue
        if not line.endswith(";"):
            raise QasmError("missing ';'", lineno, len(raw))
        stmt = line[:-1].strip()
        m = _STMT_RE.match(stmt)
        if not m:
            raise QasmError(f"cannot parse statement {stmt!r}", lineno, 1)
        name, _, param, rest = m.groups()
        if name == "qreg":
            mm = _ARG_RE.match(stmt.split(None, 1)[1].replace(" ", ""))
            if not mm:
                raise QasmError("cannot parse qreg declaration", lineno, 1)
            if reg is not None:
                raise QasmError("multiple qreg declarations are not supported", lineno, 1)
            reg, width = mm.group(1), int(mm.group(2))
            continue
        if reg is None:
            raise QasmError("gate before qreg declaration", lineno, 1)
        g = _parse_gate(name, param, rest, reg, lineno)
        if pending is not None:
            high, remaining = pending
            remaining -= 1
            if remaining == 0:
                gates.append(high)
                pending = None
            else:
                pending = (high, remaining)
            continue
        gates.append(g)

    if pending is not None:
        raise QasmError("rphase directive expansion truncated", None, None)
    if reg is None:
        raise QasmError("no qreg declaration found", None, None)
    if roles is not None and len(roles) != width:
        raise QasmError("roles directive does not match register size", None, None)
    return Circuit(width, gates, roles)


def _parse_gate(name: str, param: str | None, rest: str, reg: str, lineno: int) -> Gate:
    args = _parse_args(rest, reg, lineno)
    if name in _QASM_TO_KIND:
        if param is not None or len(args) != 1:
            raise QasmError(f"malformed {name} statement", lineno, 1)
        return Gate(_QASM_TO_KIND[name], (), args[0])
    if name == "ry":
        if param is None or len(args) != 1:
            raise QasmError("malformed ry statement", lineno, 1)
        return ry(args[0], _parse_theta(param, lineno, 1))
    if name == "cx":
        if len(args) != 2:
            raise QasmError("cx takes two qubits", lineno, 1)
        return cx(args[0], args[1])
    if name == "cz":
        if len(args) != 2:
            raise QasmError("cz takes two qubits", lineno, 1)
        return cz(args[0], args[1])
    if name == "ccx":
        if len(args) != 3:
            raise QasmError("ccx takes three qubits", lineno, 1)
        return tof((args[0], args[1]), args[2])
    raise UnsupportedGate(f"unsupported gate {name!r}", lineno, 1)

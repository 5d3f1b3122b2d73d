"""Reader and writer for the CPLEX-style LP text format.

Only the subset this package emits is supported: a Minimize objective,
linear constraints with <=, >= or =, a Bounds section, and a Binary section.
Coefficients are written with 12 significant digits; emission is a pure
function of the model, so identical inputs yield byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

INF = float("inf")


@dataclass
class LpFile:
    name: str
    objective: list[tuple[float, str]]
    constraints: list[tuple[str, list[tuple[float, str]], str, float]]
    bounds: dict[str, tuple[float, float]]
    binaries: list[str] = field(default_factory=list)


def _num(x: float) -> str:
    return f"{x:.12g}"


def _terms(terms: list[tuple[float, str]]) -> str:
    parts: list[str] = []
    for coef, var in terms:
        if not parts:
            if coef == 1.0:
                parts.append(var)
            elif coef == -1.0:
                parts.append(f"- {var}")
            else:
                parts.append(f"{_num(coef)} {var}")
        else:
            sign = "+" if coef >= 0 else "-"
            mag = abs(coef)
            if mag == 1.0:
                parts.append(f"{sign} {var}")
            else:
                parts.append(f"{sign} {_num(mag)} {var}")
    return " ".join(parts) if parts else "0 zero_placeholder"


def dumps_lp(lp: LpFile) -> str:
    out = [f"\\ {lp.name}", "Minimize", f" obj: {_terms(lp.objective)}"]
    out.append("Subject To")
    for name, terms, sense, rhs in lp.constraints:
        out.append(f" {name}: {_terms(terms)} {sense} {_num(rhs)}")
    out.append("Bounds")
    for var in lp.bounds:
        lb, ub = lp.bounds[var]
        if lb == -INF and ub == INF:
            out.append(f" {var} free")
        elif ub == INF:
            out.append(f" {var} >= {_num(lb)}")
        else:
            out.append(f" {_num(lb)} <= {var} <= {_num(ub)}")
    if lp.binaries:
        out.append("Binary")
        for var in lp.binaries:
            out.append(f" {var}")
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(lp: LpFile, path) -> None:
    Path(path).write_text(dumps_lp(lp), encoding="utf-8")


def _parse_terms(tokens: list[str]) -> list[tuple[float, str]]:
    terms: list[tuple[float, str]] = []
    sign = 1.0
    coef: float | None = None
    for tok in tokens:
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                value = float(tok)
            except ValueError:
                terms.append((sign * (1.0 if coef is None else coef), tok))
                sign, coef = 1.0, None
            else:
                coef = value
    return terms


def loads_lp(text: str) -> LpFile:
    name = ""
    objective: list[tuple[float, str]] = []
    constraints: list[tuple[str, list, str, float]] = []
    bounds: dict[str, tuple[float, float]] = {}
    binaries: list[str] = []
    section = ""
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            if not name:
                name = line[1:].strip()
            continue
        low = line.lower()
        if low in ("minimize", "subject to", "bounds", "binary", "end"):
            section = low
            continue
        if section == "minimize":
            body = line.split(":", 1)[1] if ":" in line else line
            objective.extend(_parse_terms(body.split()))
        elif section == "subject to":
            cname, body = (s.strip() for s in line.split(":", 1))
            tokens = body.split()
            sense_idx = next(i for i, t in enumerate(tokens) if t in ("<=", ">=", "="))
            terms = _parse_terms(tokens[:sense_idx])
            constraints.append((cname, terms, tokens[sense_idx], float(tokens[sense_idx + 1])))
        elif section == "bounds":
            tokens = line.split()
            if tokens[-1].lower() == "free":
                bounds[tokens[0]] = (-INF, INF)
            elif len(tokens) == 5 and tokens[1] == "<=" and tokens[3] == "<=":
                bounds[tokens[2]] = (float(tokens[0]), float(tokens[4]))
            elif len(tokens) == 3 and tokens[1] == ">=":
                bounds[tokens[0]] = (float(tokens[2]), INF)
            elif len(tokens) == 3 and tokens[1] == "<=":
                bounds[tokens[0]] = (0.0, float(tokens[2]))
            else:
                raise ValueError(f"unsupported bound line: {line!r}")
        elif section == "binary":
            binaries.extend(line.split())
    return LpFile(name, objective, constraints, bounds, binaries)


def read_lp(path) -> LpFile:
    return loads_lp(Path(path).read_text(encoding="utf-8"))

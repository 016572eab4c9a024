"""LP-format text export and import for cross-checking with external solvers.

The writer is deterministic: the same problem always yields the same bytes.
The reader handles the subset the writer emits (linear objective and rows,
a Bounds section, and a Binaries section); variable metadata is not part of
the format and is lost on a round trip.
"""

from __future__ import annotations

import re

from .problem import LinearRow, MilpProblem, Variable

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")
_TERM_RE = re.compile(r"([+-])\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_.]*)")


def _num(x: float) -> str:
    """Shortest exact decimal for a float (repr), with -0 normalized."""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _terms(coeffs, names) -> str:
    parts = []
    for j, coef in coeffs:
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {_num(abs(coef))} {names[j]}")
    if not parts:
        return "0 " + names[0]
    joined = " ".join(parts)
    return joined[2:] if joined.startswith("+ ") else joined


def write_lp(problem: MilpProblem) -> str:
    names = [v.name for v in problem.variables]
    for name in names:
        if not _NAME_RE.match(name):
            raise ValueError(f"variable name {name!r} not LP-format safe")
    out = [f"\\ {problem.name}", "Maximize", f" obj: {_terms(problem.objective, names)}"]
    out.append("Subject To")
    sense_txt = {"<=": "<=", ">=": ">=", "=": "="}
    for row in problem.rows:
        out.append(
            f" {row.name}: {_terms(row.coeffs, names)} {sense_txt[row.sense]} {_num(row.rhs)}"
        )
    out.append("Bounds")
    for v in problem.variables:
        up = "+inf" if v.upper == float("inf") else _num(v.upper)
        out.append(f" {_num(v.lower)} <= {v.name} <= {up}")
    binaries = [v.name for v in problem.variables if v.kind == "binary"]
    if binaries:
        out.append("Binaries")
        for i in range(0, len(binaries), 8):
            out.append(" " + " ".join(binaries[i : i + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp_file(problem: MilpProblem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_lp(problem))


def _parse_terms(text: str) -> list[tuple[str, float]]:
    text = text.strip()
    if not text.startswith(("+", "-")):
        text = "+ " + text
    found = []
    for sign, coef, name in _TERM_RE.findall(text):
        value = float(coef) if coef else 1.0
        found.append((name, value if sign == "+" else -value))
    return found


def read_lp(text: str, name: str = "imported") -> MilpProblem:
    """Parse the writer's LP subset back into a problem."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("\\")]

    section = None
    objective_text = ""
    row_texts: list[tuple[str, str]] = []
    bounds: dict[str, tuple[float, float]] = {}
    binaries: set[str] = set()

    for ln in lines:
        low = ln.lower()
        if low in ("maximize", "maximise", "max"):
            section = "obj"
            continue
        if low in ("subject to", "st", "s.t.", "such that"):
            section = "rows"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low in ("binaries", "binary", "bin"):
            section = "bin"
            continue
        if low == "end":
            break
        if section == "obj":
            body = ln.split(":", 1)[1] if ":" in ln else ln
            objective_text += " " + body
        elif section == "rows":
            if ":" in ln:
                rname, body = ln.split(":", 1)
                row_texts.append((rname.strip(), body.strip()))
            else:
                rname, body = row_texts[-1]
                row_texts[-1] = (rname, body + " " + ln)
        elif section == "bounds":
            num = r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"
            m = re.match(
                rf"(-inf|{num})\s*<=\s*([A-Za-z_][A-Za-z0-9_.]*)\s*<=\s*(\+inf|{num})\s*$",
                ln,
            )
            if not m:
                raise ValueError(f"unsupported bounds line: {ln!r}")
            lo = float("-inf") if m.group(1) == "-inf" else float(m.group(1))
            hi = float("inf") if m.group(3) == "+inf" else float(m.group(3))
            bounds[m.group(2)] = (lo, hi)
        elif section == "bin":
            binaries.update(ln.split())

    obj_terms = _parse_terms(objective_text)
    parsed_rows = []
    var_names: list[str] = []
    seen: set[str] = set()

    def note(nm: str) -> None:
        if nm not in seen:
            seen.add(nm)
            var_names.append(nm)

    for nm, _ in obj_terms:
        note(nm)
    for rname, body in row_texts:
        m = re.search(r"(<=|>=|=)\s*([-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*$", body)
        if not m:
            raise ValueError(f"row {rname!r} has no sense/rhs")
        sense, rhs = m.group(1), float(m.group(2))
        terms = _parse_terms(body[: m.start()])
        for nm, _ in terms:
            note(nm)
        parsed_rows.append((rname, terms, sense, rhs))
    for nm in bounds:
        note(nm)
    for nm in binaries:
        note(nm)

    index = {nm: j for j, nm in enumerate(var_names)}
    variables = []
    for nm in var_names:
        lo, hi = bounds.get(nm, (0.0, 1.0 if nm in binaries else float("inf")))
        kind = "binary" if nm in binaries else "continuous"
        variables.append(Variable(nm, lo, hi, kind))
    rows = tuple(
        LinearRow(rname, tuple((index[nm], co) for nm, co in terms), sense, rhs)
        for rname, terms, sense, rhs in parsed_rows
    )
    objective = tuple((index[nm], co) for nm, co in obj_terms)
    return MilpProblem(name, tuple(variables), objective, rows)


def read_lp_file(path) -> MilpProblem:
    with open(path, encoding="utf-8") as fh:
        return read_lp(fh.read(), name=str(path))

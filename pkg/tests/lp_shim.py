#!/usr/bin/env python3
"""Minimal LP-file MILP solver used as an external solver in tests.

Usage: lp_shim.py MODEL.lp SOLUTION.out

Parses the LP dialect this project emits (linear objective only) and
solves it with scipy's MILP interface, then writes one 'name value' line
per variable. Exists so the solve-external path can be exercised without
a standalone solver binary.
"""

import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

_NUMBER = re.compile(r"^[0-9][0-9.]*([eE][+-]?[0-9]+)?$|^\.[0-9]+$")


def _records(lines):
    """Group wrapped lines into logical records (continuations are
    indented deeper than the 1-space record start)."""
    records = []
    for line in lines:
        if not line.strip():
            continue
        if line.startswith(("   ", "  ")) and records:
            records[-1] += " " + line.strip()
        else:
            records.append(line.strip())
    return records


def _parse_terms(tokens):
    terms = []
    sign = 1.0
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        elif _NUMBER.match(tok):
            terms.append((tokens[i + 1], sign * float(tok)))
            sign = 1.0
            i += 1
        else:
            terms.append((tok, sign))
            sign = 1.0
        i += 1
    return terms


def parse_lp(text):
    sections = {}
    current = None
    for raw in text.splitlines():
        if raw.startswith("\\"):
            continue
        stripped = raw.strip()
        if stripped in ("Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"):
            current = stripped
            sections[current] = []
            continue
        if current:
            sections[current].append(raw)

    if any("[" in l for l in sections.get("Minimize", [])):
        raise SystemExit("quadratic objectives not supported by this shim")

    obj_rec = _records(sections["Minimize"])[0]
    obj_terms = _parse_terms(obj_rec.split(":", 1)[1].split())

    constraints = []
    for rec in _records(sections.get("Subject To", [])):
        name, _, body = rec.partition(":")
        tokens = body.split()
        sense, rhs = tokens[-2], float(tokens[-1])
        constraints.append((name.strip(), _parse_terms(tokens[:-2]), sense, rhs))

    lo, hi = {}, {}
    for rec in _records(sections.get("Bounds", [])):
        tokens = rec.split()
        if len(tokens) == 2 and tokens[1] == "free":
            lo[tokens[0]], hi[tokens[0]] = -np.inf, np.inf
        elif len(tokens) == 3 and tokens[1] == "=":
            lo[tokens[0]] = hi[tokens[0]] = float(tokens[2])
        elif len(tokens) == 3 and tokens[1] == ">=":
            lo[tokens[0]] = float(tokens[2])
        elif len(tokens) == 5:
            lo[tokens[2]], hi[tokens[2]] = float(tokens[0]), float(tokens[4])
        else:
            raise SystemExit(f"unsupported bounds line: {rec}")

    binaries = set()
    for rec in _records(sections.get("Binaries", [])):
        binaries.update(rec.split())
    generals = set()
    for rec in _records(sections.get("Generals", [])):
        generals.update(rec.split())

    names = []
    seen = set()
    for name, _ in obj_terms:
        if name not in seen:
            names.append(name)
            seen.add(name)
    for _, terms, _, _ in constraints:
        for name, _ in terms:
            if name not in seen:
                names.append(name)
                seen.add(name)
    for name in list(lo) + list(hi) + sorted(binaries) + sorted(generals):
        if name not in seen:
            names.append(name)
            seen.add(name)
    return names, obj_terms, constraints, lo, hi, binaries, generals


def main():
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    text = open(sys.argv[1], encoding="utf-8").read()
    names, obj_terms, constraints, lo, hi, binaries, generals = parse_lp(text)
    index = {name: i for i, name in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for name, coef in obj_terms:
        c[index[name]] += coef

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    integrality = np.zeros(n)
    for name in binaries:
        ub[index[name]] = 1.0
        integrality[index[name]] = 1
    for name in generals:
        integrality[index[name]] = 1
    for name, v in lo.items():
        lb[index[name]] = v
    for name, v in hi.items():
        ub[index[name]] = v

    lcs = []
    for _, terms, sense, rhs in constraints:
        row = np.zeros(n)
        for name, coef in terms:
            row[index[name]] += coef
        if sense == "<=":
            lcs.append(LinearConstraint(row, -np.inf, rhs))
        elif sense == ">=":
            lcs.append(LinearConstraint(row, rhs, np.inf))
        else:
            lcs.append(LinearConstraint(row, rhs, rhs))

    res = milp(c=c, constraints=lcs, integrality=integrality, bounds=Bounds(lb, ub))
    if not res.success:
        raise SystemExit(f"solve failed: {res.message}")
    with open(sys.argv[2], "w", encoding="utf-8") as out:
        out.write(f"# objective {float(res.fun)!r}\n")
        for name, value in zip(names, res.x):
            out.write(f"{name} {float(value)!r}\n")


if __name__ == "__main__":
    main()

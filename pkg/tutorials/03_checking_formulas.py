"""Checking explicit formulas for primitive forms.

A formula is a polynomial in named forms; pm(x) marks a conjugate pair and
``v`` a root of a quadratic relation.  The verifier multiplies by Delta_N and
compares with the computed newforms.  Run with
``python tutorials/03_checking_formulas.py``.
"""
from primforms.formula import binding_set, evaluate_formal, expand_conjugates, parse, single_values, to_text
from primforms.formula.verify import load_dataset, summary_line, verify_dataset, verify_entry

entries = {e.id: e for e in load_dataset()}

e = entries["L1-P24"]
expr = parse(e.expression)
print(e.id, ":", to_text(expr))
for c in expand_conjugates(expr):
    print("  conjugate:", to_text(c))

# one formal evaluation produces every conjugate
formal, ctx = evaluate_formal(expr, binding_set(1), 6)
for vals in single_values(formal, ctx, 6):
    print("  expression (before Delta_1):", [str(x) for x in vals[:4]])

r = verify_entry(e)
print(f"{r.id}: {r.status} at precision {r.precision} ({r.detail})")

# degree-4 orbits are checked through their conjugate sum and charpolys
r = verify_entry(entries["L9-P20-s"])
print(f"{r.id}: {r.status} ({r.detail})")

# a misprint kept next to its corrected reading
r = verify_entry(entries["L6-P44-6"])
print(f"{r.id}: {r.status}; as printed: {r.literal['detail']}")

reports, problems = verify_dataset([x for x in entries.values() if x.level == 3])
print("\nlevel 3:", summary_line(reports), "; incomplete classes:", problems or "none")

"""Walk through the instance model and the OPB text format.

Shows how raw constraints with arbitrary operators and negative coefficients
normalize into the canonical `>=` form, and that parse/serialize round-trips
an instance structurally unchanged.
"""

from pbls import (
    Literal,
    RawConstraint,
    normalize_constraint,
    parse_instance,
    same_structure,
    serialize_instance,
)

print("== Normalization ==")
examples = [
    RawConstraint([(2, Literal(1)), (1, Literal(2))], ">", 2),
    RawConstraint([(-2, Literal(1)), (3, Literal(2))], ">=", 1),
    RawConstraint([(1, Literal(1)), (1, Literal(2))], "=", 1),
    RawConstraint([(3, Literal(1))], "<=", 1),
]
for raw in examples:
    body = " ".join(f"{a:+d} {lit}" for a, lit in raw.terms)
    normalized = normalize_constraint(raw)
    print(f"  {body} {raw.op} {raw.threshold}")
    for c in normalized:
        print(f"      ->  {c}")

print()
print("== Parsing an OPB document ==")
text = """\
* a tiny weighted covering problem
min: +2 x1 +1 x2 +3 x3 ;
+1 x1 +1 x2 >= 1 ;
+2 x2 +3 x3 >= 3 ;
-1 x1 -1 x3 >= -1 ;
"""
inst, report = parse_instance(text, name="demo")
print(f"  variables: {inst.num_vars}, constraints: {len(inst.constraints)}")
print(f"  report: {report}")
for c in inst.constraints:
    print(f"    {c}")

print()
print("== Round trip ==")
serialized = serialize_instance(inst)
print(serialized)
again, _ = parse_instance(serialized)
print(f"  parse(serialize(F)) structurally identical: {same_structure(inst, again)}")

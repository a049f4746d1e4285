"""
Inferring abstract codes from co-occurring objects
==================================================
"""

from pathlib import Path

from iconorec import infer, load_rules

DATA = Path(__file__).resolve().parent.parent / "data"

# Abstract subjects (hunting, justice) have no single detectable object,
# but often follow from objects seen together.  Rules live in plain JSON
# so curators can audit every inference.
ruleset = load_rules(DATA / "rules.json")
for rule in ruleset.rules:
    print(rule.id, "-", rule.note)

# A deer, a dog, a horse and a human together: probably a hunt.
labels = {"deer", "dog", "horse", "human being"}
print("labels:", sorted(labels))
print("inferred:", infer(set(), labels, ruleset))

# Rules can also chain off already-assigned codes.  The two Hercules
# attribute codes trigger the broader Hercules narrative code, and
# inference always reaches a fixpoint because codes are only ever added.
codes = {"94L8(CLUB)", "94L8(LION'S SKIN)"}
closed = infer(codes, set(), ruleset)
print("codes:", sorted(codes), "->", sorted(closed))

# Nothing fires when an antecedent is missing.
print("partial evidence:", infer({"94L8(CLUB)"}, set(), ruleset))

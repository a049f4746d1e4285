"""
Parsing Iconclass notations and walking the hierarchy
=====================================================
"""

from iconorec import ancestors, hierarchy_relation, parent, parse

# A notation packs a whole taxonomy path into one string.  Digits and
# capital letters each refine the subject by one step.
dog = parse("34B11")
print(dog, "->", [(a.kind, a.value) for a in dog.atoms])

# Bracketed text embeds a species or proper name as a single step, and a
# trailing (+...) key adds qualifier characters one step each.
lion = parse("25F23(LION)(+12)")
print(lion, "-> depth", lion.depth)
print("atoms:", [a.value for a in lion.atoms], "key:", [a.value for a in lion.key])

# Doubled letters are ordinary consecutive steps; 25FF is the fabulous-
# animals counterpart of 25F and sits two steps below 25.
musk_deer = parse("25FF24(MUSK-DEER)(+78)")
print(musk_deer, "-> parent", parent(musk_deer))

# parent() peels one step at a time: key characters first, then the key
# itself vanishes, then the main atoms.
node = lion
while node is not None:
    print("  ", node)
    node = parent(node)

# ancestors() gives the chain up to a cap, ending at the division root.
print("two ancestors of 94L53:", [str(a) for a in ancestors(parse("94L53"), 2)])

# hierarchy_relation buckets tree proximity: identical 1.0, one step 0.5,
# two steps 0.25, further 0.0.  The Hercules dye code 94L53 is absent from
# most collections, but nearby codes still signal the same narrative.
for other in ["94L53", "94L5", "94L8(CLUB)", "94L8(LION'S SKIN)", "34B11"]:
    print(f"relation(94L53, {other}) =", hierarchy_relation(parse("94L53"), parse(other)))

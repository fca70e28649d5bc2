"""Tour of the code space: parsing, metrics, sketches, reductions.

Run with: python3 demos/01_sketches_and_reductions.py
"""

from popquiz import (
    abstract,
    code_distance,
    metrics,
    parse,
    red_codes,
    serialize,
    serialize_sketch,
    sketch_distance,
    substructures,
)

# The running example: a maze solver that hugs walls until it reaches the
# goal, preferring to step forward, then to turn left, then right.
solution = parse(
    "Run{RepeatUntil(goal){IfElse(pathAhead){move}{IfElse(pathLeft){turnLeft}{turnRight}}}}"
)

m = metrics(solution)
print("code:", serialize(solution))
print(f"blocks={sorted(m.blocks)} size={m.size} depth={m.depth}")
print()

# The sketch keeps only the control-flow constructs.
sketch = abstract(solution)
print("sketch:", serialize_sketch(sketch))
print("substructures (shallow to deep):")
for sub in substructures(sketch):
    print("  ", serialize_sketch(sub))
print()

# Reductions: all smaller codes reachable by node removals that land on a
# chosen substructure. For the loop-only substructure there are exactly 3.
target = substructures(sketch)[1]
print("reductions preserving", serialize_sketch(target) + ":")
for reduced in sorted(red_codes(solution, target), key=serialize):
    print("  ", serialize(reduced))
print()

# Both spaces carry a unit-cost tree edit distance.
student = parse("Run{move;move;turnLeft}")
print("student attempt:", serialize(student))
print("code distance to the solution:", code_distance(student, solution))
print("sketch distance to the solution sketch:",
      sketch_distance(abstract(student), sketch))

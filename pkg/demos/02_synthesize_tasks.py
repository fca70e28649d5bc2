"""Task synthesis: build fresh puzzles that a given code solves.

Run with: python3 demos/02_synthesize_tasks.py
"""

from popquiz import SynthParams, check_solves, parse, serialize_task, synthesize_tasks

code = parse("Run{RepeatUntil(goal){IfElse(pathAhead){move}{turnLeft}}}")
print("code:", "Run{RepeatUntil(goal){IfElse(pathAhead){move}{turnLeft}}}")
print()

tasks = synthesize_tasks(code, SynthParams(tasks_per_code=4, rng_seed=2024))
print(f"got {len(tasks)} diverse tasks; best two:")
for task, quality in tasks[:2]:
    print(f"--- quality {quality:.3f} "
          f"(agent at {task.start.row},{task.start.col} facing {task.start.direction})")
    print(serialize_task(task))
    assert check_solves(code, task)

# Marker worlds work the same way; the target marker grid and the final
# agent pose are read off the synthesized run.
karel = parse("Run{While(pathAhead){putMarker;move}}")
ktasks = synthesize_tasks(karel, SynthParams(tasks_per_code=2, rng_seed=7))
task, quality = ktasks[0]
print(f"--- karel task, quality {quality:.3f}")
print(serialize_task(task))
assert check_solves(karel, task)

#!/usr/bin/env python3
"""Regenerates the bundled 20-job/2-machine instance family under instances/.

The base schedule used for the fix lists places job j at slot j on machine 1
and slot j+1 on machine 2, with machine 2 idling at slot 1 (head dummy) and
slot 22 (tail dummy). Due times and production groups are chosen so that this
schedule is cost-optimal: every job meets its due time and group switches only
occur at the five-job block boundaries. The sub-instance files free a small
window of that schedule and fix every other variable, which is how the
reduced N-variable problems are produced.
"""

import json
import os

J = 20
M = 2
IDLE = [0, 2]
COST_EARLY = 1
COST_LATE = 2
COST_SWITCH = 1
PENALTY = 6

T = [J + e for e in IDLE]


def group(j):
    return "g%d" % ((j - 1) // 5 + 1)


def canonical_x(m, j, t):
    if m == 1:
        return 1 if t == j else 0
    return 1 if t == j + 1 else 0


def canonical_y(m, t):
    # machine 2: head dummy at slot 1 (y=1), tail dummy at slot 22 (y=0)
    assert m == 2
    return {1: 1, 2: 0}[t]


def base_instance():
    return {
        "jobs": J,
        "machines": M,
        "idle": IDLE,
        "due": [j + 1 for j in range(1, J + 1)],
        "groups": [[group(j) for j in range(1, J + 1)] for _ in range(M)],
        "cost_early": COST_EARLY,
        "cost_late": COST_LATE,
        "cost_switch": COST_SWITCH,
        "penalty": PENALTY,
    }


def fix_list(free):
    """Fix directives for every variable outside the free set."""
    fixes = []
    for m in range(1, M + 1):
        for j in range(1, J + 1):
            for t in range(1, T[m - 1] + 1):
                if ("x", m, j, t) in free:
                    continue
                fixes.append({"var": "x", "m": m, "j": j, "t": t,
                              "value": canonical_x(m, j, t)})
    for m in range(1, M + 1):
        for t in range(1, IDLE[m - 1] + 1):
            if ("y", m, t) in free:
                continue
            fixes.append({"var": "y", "m": m, "t": t, "value": canonical_y(m, t)})
    return fixes


def free_block(machine, jobs, slots, dummies=()):
    free = {("x", machine, j, t) for j in jobs for t in slots}
    free |= {("y", m, t) for (m, t) in dummies}
    return free


SUBSETS = {
    "n5": free_block(2, [18, 19], [19, 20], dummies=[(2, 1)]),
    "n10": free_block(2, [17, 18, 19], [18, 19, 20], dummies=[(2, 1)]),
    "n12": free_block(2, [18, 19, 20], [19, 20, 21, 22]),
    "n16": free_block(2, [3, 4, 5, 6], [4, 5, 6, 7]),
    "n23": free_block(1, [8, 9, 10, 11], [8, 9, 10, 11])
    | free_block(2, [18, 19], [19, 20, 21], dummies=[(2, 1)]),
}


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "instances")
    os.makedirs(out_dir, exist_ok=True)

    def write(name, doc):
        path = os.path.join(out_dir, name)
        with open(path, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        print("wrote", path)

    write("jsp20x2.json", base_instance())
    for name, free in sorted(SUBSETS.items()):
        doc = base_instance()
        doc["fix"] = fix_list(free)
        assert len(doc["fix"]) + len(free) == sum(J * t for t in T) + sum(IDLE)
        write("jsp20x2_%s.json" % name, doc)


if __name__ == "__main__":
    main()

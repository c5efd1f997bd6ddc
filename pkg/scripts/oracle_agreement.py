#!/usr/bin/env python3
"""Random-program agreement experiment: the goal-directed solver against the
brute-force stable-model enumerator.

    python3 scripts/oracle_agreement.py --programs 500 --seed 20130913
"""

import argparse
import random
import sys
import time
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))
sys.path.insert(0, str(REPO_ROOT / "tests"))

from _generators import random_ground_program
from hfadvisor.grounder import ground_program
from hfadvisor.model import lit
from hfadvisor.parser import parse_query
from hfadvisor.solver import enumerate_stable_models_bruteforce, solve


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--programs", type=int, default=500)
    parser.add_argument("--seed", type=int, default=20130913)
    parser.add_argument("--max-atoms", type=int, default=12)
    parser.add_argument("--max-rules", type=int, default=20)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    started = time.monotonic()
    disagreements = 0
    answers_total = 0
    models_total = 0
    for trial in range(args.programs):
        program, atoms = random_ground_program(
            rng, max_atoms=args.max_atoms, max_rules=args.max_rules
        )
        ground = ground_program(program)
        models = [m.atoms for m in enumerate_stable_models_bruteforce(ground)]
        models_total += len(models)
        target = lit(rng.choice(atoms))
        answers = list(solve(ground, parse_query("?- %s." % target)))
        answers_total += len(answers)

        models_with = [m for m in models if target in m]
        ok = bool(answers) == bool(models_with)
        ok = ok and all(
            any(a.positive <= m and not (a.nafs & m) for m in models) for a in answers
        )
        ok = ok and all(
            any(a.positive <= m and not (a.nafs & m) for a in answers)
            for m in models_with
        )
        if not ok:
            disagreements += 1
            print("DISAGREEMENT on trial %d (query %s)" % (trial, target))

    elapsed = time.monotonic() - started
    print(
        "%d programs, %d stable models, %d answers, %d disagreements, %.1fs"
        % (args.programs, models_total, answers_total, disagreements, elapsed)
    )
    return 1 if disagreements else 0


if __name__ == "__main__":
    raise SystemExit(main())

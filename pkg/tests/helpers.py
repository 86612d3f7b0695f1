"""Seeded random-table generators shared across the test modules.

Two flavors: semantically well-formed tables that exercise every perturbation
kind (``make_rich_table``), and syntax-stressing tables for the parser
round-trip (``make_fuzz_table``).
"""

from __future__ import annotations

import random

from gridfact import Table, table_new

# Words that always parse as plain text: no booleans, numbers, or date forms.
SAFE_WORDS = (
    "amber", "birch", "cedar", "delta", "ember", "flint", "grove", "harbor",
    "iris", "juniper", "krill", "lumen", "maple", "nectar", "onyx", "pluto",
    "quartz", "raven", "sable", "tundra", "umber", "violet", "willow", "zephyr",
)

SUBJECT_WORDS = (
    "alpha station", "beta ridge", "gamma works", "delta holdings",
    "epsilon labs", "zeta mill", "eta forge", "theta yard",
)

FUZZ_CELLS = (
    "",
    "plain words",
    "a|b",
    "two||pipes",
    "back\\slash",
    "trail\\",
    "héllo wörld",
    "naïve café",
    "表格内容",
    "✓ done",
    "100%",
    "$1,000",
    "1,2,3",
    "mixed 42 text",
    "semi;colon",
    "d--ash",
    "under_score",
)

FUZZ_HEADERS = (
    "Name", "Värde", "amount|total", "notes\\misc", "列 A",
    "What?", "x y z", "K2", "pct %",
)


def make_rich_table(rng: random.Random) -> Table:
    """A dense table where every perturbation kind is applicable.

    Guarantees: distinct subjects, one large-integer column, one text column,
    at least two rows, all cells non-empty, unique header keys.
    """
    n_rows = rng.randint(2, 6)
    extra_pool = ["ratio", "share", "since", "active", "comment"]
    rng.shuffle(extra_pool)
    extras = extra_pool[: rng.randint(0, 2)]
    headers = ["Entity", "Amount", "Label"] + [e.capitalize() for e in extras]

    subjects = rng.sample(SUBJECT_WORDS, n_rows)
    amounts = rng.sample(range(1000, 10_000_000), n_rows)
    rows = []
    for r in range(n_rows):
        row = [
            subjects[r],
            f"{amounts[r]:,}" if rng.random() < 0.5 else str(amounts[r]),
            " ".join(rng.sample(SAFE_WORDS, 2)),
        ]
        for e in extras:
            if e == "ratio":
                row.append(f"{rng.uniform(1.0, 500.0):.2f}")
            elif e == "share":
                row.append(f"{rng.randint(1, 99)}%")
            elif e == "since":
                row.append(f"{rng.randint(2000, 2025)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}")
            elif e == "active":
                row.append(rng.choice(["yes", "no", "true", "false"]))
            else:
                row.append(rng.choice(SAFE_WORDS))
        rows.append(row)
    return table_new(headers, rows)


def make_fuzz_table(rng: random.Random) -> Table:
    """A syntax-stressing table: pipes, backslashes, unicode, empty cells.

    Cells are trim-stable (no leading/trailing whitespace, no newlines), the
    only normalization the parser applies.
    """
    n_cols = rng.randint(1, 4)
    n_rows = rng.randint(1, 5)
    headers = rng.sample(FUZZ_HEADERS, n_cols)
    rows = [[rng.choice(FUZZ_CELLS) for _ in range(n_cols)] for _ in range(n_rows)]
    return table_new(headers, rows)

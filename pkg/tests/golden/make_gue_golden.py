"""Regenerate gue_wick.json from the Wick-pairing oracle.

    python3 tests/golden/make_gue_golden.py
"""

import json
import os

from todatau.applications import all_degree_tuples, gue_wick_oracle

SAMPLES = range(1, 9)


def build():
    rows = []
    for k in (2, 3, 4):
        for degrees in all_degree_tuples(k, 8):
            rows.append({"degrees": list(degrees),
                         "values": {str(n): str(gue_wick_oracle(degrees, n)) for n in SAMPLES}})
    return rows


if __name__ == "__main__":
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "gue_wick.json")
    with open(path, "w") as fh:
        json.dump(build(), fh, indent=1)
        fh.write("\n")

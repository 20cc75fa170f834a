"""CSV emission of simulation runs (fixed column contract)."""

from __future__ import annotations

import numpy as np

BASE_COLUMNS = ("t", "x", "y", "psi", "u", "v", "r", "tau_u", "tau_r", "tau1", "tau2")
MODE_COLUMNS = {
    "stabilize": ("xbar", "ybar", "vbar", "z", "ubar", "L1", "L2", "D1", "D2"),
    "track": ("xe", "ye", "psie", "ue", "ve", "re", "vbare", "ze", "ubare", "red", "L3",
              "err_norm"),
    "reference": (),
}


def csv_columns(mode: str) -> tuple[str, ...]:
    return BASE_COLUMNS + MODE_COLUMNS[mode]


def write_csv(ts, path) -> None:
    names = csv_columns(ts.mode)
    data = [ts.t] + [ts[n] for n in names[1:]]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(names) + "\n")
        if len(ts):
            rows = np.column_stack(data).tolist()
            # repr is the shortest string that round-trips a float
            fh.writelines(",".join(map(repr, row)) + "\n" for row in rows)


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [[float(x) for x in line.split(",")] for line in fh if line.strip()]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))

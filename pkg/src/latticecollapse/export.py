"""Writers for decoherence tables and trajectory ensembles.

Numbers are written with ``repr`` so that files round-trip exactly and are
byte-identical across runs.  Files are written to a temporary name and
renamed into place.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def write_atomic(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    return path


def table_csv(matrix: np.ndarray, labels: list[str]) -> str:
    """Header ``config`` then ``re_<label>, im_<label>`` per column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["config"]
    for lab in labels:
        header += [f"re_{lab}", f"im_{lab}"]
    w.writerow(header)
    for lab, row in zip(labels, matrix):
        cells = [lab]
        for z in row:
            cells += [repr(float(z.real)), repr(float(z.imag))]
        w.writerow(cells)
    return buf.getvalue()


def table_json(matrix: np.ndarray, labels: list[str], extent: int) -> str:
    doc = {
        "extent": extent,
        "labels": labels,
        "re": [[float(z.real) for z in row] for row in matrix],
        "im": [[float(z.imag) for z in row] for row in matrix],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def read_table_csv(text: str) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    labels = [h[3:] for h in header[1::2]]
    M = np.array([[complex(float(r[1 + 2 * j]), float(r[2 + 2 * j])) for j in range(len(labels))]
                  for r in body])
    return labels, M


def read_table_json(text: str) -> tuple[list[str], np.ndarray]:
    doc = json.loads(text)
    return doc["labels"], np.array(doc["re"]) + 1j * np.array(doc["im"])

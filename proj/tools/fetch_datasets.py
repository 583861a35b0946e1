#!/usr/bin/env python3
"""Download the benchmark datasets into data/ as normalized CSV files.

Produces:
  data/wdbc.csv     breast-cancer diagnosis (binary: M / B), 30 features
  data/pima.csv     diabetes onset (binary: 1 / 0), 8 features
  data/seismic.csv  seismic hazard bumps (binary: 1 / 0), mixed features

wdbc.csv is checksum-pinned: the transformation is deterministic and the
expected digest is embedded below. The other two sources have historically
moved around, so their digests are printed for pinning rather than enforced.

Usage: python3 tools/fetch_datasets.py [--data-dir data] [--only NAME]
"""

import argparse
import csv
import hashlib
import io
import sys
import urllib.error
import urllib.request
from pathlib import Path

WDBC_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/wdbc.data"
WDBC_SHA256 = "be74b0ffadde653376c692f2727682eefc92d4d28009b80fea0fe63975ec59d2"
WDBC_COLUMNS = [
    "mean_radius", "mean_texture", "mean_perimeter", "mean_area",
    "mean_smoothness", "mean_compactness", "mean_concavity",
    "mean_concave_points", "mean_symmetry", "mean_fractal_dimension",
    "radius_error", "texture_error", "perimeter_error", "area_error",
    "smoothness_error", "compactness_error", "concavity_error",
    "concave_points_error", "symmetry_error", "fractal_dimension_error",
    "worst_radius", "worst_texture", "worst_perimeter", "worst_area",
    "worst_smoothness", "worst_compactness", "worst_concavity",
    "worst_concave_points", "worst_symmetry", "worst_fractal_dimension",
]

PIMA_URLS = [
    # The original UCI entry was withdrawn; these mirrors carry the same file.
    "https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.data.csv",
    "https://nrvis.com/data/mldata/pima-indians-diabetes.csv",
]
PIMA_COLUMNS = [
    "pregnancies", "glucose", "blood_pressure", "skin_thickness",
    "insulin", "bmi", "diabetes_pedigree", "age",
]

SEISMIC_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00266/seismic-bumps.arff"
SEISMIC_COLUMNS = [
    "seismic", "seismoacoustic", "shift", "genergy", "gpuls", "gdenergy",
    "gdpuls", "ghazard", "nbumps", "nbumps2", "nbumps3", "nbumps4",
    "nbumps5", "nbumps6", "nbumps7", "nbumps89", "energy", "maxenergy",
    "class",
]


def fetch(url: str) -> bytes:
    request = urllib.request.Request(url, headers={"User-Agent": "dataset-fetch/1.0"})
    with urllib.request.urlopen(request, timeout=60) as response:
        return response.read()


def digest(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def normalize_number(cell: str) -> str:
    # repr() of the parsed value: shortest round-trip form, so "1001" and
    # "1001.0" normalize identically no matter how the source renders them.
    return repr(float(cell))


def write_wdbc(raw: bytes, out_path: Path) -> None:
    rows = []
    for line in raw.decode("ascii").splitlines():
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 32:
            raise ValueError(f"wdbc row has {len(fields)} fields, expected 32")
        diagnosis = fields[1]
        if diagnosis not in ("M", "B"):
            raise ValueError(f"unexpected diagnosis value {diagnosis!r}")
        rows.append([diagnosis] + [normalize_number(x) for x in fields[2:]])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["diagnosis"] + WDBC_COLUMNS)
    writer.writerows(rows)
    payload = buffer.getvalue().encode("ascii")
    actual = digest(payload)
    if actual != WDBC_SHA256:
        raise ValueError(
            f"wdbc.csv digest mismatch: expected {WDBC_SHA256}, got {actual}; "
            "the upstream file changed — do not use it unverified"
        )
    out_path.write_bytes(payload)
    print(f"wrote {out_path} ({len(rows)} records, sha256 {actual})")


def write_pima(raw: bytes, out_path: Path) -> None:
    rows = []
    for line in raw.decode("ascii").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != 9:
            raise ValueError(f"pima row has {len(fields)} fields, expected 9")
        label = fields[8].strip()
        if label not in ("0", "1"):
            raise ValueError(f"unexpected pima label {label!r}")
        rows.append([normalize_number(x) for x in fields[:8]] + [label])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PIMA_COLUMNS + ["outcome"])
    writer.writerows(rows)
    payload = buffer.getvalue().encode("ascii")
    out_path.write_bytes(payload)
    print(f"wrote {out_path} ({len(rows)} records, sha256 {digest(payload)}) — pin this digest")


def write_seismic(raw: bytes, out_path: Path) -> None:
    # Minimal ARFF reader: attributes are declared in order, and everything
    # after @data is CSV-shaped.
    lines = raw.decode("ascii", errors="replace").splitlines()
    attributes = []
    data_start = None
    for i, line in enumerate(lines):
        token = line.strip()
        lowered = token.lower()
        if lowered.startswith("@attribute"):
            attributes.append(token.split()[1])
        elif lowered.startswith("@data"):
            data_start = i + 1
            break
    if data_start is None:
        raise ValueError("seismic ARFF has no @data section")
    if len(attributes) != len(SEISMIC_COLUMNS):
        raise ValueError(
            f"seismic ARFF declares {len(attributes)} attributes, "
            f"expected {len(SEISMIC_COLUMNS)}"
        )

    rows = []
    for line in lines[data_start:]:
        token = line.strip()
        if not token or token.startswith("%"):
            continue
        fields = token.split(",")
        if len(fields) != len(SEISMIC_COLUMNS):
            raise ValueError(f"seismic row has {len(fields)} fields")
        row = []
        for name, cell in zip(SEISMIC_COLUMNS, fields):
            cell = cell.strip().strip("'\"")
            if name in ("seismic", "seismoacoustic", "shift", "ghazard", "class"):
                row.append(cell)  # categorical / label: keep as-is
            else:
                row.append(normalize_number(cell))
        rows.append(row)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SEISMIC_COLUMNS)
    writer.writerows(rows)
    payload = buffer.getvalue().encode("ascii")
    out_path.write_bytes(payload)
    print(f"wrote {out_path} ({len(rows)} records, sha256 {digest(payload)}) — pin this digest")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="data", help="output directory")
    parser.add_argument("--only", choices=["wdbc", "pima", "seismic"],
                        help="fetch a single dataset")
    args = parser.parse_args()

    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    jobs = {
        "wdbc": lambda: write_wdbc(fetch(WDBC_URL), data_dir / "wdbc.csv"),
        "pima": lambda: write_pima(fetch_first(PIMA_URLS), data_dir / "pima.csv"),
        "seismic": lambda: write_seismic(fetch(SEISMIC_URL), data_dir / "seismic.csv"),
    }
    selected = [args.only] if args.only else list(jobs)

    failures = 0
    for name in selected:
        try:
            jobs[name]()
        except (urllib.error.URLError, TimeoutError, OSError, ValueError) as error:
            failures += 1
            print(f"error: could not fetch {name}: {error}", file=sys.stderr)
    if failures:
        print(f"{failures} dataset(s) failed; re-run on a machine with network "
              "access and copy the files into data/", file=sys.stderr)
    return 1 if failures else 0


def fetch_first(urls):
    last_error = None
    for url in urls:
        try:
            return fetch(url)
        except (urllib.error.URLError, TimeoutError, OSError) as error:
            last_error = error
    raise OSError(f"all mirrors failed: {last_error}")


if __name__ == "__main__":
    sys.exit(main())

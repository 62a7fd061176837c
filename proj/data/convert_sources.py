"""Rebuild the bundled CSVs from their upstream distribution files.

Usage: python3 convert_sources.py <keel_ds wheel> <scikit-learn 1.1.3 wheel>
"""
import hashlib
import sys
import zipfile

KEEL = {
    "pima": ("keel_ds/data/imbalanced/raw/pima.dat",
             ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age", "class"]),
    "wisconsin": ("keel_ds/data/imbalanced/raw/wisconsin.dat",
                  ["clump_thickness", "cell_size", "cell_shape", "marginal_adhesion",
                   "epithelial_size", "bare_nuclei", "bland_chromatin",
                   "normal_nucleoli", "mitoses", "class"]),
    "iris0": ("keel_ds/data/imbalanced/raw/iris0.dat",
              ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"]),
    "twonorm": ("keel_ds/data/balanced/raw/twonorm.dat",
                [f"a{i}" for i in range(1, 21)] + ["class"]),
}
BOSTON = "sklearn/datasets/data/boston_house_prices.csv"


def write(name, header, rows):
    with open(f"{name}.csv", "w", newline="\n") as out:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")


def main(keel_wheel, sklearn_wheel):
    with zipfile.ZipFile(keel_wheel) as z:
        for name, (member, header) in KEEL.items():
            raw = z.read(member)
            print(f"{member} sha256={hashlib.sha256(raw).hexdigest()}")
            rows = [[f.strip() for f in line.split(",")]
                    for line in raw.decode().splitlines() if line.strip()]
            assert all(len(r) == len(header) for r in rows)
            write(name, header, rows)
    with zipfile.ZipFile(sklearn_wheel) as z:
        raw = z.read(BOSTON)
        print(f"{BOSTON} sha256={hashlib.sha256(raw).hexdigest()}")
        lines = raw.decode().splitlines()
        header = [h.strip('"').lower() for h in lines[1].split(",")]
        rows = [line.split(",") for line in lines[2:] if line.strip()]
        assert all(len(r) == len(header) for r in rows)
        write("housing", header, rows)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])

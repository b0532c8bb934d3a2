import argparse
from pathlib import Path

from qlandauer.cli import render


def parser(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out-dir", default="results", help="directory for CSV output")
    return p


def save(out_dir, name, header, rows):
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / name
    target.write_text(render(header, rows, "csv"), encoding="utf-8")
    print(f"wrote {target} ({len(rows)} rows)")
    return target

"""Shared helper for the demo scripts: an output folder next to the scripts."""
from pathlib import Path


def output_dir(name: str) -> Path:
    out = Path(__file__).resolve().parent / "output" / name
    out.mkdir(parents=True, exist_ok=True)
    return out

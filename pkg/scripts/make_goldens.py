"""Regenerate the golden SVG fixtures (run once; review before committing)."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from viz_fixtures import fixture_models

from tapestry import viz


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, model in fixture_models().items():
        (out_dir / f"pie_{name}.svg").write_bytes(viz.render_pie(model))
        day_model = viz.VisualizationModel(
            buckets=tuple(b for b in model.buckets if b.kind == "day"))
        (out_dir / f"slash_{name}.svg").write_bytes(viz.render_slash(day_model))
        print(f"wrote pie_{name}.svg and slash_{name}.svg")


if __name__ == "__main__":
    main()

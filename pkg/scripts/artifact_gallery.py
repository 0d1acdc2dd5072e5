#!/usr/bin/env python3
"""Write the eight-panel artifact gallery: original plus each transform.

Single-transform pipelines share one seed and one slice so the artifacts
are directly comparable. Equivalent to `mriaug preview` but with the
bundled multi-structure phantom, so it runs with no input data.

    python3 scripts/artifact_gallery.py --out gallery.png --exaggerate
"""

import argparse

from mriaug.config import AugmentationConfig
from mriaug.preview import build_montage, render_montage

from magnitude_sweep import default_phantom


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output PNG")
    parser.add_argument("--seed", type=int, default=17)
    parser.add_argument("--exaggerate", action="store_true",
                        help="magnitude level 5 instead of 3")
    args = parser.parse_args()

    config = AugmentationConfig()
    if args.exaggerate:
        config = config.with_level(5)

    sample = default_phantom()
    panels = build_montage(sample, config, args.seed)
    for panel in panels[1:]:
        print(f"{panel.name}: {panel.caption}")
    render_montage(panels, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Render one transform at all five magnitude levels side by side.

Builds a synthetic phantom, applies the chosen transform alone at levels
1..5 with a shared seed, and writes a one-row montage so the strength
ladder can be inspected visually. The drawn parameters are printed per
level.

    python3 scripts/magnitude_sweep.py --transform ghosting --out sweep.png
"""

import argparse

from mriaug.config import TRANSFORMS, AugmentationConfig
from mriaug.phantom import PhantomSpec, Structure, build_phantom
from mriaug.pipeline import Pipeline, Sample
from mriaug.preview import MontagePanel, render_montage


def default_phantom():
    spec = PhantomSpec(
        shape=(64, 64, 64),
        background=0.05,
        gradient_axis=2,
        gradient_amplitude=0.1,
        structures=(
            Structure("ellipsoid", (31.5, 31.5, 31.5), (24.0, 20.0, 22.0), 0.55, 1),
            Structure("sphere", (31.5, 31.5, 31.5), (12.0, 12.0, 12.0), 0.85, 2),
            Structure("box", (22.0, 40.0, 30.0), (4.0, 5.0, 3.0), 0.35, 3),
            Structure("sphere", (44.0, 24.0, 36.0), (5.0, 5.0, 5.0), 1.0, 4),
        ),
    )
    image, labels = build_phantom(spec)
    return Sample(image=image, labels=labels, id="phantom")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--transform", choices=TRANSFORMS, required=True)
    parser.add_argument("--out", required=True, help="output PNG")
    parser.add_argument("--seed", type=int, default=17)
    parser.add_argument("--axis", type=int, default=2, choices=(0, 1, 2))
    args = parser.parse_args()

    sample = default_phantom()
    index = sample.image.shape[args.axis] // 2
    take = lambda data: data.take(index, axis=args.axis)  # noqa: E731

    sl = take(sample.image.data)
    panels = [
        MontagePanel(
            name="original",
            image=sl,
            window=(float(sl.min()), float(sl.max())),
            caption="",
        )
    ]
    for level in (1, 2, 3, 4, 5):
        config = AugmentationConfig().solo(args.transform).with_level(level)
        out, plan = Pipeline(config).apply(sample, args.seed)
        params = plan.steps[0].params if plan.steps else {}
        shown = {
            k: round(v, 4) if isinstance(v, float) else v
            for k, v in params.items()
            if k not in ("noise_seed", "field_seed")
        }
        print(f"level {level}: {shown}")
        sl = take(out.image.data)
        panels.append(
            MontagePanel(
                name=f"L{level}",
                image=sl,
                window=(float(sl.min()), float(sl.max())),
                caption=" ".join(f"{k}={v}" for k, v in shown.items()),
            )
        )
    render_montage(panels, args.out, columns=6)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

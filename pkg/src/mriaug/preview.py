"""Montage rendering: one slice, original plus each transform applied alone.

Panels share the same slice coordinates so artifacts are visually
comparable. Display windowing is per-panel min-max and the window bounds
are printed in each caption, so nothing about the scaling is hidden.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .config import TRANSFORMS, AugmentationConfig
from .errors import BadSliceIndexError
from .pipeline import Pipeline, Sample
from .sampling import AugmentationPlan

_AXIS_NAMES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class MontagePanel:
    name: str
    image: np.ndarray        # 2D float32 slice, pre-windowing
    window: tuple            # (lo, hi) display window
    caption: str
    plan: AugmentationPlan = None


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        if axis.lower() in _AXIS_NAMES:
            return _AXIS_NAMES[axis.lower()]
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    axis = int(axis)
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    return axis


def _take_slice(data: np.ndarray, axis: int, index: int) -> np.ndarray:
    return np.take(data, index, axis=axis)


def _describe(plan: AugmentationPlan) -> str:
    parts = []
    for step in plan.steps:
        p = step.params
        t = step.transform
        if t == "rotation":
            a = p["angles_deg"]
            parts.append(f"rot {a[0]:.1f},{a[1]:.1f},{a[2]:.1f}deg")
        elif t == "elastic":
            parts.append(f"sig={p['kernel_sigma']:.1f} a={p['alpha']:.0f}")
        elif t == "bias_field":
            parts.append(f"amp={p['amplitude']:.2f} s={p['scale']:.0f}")
        elif t == "ringing":
            parts.append(f"cut={p['cutoff']} ax={'xyz'[p['axis']]}")
        elif t == "ghosting":
            parts.append(f"n={p['n']} f={p['factor']:.2f} ax={'xyz'[p['axis']]}")
        else:
            parts.append(f"sig={p['sigma']:.2g}")
    return " ".join(parts)


def build_montage(
    sample: Sample,
    config: AugmentationConfig,
    seed: int,
    slice_axis=2,
    slice_index: int = None,
) -> list:
    """Original plus the seven transforms applied alone, same slice.

    Each transform runs in its own single-transform pipeline with the
    same seed, at the magnitude level carried by `config`.
    """
    axis = _axis_index(slice_axis)
    length = sample.image.shape[axis]
    index = length // 2 if slice_index is None else int(slice_index)
    if not (0 <= index < length):
        raise BadSliceIndexError(
            f"slice index {index} outside axis of length {length}"
        )

    panels = []
    sl = _take_slice(sample.image.data, axis, index)
    panels.append(
        MontagePanel(
            name="original",
            image=sl,
            window=_window(sl),
            caption=_caption("", sl),
        )
    )
    for t in TRANSFORMS:
        pipe = Pipeline(config.solo(t))
        out, plan = pipe.apply(sample, seed)
        sl = _take_slice(out.image.data, axis, index)
        panels.append(
            MontagePanel(
                name=t,
                image=sl,
                window=_window(sl),
                caption=_caption(_describe(plan), sl),
                plan=plan,
            )
        )
    return panels


def _window(sl: np.ndarray) -> tuple:
    return (float(sl.min()), float(sl.max()))


def _caption(desc: str, sl: np.ndarray) -> str:
    lo, hi = _window(sl)
    win = f"w[{lo:.2f},{hi:.2f}]"
    return f"{desc} {win}".strip()


def _to_uint8(sl: np.ndarray, window: tuple) -> np.ndarray:
    lo, hi = window
    if hi > lo:
        scaled = (sl.astype(np.float64) - lo) / (hi - lo)
    else:
        scaled = np.zeros_like(sl, dtype=np.float64)
    return np.clip(scaled * 255.0 + 0.5, 0.0, 255.0).astype(np.uint8)


def render_montage(panels, path, columns: int = 4):
    """Write the montage as an 8-bit grayscale PNG.

    Small slices are integer-upscaled (nearest neighbour, so voxels stay
    honest blocks) until tiles are at least 96 px wide.
    """
    font = ImageFont.load_default()
    label_h = 12
    caption_h = 34
    margin = 4
    h, w = panels[0].image.shape
    zoom = max(1, -(-96 // w))
    h, w = h * zoom, w * zoom
    cell_w = w + 2 * margin
    cell_h = h + label_h + caption_h + 2 * margin
    rows = (len(panels) + columns - 1) // columns

    canvas = Image.new("L", (columns * cell_w, rows * cell_h), color=0)
    draw = ImageDraw.Draw(canvas)
    for i, panel in enumerate(panels):
        r, c = divmod(i, columns)
        x0 = c * cell_w + margin
        y0 = r * cell_h + margin
        draw.text((x0, y0), panel.name, fill=255, font=font)
        tile = Image.fromarray(_to_uint8(panel.image, panel.window), mode="L")
        if zoom > 1:
            tile = tile.resize((w, h), resample=Image.NEAREST)
        canvas.paste(tile, (x0, y0 + label_h))
        _wrapped_text(draw, panel.caption, x0, y0 + label_h + h + 2, w, font)
    canvas.save(path, format="PNG")


def _wrapped_text(draw, text, x, y, width, font, line_h=10):
    line = ""
    for word in text.split():
        probe = f"{line} {word}".strip()
        if draw.textlength(probe, font=font) <= width or not line:
            line = probe
        else:
            draw.text((x, y), line, fill=200, font=font)
            y += line_h
            line = word
    if line:
        draw.text((x, y), line, fill=200, font=font)

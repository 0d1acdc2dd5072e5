"""Regenerate the golden NIfTI fixtures.

Deliberately independent of the package: the header is assembled by packing
fields at their standard byte offsets into a 348-byte block, so reader bugs
cannot leak into the fixtures. Run from this directory:

    python generate_golden.py
"""

import gzip
import struct
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent


def reference_header(
    shape,
    datatype,
    bitpix,
    vox_offset=352.0,
    magic=b"n+1\x00",
    srow=((1.0, 0, 0, 0), (0, 1.0, 0, 0), (0, 0, 1.0, 0)),
):
    hdr = bytearray(348)
    struct.pack_into("<i", hdr, 0, 348)
    dim = [len(shape)] + list(shape) + [1] * (7 - len(shape))
    struct.pack_into("<8h", hdr, 40, *dim)
    struct.pack_into("<h", hdr, 70, datatype)
    struct.pack_into("<h", hdr, 72, bitpix)
    struct.pack_into("<8f", hdr, 76, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    struct.pack_into("<f", hdr, 108, vox_offset)
    struct.pack_into("<f", hdr, 112, 1.0)  # scl_slope
    struct.pack_into("<f", hdr, 116, 0.0)  # scl_inter
    struct.pack_into("<h", hdr, 252, 0)  # qform_code
    struct.pack_into("<h", hdr, 254, 1)  # sform_code
    struct.pack_into("<4f", hdr, 280, *srow[0])
    struct.pack_into("<4f", hdr, 296, *srow[1])
    struct.pack_into("<4f", hdr, 312, *srow[2])
    struct.pack_into("<4s", hdr, 344, magic)
    return bytes(hdr)


def golden_f32_bytes():
    """4x4x4 float32 image whose value at file position i is i."""
    hdr = reference_header((4, 4, 4), datatype=16, bitpix=32)
    data = np.arange(64, dtype="<f4").tobytes()
    return hdr + b"\x00" * 4 + data


def write_pair_fixture(directory, stem="pair_3x2x2_i16"):
    """Two-file variant (.hdr/.img) with int16 data, for pair reading."""
    hdr = reference_header(
        (3, 2, 2), datatype=4, bitpix=16, vox_offset=0.0, magic=b"ni1\x00"
    )
    data = np.arange(12, dtype="<i2").tobytes()
    (Path(directory) / f"{stem}.hdr").write_bytes(hdr)
    (Path(directory) / f"{stem}.img").write_bytes(data)


def main():
    raw = golden_f32_bytes()
    (HERE / "golden_4x4x4_f32.nii").write_bytes(raw)
    gz = gzip.compress(raw, mtime=0)
    (HERE / "golden_4x4x4_f32.nii.gz").write_bytes(gz)
    write_pair_fixture(HERE)
    print("wrote", sorted(p.name for p in HERE.glob("golden*")))


if __name__ == "__main__":
    main()

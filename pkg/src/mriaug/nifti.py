"""NIfTI-1 reader/writer (.nii / .nii.gz, plus .hdr/.img pairs on read).

Only NIfTI-1 scalar 3D volumes are handled; NIfTI-2 is rejected with a
clear error. The sform is preferred over the qform when both are present,
falling back to a diagonal pixdim affine when neither is coded. Extension
blocks are skipped (data is read at vox_offset); they are not preserved
on rewrite.
"""

from __future__ import annotations

import gzip
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    BadSizeError,
    GzipDecodeError,
    LossyDatatypeError,
    TruncatedFileError,
    UnsupportedDatatypeError,
    UnsupportedDimensionalityError,
)
from .volume import LabelVolume, Volume

HEADER_SIZE = 348

# datatype code -> numpy dtype (endian applied at decode time)
_DTYPES = {
    2: np.dtype(np.uint8),
    4: np.dtype(np.int16),
    8: np.dtype(np.int32),
    16: np.dtype(np.float32),
    64: np.dtype(np.float64),
    512: np.dtype(np.uint16),
}
_DTYPE_NAMES = {
    "uint8": 2,
    "int16": 4,
    "int32": 8,
    "float32": 16,
    "float64": 64,
    "uint16": 512,
}

# full little/big-endian layout of the 348-byte header
_FMT = "i10s18sihcc8h3fhhhh8ffffhccffffii80s24shh6f12f16s4s"


@dataclass(frozen=True)
class NiftiHeader:
    sizeof_hdr: int
    dim: tuple
    datatype: int
    bitpix: int
    pixdim: tuple
    vox_offset: float
    scl_slope: float
    scl_inter: float
    qform_code: int
    sform_code: int
    quatern: tuple          # (b, c, d)
    qoffset: tuple          # (x, y, z)
    srow_x: tuple
    srow_y: tuple
    srow_z: tuple
    magic: bytes
    byteorder: str          # "<" or ">" as found on disk

    @property
    def shape(self) -> tuple:
        return tuple(int(d) for d in self.dim[1:4])


def parse_header(buf: bytes) -> NiftiHeader:
    """Decode a 348-byte NIfTI-1 header with endian auto-correction.

    Total on any >= 348-byte buffer: returns a header or raises
    BadSizeError / BadMagicError, never crashes on garbage bytes.
    """
    if len(buf) < HEADER_SIZE:
        raise BadSizeError(f"need {HEADER_SIZE} header bytes, got {len(buf)}")
    (le_size,) = struct.unpack_from("<i", buf, 0)
    (be_size,) = struct.unpack_from(">i", buf, 0)
    if le_size == HEADER_SIZE:
        order = "<"
    elif be_size == HEADER_SIZE:
        order = ">"
    elif 540 in (le_size, be_size):
        raise BadMagicError("NIfTI-2 file; only NIfTI-1 is supported")
    else:
        raise BadMagicError(f"sizeof_hdr is {le_size}, not {HEADER_SIZE}")

    fields = struct.unpack_from(order + _FMT, buf, 0)
    magic = fields[-1]
    if magic not in (b"n+1\0", b"ni1\0"):
        raise BadMagicError(f"bad magic {magic!r}")

    return NiftiHeader(
        sizeof_hdr=int(fields[0]),
        dim=tuple(int(d) for d in fields[7:15]),
        datatype=int(fields[19]),
        bitpix=int(fields[20]),
        pixdim=tuple(float(p) for p in fields[22:30]),
        vox_offset=float(fields[30]),
        scl_slope=float(fields[31]),
        scl_inter=float(fields[32]),
        qform_code=int(fields[44]),
        sform_code=int(fields[45]),
        quatern=tuple(float(x) for x in fields[46:49]),
        qoffset=tuple(float(x) for x in fields[49:52]),
        srow_x=tuple(float(x) for x in fields[52:56]),
        srow_y=tuple(float(x) for x in fields[56:60]),
        srow_z=tuple(float(x) for x in fields[60:64]),
        magic=bytes(magic),
        byteorder=order,
    )


def _quaternion_affine(h: NiftiHeader) -> np.ndarray:
    b, c, d = h.quatern
    a2 = max(0.0, 1.0 - b * b - c * c - d * d)
    a = np.sqrt(a2)
    rot = np.array(
        [
            [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
            [2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)],
            [2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c],
        ]
    )
    qfac = -1.0 if h.pixdim[0] < 0 else 1.0
    scales = np.array([h.pixdim[1], h.pixdim[2], qfac * h.pixdim[3]])
    affine = np.eye(4)
    affine[:3, :3] = rot * scales[None, :]
    affine[:3, 3] = h.qoffset
    return affine


def header_affine(h: NiftiHeader) -> np.ndarray:
    """Affine per the precedence rule: sform, then qform, then pixdim."""
    if h.sform_code > 0:
        return np.array([h.srow_x, h.srow_y, h.srow_z, (0.0, 0.0, 0.0, 1.0)])
    if h.qform_code > 0:
        return _quaternion_affine(h)
    affine = np.eye(4)
    for i in range(3):
        affine[i, i] = h.pixdim[i + 1] if h.pixdim[i + 1] != 0 else 1.0
    return affine


def _read_bytes(path: Path) -> bytes:
    with open(path, "rb") as f:
        head = f.read(2)
        f.seek(0)
        if head == b"\x1f\x8b":
            try:
                with gzip.GzipFile(fileobj=f) as gz:
                    return gz.read()
            except (OSError, EOFError, zlib.error) as e:
                raise GzipDecodeError(f"{path}: {e}") from e
        return f.read()


def read_nifti(path, as_labels: bool = False):
    """Read one NIfTI-1 file into a (Volume | LabelVolume, NiftiHeader) pair.

    Gzip compression is auto-detected from the 0x1F,0x8B magic bytes.
    Voxel values are scaled by scl_slope/scl_inter when slope is nonzero
    (slope 0 means "no scaling" per the standard). With as_labels=True the
    data must be non-negative integers.
    """
    path = Path(path)
    raw = _read_bytes(path)
    header = parse_header(raw)
    if header.dim[0] != 3:
        raise UnsupportedDimensionalityError(
            f"dim[0]={header.dim[0]}; only 3D volumes are supported"
        )
    if header.datatype not in _DTYPES:
        raise UnsupportedDatatypeError(f"datatype code {header.datatype}")
    shape = header.shape
    if min(shape) < 1:
        raise UnsupportedDimensionalityError(f"bad dims {shape}")

    if header.magic == b"ni1\0":
        img_path = path.with_suffix(".img")
        raw = _read_bytes(img_path)
        offset = int(header.vox_offset)
    else:
        offset = int(header.vox_offset)
        if offset < HEADER_SIZE:
            raise TruncatedFileError(f"vox_offset {offset} inside the header")

    dtype = _DTYPES[header.datatype].newbyteorder(header.byteorder)
    nbytes = int(np.prod(shape)) * dtype.itemsize
    if len(raw) < offset + nbytes:
        raise TruncatedFileError(
            f"{path}: need {offset + nbytes} bytes, file has {len(raw)}"
        )
    flat = np.frombuffer(raw, dtype=dtype, count=int(np.prod(shape)), offset=offset)
    data = np.asfortranarray(flat.reshape(shape, order="F"))

    slope, inter = header.scl_slope, header.scl_inter
    scaled = (
        np.isfinite(slope)
        and slope != 0.0
        and not (slope == 1.0 and inter == 0.0)
    )
    if scaled:
        data = data.astype(np.float64) * slope + inter

    spacing = tuple(abs(p) if p != 0 else 1.0 for p in header.pixdim[1:4])
    affine = header_affine(header)

    if as_labels:
        if np.issubdtype(data.dtype, np.floating):
            rounded = np.rint(data)
            if not np.array_equal(rounded, data):
                raise UnsupportedDatatypeError(
                    "non-integral values cannot be read as labels"
                )
            data = rounded
        labels = LabelVolume(
            np.ascontiguousarray(data).astype(np.int32), spacing, affine
        )
        return labels, header

    # float64 files keep their precision; everything else becomes float32
    out_dtype = np.float64 if header.datatype == 64 else np.float32
    vol = Volume(np.ascontiguousarray(data).astype(out_dtype), spacing, affine)
    return vol, header


def _resolve_datatype(v, datatype):
    if datatype is None:
        if isinstance(v, LabelVolume):
            hi = int(v.data.max()) if v.data.size else 0
            if hi <= 255:
                return 2
            if hi <= 65535:
                return 512
            return 8
        return 16
    if isinstance(datatype, str):
        if datatype not in _DTYPE_NAMES:
            raise UnsupportedDatatypeError(datatype)
        return _DTYPE_NAMES[datatype]
    if int(datatype) not in _DTYPES:
        raise UnsupportedDatatypeError(f"datatype code {datatype}")
    return int(datatype)


def _convert_for_write(data: np.ndarray, dtype: np.dtype, allow_lossy: bool):
    if np.issubdtype(dtype, np.integer):
        info = np.iinfo(dtype)
        if np.issubdtype(data.dtype, np.floating):
            exact = bool(
                np.array_equal(np.rint(data), data)
                and data.min() >= info.min
                and data.max() <= info.max
            )
            if not exact and not allow_lossy:
                raise LossyDatatypeError(
                    "float data would be quantized; pass allow_lossy=True to opt in"
                )
            return np.clip(np.rint(data), info.min, info.max).astype(dtype)
        if data.size and (data.min() < info.min or data.max() > info.max):
            if not allow_lossy:
                raise LossyDatatypeError(
                    f"values overflow {dtype}; pass allow_lossy=True to clip"
                )
            return np.clip(data, info.min, info.max).astype(dtype)
        return data.astype(dtype)
    return data.astype(dtype)


def write_nifti(v, path, datatype=None, gzip_compress=None, allow_lossy=False):
    """Write a Volume or LabelVolume as single-file NIfTI-1.

    datatype may be a name ("float32", "uint8", ...) or a NIfTI code;
    defaults to float32 for volumes and the smallest lossless integer type
    for labels. Compression defaults to on for paths ending in .gz. Output
    is always little-endian with vox_offset=352, scl_slope=1, scl_inter=0
    and the affine stored as the sform.
    """
    path = Path(path)
    code = _resolve_datatype(v, datatype)
    dtype = _DTYPES[code]
    if gzip_compress is None:
        gzip_compress = path.suffix == ".gz"

    data = _convert_for_write(np.asarray(v.data), dtype, allow_lossy)
    payload = np.ascontiguousarray(data, dtype=dtype.newbyteorder("<")).tobytes(
        order="F"
    )

    affine = np.asarray(v.affine, dtype=np.float64)
    dim = (3,) + tuple(int(n) for n in v.shape) + (1, 1, 1, 1)
    pixdim = (1.0,) + tuple(float(s) for s in v.spacing) + (0.0, 0.0, 0.0, 0.0)
    header = struct.pack(
        "<" + _FMT,
        HEADER_SIZE,                      # sizeof_hdr
        b"", b"", 0, 0, b"\0", b"\0",     # unused analyze fields
        *dim,
        0.0, 0.0, 0.0,                    # intent_p1..p3
        0,                                # intent_code
        code,
        int(dtype.itemsize * 8),          # bitpix
        0,                                # slice_start
        *pixdim,
        352.0,                            # vox_offset
        1.0, 0.0,                         # scl_slope, scl_inter
        0, b"\0", b"\x0a",                # slice_end, slice_code, xyzt_units (mm|s)
        0.0, 0.0, 0.0, 0.0,               # cal_max, cal_min, slice_duration, toffset
        0, 0,                             # glmax, glmin
        b"mriaug", b"",                   # descrip, aux_file
        0, 1,                             # qform_code, sform_code
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,     # quatern_b..d, qoffset_x..z
        *(float(x) for x in affine[0]),
        *(float(x) for x in affine[1]),
        *(float(x) for x in affine[2]),
        b"",                              # intent_name
        b"n+1\0",
    )
    blob = header + b"\0\0\0\0" + payload  # 4-byte extender flag, no extensions

    if gzip_compress:
        with open(path, "wb") as f:
            with gzip.GzipFile(filename="", mode="wb", fileobj=f, mtime=0) as gz:
                gz.write(blob)
    else:
        with open(path, "wb") as f:
            f.write(blob)

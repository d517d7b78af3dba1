"""PNG and binary PGM/PPM codecs.

Only the subset needed for document images is handled: grayscale and RGB
at 8 or 16 bits (plus low bit-depth gray and palette PNGs on decode).
Sixteen-bit samples are reduced to 8 bits by integer division by 257, so
65535 maps to 255 exactly.
"""
import io
import os
import struct
import zlib

import numpy as np
from PIL import Image

from .errors import DecodeError, UnsupportedFormatError
from .raster import as_mask, as_raster, as_rgb, mask_to_raster, raster_to_mask, to_gray

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# color type -> samples per pixel
_PNG_CHANNELS = {0: 1, 2: 3, 3: 1, 4: 2, 6: 4}
_PNG_DEPTHS = {0: (1, 2, 4, 8, 16), 2: (8, 16), 3: (1, 2, 4, 8)}


def decode_image(data):
    """Decode PNG or binary PGM/PPM bytes.

    Returns a 2-D uint8 array for grayscale files and an ``(H, W, 3)``
    uint8 array for color files.

    Raises
    ------
    DecodeError
        The data is malformed or truncated; the message names the offset.
    UnsupportedFormatError
        The file is well formed but uses an unsupported feature (alpha
        channels, interlacing, unusual bit depths).
    """
    data = bytes(data)
    if data.startswith(PNG_SIGNATURE):
        return _decode_png(data)
    if data[:2] in (b"P5", b"P6"):
        return _decode_pnm(data)
    raise DecodeError("unrecognized image signature", offset=0)


def encode_image(img, format="png"):
    """Encode a raster, RGB image or boolean mask.

    Masks are written as 8-bit gray with foreground 0 and background 255.
    ``format="pgm"`` writes P5 for gray data and P6 for RGB data.
    """
    arr = np.asarray(img)
    if arr.dtype == bool:
        arr = mask_to_raster(as_mask(arr))
    elif arr.ndim == 3:
        arr = as_rgb(arr)
    else:
        arr = as_raster(arr)
    if format == "png":
        return _encode_png(arr)
    if format in ("pgm", "ppm", "pnm"):
        return _encode_pnm(arr)
    raise ValueError(f"unknown format {format!r}")


def read_image(path):
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def read_mask(path):
    """Read a stored mask; dark pixels (<= 127) are foreground."""
    img = read_image(path)
    if img.ndim == 3:
        img = to_gray(img)
    return raster_to_mask(img)


def format_for_path(path):
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".png":
        return "png"
    if ext in (".pgm", ".ppm", ".pnm"):
        return "pgm"
    raise UnsupportedFormatError(f"cannot infer image format from {path!r}")


def write_image(path, img, format=None):
    fmt = format or format_for_path(path)
    with open(path, "wb") as fh:
        fh.write(encode_image(img, fmt))


# -- PNG ---------------------------------------------------------------------


def _iter_chunks(data):
    pos = len(PNG_SIGNATURE)
    while True:
        if pos + 8 > len(data):
            raise DecodeError("truncated chunk header", offset=pos)
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        end = pos + 8 + length + 4
        if end > len(data):
            raise DecodeError(f"truncated {ctype!r} chunk", offset=pos)
        body = data[pos + 8:pos + 8 + length]
        (crc,) = struct.unpack(">I", data[end - 4:end])
        if zlib.crc32(ctype + body) & 0xFFFFFFFF != crc:
            raise DecodeError(f"CRC mismatch in {ctype!r} chunk", offset=pos)
        yield pos, ctype, body
        if ctype == b"IEND":
            return
        pos = end


def _decode_png(data):
    header = None
    idat = []
    idat_offset = None
    for pos, ctype, body in _iter_chunks(data):
        if header is None:
            if ctype != b"IHDR" or len(body) != 13:
                raise DecodeError("first chunk is not a valid IHDR", offset=pos)
            header = struct.unpack(">IIBBBBB", body)
        elif ctype == b"IDAT":
            if idat_offset is None:
                idat_offset = pos
            idat.append(body)
    width, height, depth, ctype_, _, _, interlace = header
    if width == 0 or height == 0:
        raise DecodeError("zero image dimension in IHDR", offset=8)
    if ctype_ not in _PNG_DEPTHS:
        if ctype_ in _PNG_CHANNELS:
            raise UnsupportedFormatError("PNG alpha channels are not supported")
        raise DecodeError(f"invalid PNG color type {ctype_}", offset=8)
    if depth not in _PNG_DEPTHS[ctype_]:
        raise UnsupportedFormatError(
            f"unsupported bit depth {depth} for PNG color type {ctype_}")
    if interlace:
        raise UnsupportedFormatError("interlaced PNGs are not supported")
    if not idat:
        raise DecodeError("PNG has no image data", offset=len(data))

    channels = _PNG_CHANNELS[ctype_]
    rowbytes = (width * channels * depth + 7) // 8
    try:
        raw = zlib.decompress(b"".join(idat))
    except zlib.error as exc:
        raise DecodeError(f"corrupt compressed image data: {exc}", offset=idat_offset) from None
    if len(raw) != height * (rowbytes + 1):
        raise DecodeError(
            f"image data holds {len(raw)} bytes, expected {height * (rowbytes + 1)}",
            offset=idat_offset)

    if depth != 16:
        return _decode_png_pillow(data)

    bpp = channels * 2
    rows = unfilter_scanlines(raw, height, rowbytes, bpp, offset=idat_offset)
    samples = rows.view(">u2").reshape(height, width, channels).astype(np.uint32)
    out = (samples // 257).astype(np.uint8)
    return out[..., 0].copy() if channels == 1 else out


def _decode_png_pillow(data):
    # Pillow is exact for bit depths <= 8; 16-bit data is handled above
    with Image.open(io.BytesIO(data)) as im:
        im.load()
        if im.mode == "P":
            pal = im.getpalette() or []
            gray_palette = all(pal[i] == pal[i + 1] == pal[i + 2] for i in range(0, len(pal), 3))
            im = im.convert("L" if gray_palette else "RGB")
        elif im.mode == "1":
            im = im.convert("L")
        elif im.mode not in ("L", "RGB"):
            raise UnsupportedFormatError(f"unsupported PNG pixel mode {im.mode}")
        return np.array(im, dtype=np.uint8)


def _paeth(a, b, c):
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def unfilter_scanlines(raw, height, rowbytes, bpp, offset=None):
    """Undo PNG per-scanline filtering.

    `bpp` is the filter byte stride (bytes per complete pixel, at least 1)
    and must divide `rowbytes`. Returns a ``(height, rowbytes)`` uint8 array.
    """
    out = np.zeros((height, rowbytes), dtype=np.uint8)
    prev = np.zeros(rowbytes, dtype=np.uint8)
    stride = rowbytes + 1
    for y in range(height):
        ftype = raw[y * stride]
        line = np.frombuffer(raw, dtype=np.uint8, count=rowbytes, offset=y * stride + 1).copy()
        if ftype == 0:
            pass
        elif ftype == 1:
            # uint8 accumulation wraps modulo 256, as the filter requires
            line = np.cumsum(line.reshape(-1, bpp), axis=0, dtype=np.uint8).reshape(-1)
        elif ftype == 2:
            line += prev
        elif ftype in (3, 4):
            cur = line.tolist()
            up = prev.tolist()
            for i in range(rowbytes):
                left = cur[i - bpp] if i >= bpp else 0
                if ftype == 3:
                    pred = (left + up[i]) >> 1
                else:
                    pred = _paeth(left, up[i], up[i - bpp] if i >= bpp else 0)
                cur[i] = (cur[i] + pred) & 0xFF
            line = np.array(cur, dtype=np.uint8)
        else:
            raise DecodeError(f"invalid PNG filter type {ftype} on row {y}", offset=offset)
        out[y] = line
        prev = line
    return out


def _png_chunk(ctype, body):
    crc = zlib.crc32(ctype + body) & 0xFFFFFFFF
    return struct.pack(">I", len(body)) + ctype + body + struct.pack(">I", crc)


def _encode_png(arr):
    height, width = arr.shape[:2]
    color_type = 2 if arr.ndim == 3 else 0
    rows = arr.reshape(height, -1)
    # "Up" filter on every row: vectorized and compresses text pages well
    up = np.empty_like(rows)
    up[0] = rows[0]
    up[1:] = rows[1:] - rows[:-1]
    scan = np.empty((height, rows.shape[1] + 1), dtype=np.uint8)
    scan[:, 0] = 2
    scan[:, 1:] = up
    ihdr = struct.pack(">IIBBBBB", width, height, 8, color_type, 0, 0, 0)
    return b"".join([
        PNG_SIGNATURE,
        _png_chunk(b"IHDR", ihdr),
        _png_chunk(b"IDAT", zlib.compress(scan.tobytes(), 6)),
        _png_chunk(b"IEND", b""),
    ])


# -- PGM / PPM -----------------------------------------------------------------


def _pnm_tokens(data, count):
    """Read `count` whitespace separated header tokens after the magic."""
    pos = 2
    tokens = []
    while len(tokens) < count:
        while pos < len(data) and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            else:
                pos += 1
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DecodeError("truncated PNM header", offset=start)
        token = data[start:pos]
        if not token.isdigit():
            raise DecodeError(f"invalid PNM header token {token!r}", offset=start)
        tokens.append(int(token))
    if pos >= len(data):
        raise DecodeError("truncated PNM header", offset=pos)
    return tokens, pos + 1  # exactly one whitespace byte precedes the raster


def _decode_pnm(data):
    channels = 1 if data[:2] == b"P5" else 3
    (width, height, maxval), start = _pnm_tokens(data, 3)
    if width == 0 or height == 0:
        raise DecodeError("zero image dimension in PNM header", offset=2)
    if maxval == 255:
        dtype = np.uint8
    elif maxval == 65535:
        dtype = np.dtype(">u2")
    else:
        raise UnsupportedFormatError(f"unsupported PNM maxval {maxval}")
    need = width * height * channels * np.dtype(dtype).itemsize
    if len(data) - start < need:
        raise DecodeError(
            f"truncated PNM raster: {len(data) - start} of {need} bytes", offset=len(data))
    px = np.frombuffer(data, dtype=dtype, count=width * height * channels, offset=start)
    if maxval == 65535:
        px = (px.astype(np.uint32) // 257).astype(np.uint8)
    px = px.reshape(height, width, channels)
    return px[..., 0].copy() if channels == 1 else px.copy()


def _encode_pnm(arr):
    magic = b"P6" if arr.ndim == 3 else b"P5"
    height, width = arr.shape[:2]
    return magic + f"\n{width} {height}\n255\n".encode() + arr.tobytes()
